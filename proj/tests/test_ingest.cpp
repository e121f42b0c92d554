// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "crx/dedup.hpp"
#include "crx/error.hpp"
#include "crx/ingest.hpp"
#include "fixtures.hpp"

using namespace crx;
using namespace crx::testing;

namespace {

constexpr const char* kTwoRecords =
    "FN Clarivate Analytics Web of Science\n"
    "VR 1.0\n"
    "PT J\n"
    "AU Smith, J\n"
    "TI Bibliometric laws\n"
    "CR Lotka AJ, 1926, J WASHINGTON ACAD SCI, V16, P317\n"
    "   Price DJD, 1965, SCIENCE, V149, P510, DOI 10.1126/science.149.3683.510\n"
    "   ANONYMOUS, 19XX, UNPUBLISHED\n"
    "PY 1980\n"
    "UT WOS:0001\n"
    "ER\n"
    "\n"
    "PT J\n"
    "AU Doe, J\n"
    "CR LOTKA AJ, 1926, J WASHINGTON ACAD SCI, V16, P317\n"
    "PY 1982\n"
    "UT WOS:0002\n"
    "ER\n"
    "\n"
    "PT J\n"
    "AU Roe, R\n"
    "PY 1981\n"
    "UT WOS:0003\n"
    "ER\n"
    "EF\n";


}  // namespace

TEST_CASE("tagged reference grammar") {
  const auto ref = parse_reference("LOTKA AJ, 1926, J WASHINGTON ACAD SCI, V16, P317");
  REQUIRE(ref);
  CHECK(ref->authors == std::vector<Author>{{"LOTKA", "AJ"}});
  CHECK(ref->year == 1926);
  CHECK(ref->source == "J WASHINGTON ACAD SCI");
  CHECK(ref->volume == "16");
  CHECK(ref->page == "317");
  CHECK_FALSE(ref->doi);

  const auto doi = parse_reference("Price DJD, 1965, SCIENCE, V149, P510, DOI 10.1126/science.149.3683.510");
  REQUIRE(doi);
  CHECK(doi->doi == "10.1126/science.149.3683.510");

  CHECK_FALSE(parse_reference("ANONYMOUS, 19XX, UNPUBLISHED"));
  CHECK_FALSE(parse_reference(""));
  CHECK_FALSE(parse_reference("NOBODY, 0042, NOWHERE"));
}

TEST_CASE("scopus reference layout") {
  const auto ref = parse_reference("Lotka, A.J., The frequency distribution of scientific productivity (1926) "
                                   "J Wash Acad Sci, 16, pp. 317-323");
  REQUIRE(ref);
  CHECK(ref->year == 1926);
  REQUIRE(ref->authors.size() == 1);
  CHECK(ref->authors[0].last_name == "LOTKA");
  CHECK(ref->source == "J Wash Acad Sci");
  CHECK(ref->volume == "16");
  CHECK(ref->page == "317");
}

TEST_CASE("parse_tagged") {
  const ParseResult r = parse_tagged(kTwoRecords);
  CHECK(r.report.records == 3);
  CHECK(r.report.references == 4);
  CHECK(r.report.parsed == 3);
  REQUIRE(r.report.warnings.size() == 1);
  CHECK(r.report.warnings[0].find("ANONYMOUS, 19XX") != std::string::npos);

  REQUIRE(r.dataset.pubs.size() == 3);
  CHECK(r.dataset.pubs[0].id == "WOS:0001");
  CHECK(r.dataset.pubs[0].pub_year == 1980);
  CHECK(r.dataset.pubs[0].raw_refs.size() == 3);
  CHECK(r.dataset.pubs[2].raw_refs.empty());
  CHECK(r.dataset.citing_years == YearRange{1980, 1982});
}

TEST_CASE("parse_tagged skips records without a usable year") {
  const ParseResult r = parse_tagged("PT J\nPY 19x0\nCR LOTKA AJ, 1926, J WASH\nER\nPT J\nPY 1990\nER\n");
  CHECK(r.dataset.pubs.size() == 1);
  CHECK(r.report.warnings.size() == 1);
  CHECK(r.dataset.pubs[0].id == "P000002");
}

TEST_CASE("tagged input without record delimiters is rejected") {
  CHECK(code_of([] { parse_tagged("Year,References\n1980,\"LOTKA AJ, 1926, J\"\n"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { parse_tagged(""); }) == ErrorCode::FormatError);
}

TEST_CASE("reference csv") {
  const ParseResult r = parse_refcsv(
      "Authors,Year,References,EID\n"
      "\"Smith J.\",1980,\"LOTKA AJ, 1926, J WASHINGTON ACAD SCI, V16, P317; PRICE DJD, 1965, SCIENCE, V149, P510\",e1\n"
      "\"Doe J.\",1981,,e2\n");
  REQUIRE(r.dataset.pubs.size() == 2);
  CHECK(r.dataset.pubs[0].id == "e1");
  CHECK(r.report.references == 2);
  CHECK(r.report.parsed == 2);
  CHECK(r.dataset.pubs[1].raw_refs.empty());
}

TEST_CASE("reference csv keeps separators inside quoted titles") {
  const ParseResult r = parse_refcsv(
      "year,references\n"
      "1990,\"SMITH J, 1980, \"\"Growth; decay\"\", J DOC; DOE J, 1981, SCIENCE\"\n");
  REQUIRE(r.references.size() == 2);
  REQUIRE(r.references[0].parsed);
  CHECK(r.references[0].parsed->title == "Growth; decay");
  CHECK(r.references[0].parsed->source == "J DOC");
}

TEST_CASE("reference csv needs its columns") {
  CHECK(code_of([] { parse_refcsv("Title,Year\nx,1980\n"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { parse_refcsv(""); }) == ErrorCode::FormatError);
  CHECK(code_of([] { parse_refcsv("Year,References\n1980,\"unterminated\n"); }) == ErrorCode::FormatError);
}

TEST_CASE("aggregate folds case and counts per citing year") {
  const AggregateResult agg = aggregate(parse_tagged(kTwoRecords));
  CHECK(agg.unparsed == 1);
  REQUIRE(agg.dataset.crs.size() == 2);
  const CitedReference& lotka = agg.dataset.crs[0];
  CHECK(lotka.id == "CR000001");
  CHECK(lotka.rpy == 1926);
  CHECK(lotka.n_cr == 2);
  CHECK(lotka.per_year == std::map<int, Count>{{1980, 1}, {1982, 1}});
  CHECK(agg.dataset.crs[1].doi == "10.1126/science.149.3683.510");
  CHECK(agg.dataset.rpy_range == YearRange{1926, 1965});
  CHECK_NOTHROW(agg.dataset.validate());
}

TEST_CASE("rpy filter drops references outside the range") {
  const ParseResult parsed = parse_refcsv(
      "Year,References\n"
      "2012,\"A X, 1950, J ONE; B Y, 2010, J TWO; C Z, 1890, J THREE\"\n");
  const AggregateResult agg = aggregate(parsed, YearRange{1900, 2005});
  REQUIRE(agg.dataset.crs.size() == 1);
  CHECK(agg.dataset.crs[0].rpy == 1950);
  CHECK(agg.filtered_out == 2);
  CHECK(agg.dataset.rpy_range == YearRange{1900, 2005});

  Dataset ds = aggregate(parsed).dataset;
  CHECK(filter_rpy(ds, {1900, 2005}) == 2);
  CHECK(ds.crs.size() == 1);
}

TEST_CASE("invalid utf-8 is replaced, not fatal") {
  CHECK(sanitize_utf8("ok \xC3\xA9") == "ok \xC3\xA9");
  CHECK(sanitize_utf8("bad \xFF!") == "bad \xEF\xBF\xBD!");
  const ParseResult r = parse_tagged("PT J\nPY 1990\nCR M\xFCLLER K, 1970, Z PHYS\nER\n");
  REQUIRE(r.references.size() == 1);
  REQUIRE(r.references[0].parsed);
  CHECK(r.references[0].parsed->year == 1970);
}

TEST_CASE("project round trip") {
  Dataset ds = small_world_dataset();
  ds.crs[0].title = "A \"quoted\" title";
  ds.crs[1].doi = "10.1/x";
  ds.crs[2].volume = "7";
  ds.pubs[0].raw_refs = {"A, 1980, SMALL WORLD"};
  delete_crs(ds, std::vector<std::string>{"B"});
  const std::string text = save_project(ds);
  const Dataset back = load_project(text);
  CHECK(back == ds);
  CHECK(save_project(back) == text);
}

TEST_CASE("checked-in small world project matches the fixture") {
  std::ifstream in(CRX_TEST_FIXTURES "/small_world.crx.json", std::ios::binary);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == save_project(small_world_dataset()));
}

TEST_CASE("damaged projects") {
  const std::string text = save_project(small_world_dataset());
  CHECK(code_of([&] { load_project(text.substr(0, text.size() / 2)); }) == ErrorCode::IntegrityError);
  CHECK(code_of([] { load_project(""); }) == ErrorCode::IntegrityError);

  auto tampered = nlohmann::json::parse(text);
  tampered["crs"][0]["n_cr"] = 74;
  CHECK(code_of([&] { load_project(tampered.dump(1)); }) == ErrorCode::IntegrityError);

  auto future = nlohmann::json::parse(text);
  future["meta"]["schema_version"] = 99;
  CHECK(code_of([&] { load_project(future.dump(1)); }) == ErrorCode::VersionError);
}

TEST_CASE("a merged project reloads to the same indicators") {
  Dataset ds = small_world_dataset();
  std::vector<ClusterProposal> proposals{{{"A", "B"}, {}, "A"}};
  merge(ds, proposals);
  const Dataset back = load_project(save_project(ds));
  CHECK(export_table(back, analyze(back)) == export_table(ds, analyze(ds)));
  CHECK(back.history == ds.history);
}

TEST_CASE("export table") {
  const Dataset ds = small_world_dataset();
  const std::string csv = export_table(ds, analyze(ds));
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "CR,RPY,N_CR,N_PYEARS,PERC_PYEAR,N_TOP50,N_TOP25,N_TOP10,SEQUENCE,TYPE");
  // Highest n_cr first within the cohort.
  CHECK(first == "\"C, 1980, SMALL WORLD\",1980,81,5,83.33,2,2,2,++-0--,hot_paper");
  CHECK(csv.find(",4,2,2,--++0-,life_cycle\n") != std::string::npos);
  CHECK(csv.find(",000000,constant_performer\n") != std::string::npos);

  Dataset empty;
  CHECK(export_table(empty, analyze(empty)) == header + "\n");
}

TEST_CASE("parser fuzz does not crash") {
  std::mt19937 rng(5);
  const std::string alphabet = "AZaz09 ,;\"\n\r\t.-()PYCRERUT\xFF\xC3";
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const int n = static_cast<int>(rng() % 200);
    for (int k = 0; k < n; ++k) text.push_back(alphabet[rng() % alphabet.size()]);
    if (i % 3 == 0) text = "PT J\nPY 1999\nCR " + text + "\nER\n";
    for (auto fn : {parse_tagged, parse_refcsv}) {
      try {
        fn(text);
      } catch (const Error&) {
      }
    }
    (void)parse_reference(text);
  }
}
