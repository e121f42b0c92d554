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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Usage: crx_acceptance <path-to-crx-executable> <fixtures-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "crx/analysis.hpp"
#include "crx/cfa.hpp"
#include "crx/dedup.hpp"
#include "crx/indicators.hpp"
#include "crx/ingest.hpp"
#include "crx/pipeline.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace crx;
using namespace crx::testing;

namespace {

constexpr double kExpectedTolerance = 0.005;
constexpr double kZTolerance = 0.01;
constexpr double kRelativeTolerance = 1e-9;
constexpr double kFixtureSeconds = 1.0;
constexpr double kOracleSeconds = 10.0;
constexpr int kOracleMatrices = 1000;
constexpr int kCfaMatrices = 1000;
constexpr int kShuffles = 100;
constexpr int kRoundTrips = 200;
constexpr int kFuzzInputs = 10000;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    else if (detail.size() < 400) detail += "; " + why;
    pass = false;
  }
};

int failures = 0;

void criterion(const std::string& name, double time_limit, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.fail(std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0 && seconds >= time_limit) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "took %.3f s, limit %.1f s", seconds, time_limit);
    out.fail(buf);
  }
  if (!out.pass) ++failures;
  std::printf("%s  %-26s %.3fs  %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), seconds, out.detail.c_str());
  std::fflush(stdout);
}

bool close_relative(double a, double b) {
  return std::abs(a - b) <= kRelativeTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string cell_name(int i, int j) {
  return std::string(1, static_cast<char>('A' + i)) + "/" + std::to_string(kCohortYear + j);
}

void threshold_fixture(Outcome& out) {
  const CountMatrix m = small_world_matrix();
  const std::array<double, 3> tops{0.5, 0.25, 0.10};
  for (std::size_t k = 0; k < tops.size(); ++k) {
    const auto limits = column_thresholds(m, tops[k], 0);
    const Eigen::MatrixXi above = above_threshold(m, limits);
    for (int j = 0; j < 6; ++j) {
      if (limits(j) != kReferenceLimits[k][static_cast<std::size_t>(j)]) out.fail("limit " + std::to_string(k) + "/" + std::to_string(j));
      for (int i = 0; i < 4; ++i) {
        if (above(i, j) != kReferenceAbove[k][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
          out.fail("cell " + cell_name(i, j));
        }
      }
    }
  }
  const Dataset ds = small_world_dataset();
  const Analysis a = analyze(ds);
  for (std::size_t i = 0; i < 4; ++i) {
    const IndicatorSet& ind = a.crs[i].indicators;
    if (ind.n_top != std::vector<int>{kNTop50[i], kNTop25[i], kNTop10[i]}) out.fail("N_TOP of " + ds.crs[i].id);
    if (ind.n_pyears != kNPYears[i]) out.fail("N_PYEARS of " + ds.crs[i].id);
  }
  if (out.pass) out.detail = "18 limits, 72 cells, N_TOP and N_PYEARS exact";
}

void cfa_fixture(Outcome& out) {
  const CfaResult r = cfa(small_world_matrix());
  int expected_ok = 0, z_ok = 0;
  double worst_z = 0;
  std::string misses;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double reference_e = kReferenceExpected[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double reference_z = kReferenceZ[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (std::abs(r.expected(i, j) - reference_e) <= kExpectedTolerance) {
        ++expected_ok;
      } else {
        char buf[96];
        std::snprintf(buf, sizeof buf, " %s reference %.2f computed %.4f;", cell_name(i, j).c_str(), reference_e,
                      r.expected(i, j));
        misses += buf;
      }
      worst_z = std::max(worst_z, std::abs(r.z(i, j) - reference_z));
      if (std::abs(r.z(i, j) - reference_z) <= kZTolerance) ++z_ok;
    }
  }
  const CohortCfa cohort = analyze_cohort(build_matrix(small_world_dataset(), kCohortYear));
  int seq_ok = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i < cohort.sequences.size() && cohort.sequences[i].symbols == kReferenceSequences[i]) ++seq_ok;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "expected %d/24 within %.3f, z %d/24 within %.2f (max dev %.4f), sequences %d/4",
                expected_ok, kExpectedTolerance, z_ok, kZTolerance, worst_z, seq_ok);
  out.detail = buf;
  if (expected_ok != 24) out.pass = false, out.detail += ";" + misses;
  if (z_ok != 24 || seq_ok != 4) out.pass = false;
}

void percentile_oracle(Outcome& out) {
  std::mt19937 rng(20240601);
  int mismatches = 0;
  for (int trial = 0; trial < kOracleMatrices; ++trial) {
    const CountMatrix m = random_cohort(rng, 6, 8, 30);
    for (int range : {0, 1, 2}) {
      NpctConfig cfg;
      cfg.range = range;
      if (n_top(m, cfg) != brute_force_n_top(m, cfg)) ++mismatches;
    }
  }
  out.detail = std::to_string(kOracleMatrices) + " matrices x R in {0,1,2}, " + std::to_string(mismatches) +
               " mismatches";
  if (mismatches) out.pass = false;
}

void cfa_properties(Outcome& out) {
  std::mt19937 rng(77);
  int bad_margins = 0, bad_chi = 0;
  for (int trial = 0; trial < kCfaMatrices; ++trial) {
    const CountMatrix m = random_positive_margins(rng, 8, 10, 40);
    const CfaResult r = cfa(m);
    const Eigen::MatrixXd o = m.cast<double>();
    const Eigen::VectorXd rows = o.rowwise().sum();
    const Eigen::RowVectorXd cols = o.colwise().sum();
    for (Eigen::Index i = 0; i < rows.size(); ++i) bad_margins += !close_relative(r.expected.row(i).sum(), rows(i));
    for (Eigen::Index j = 0; j < cols.size(); ++j) bad_margins += !close_relative(r.expected.col(j).sum(), cols(j));
    double pearson = 0;
    for (Eigen::Index i = 0; i < o.rows(); ++i)
      for (Eigen::Index j = 0; j < o.cols(); ++j) {
        const double d = o(i, j) - r.expected(i, j);
        pearson += d * d / r.expected(i, j);
      }
    if (!close_relative(pearson, r.chi_square) || !close_relative(r.z.squaredNorm(), r.chi_square)) ++bad_chi;
  }
  int nonzero_z = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = 1 + static_cast<Eigen::Index>(rng() % 8), cols = 1 + static_cast<Eigen::Index>(rng() % 10);
    const CountMatrix flat = CountMatrix::Constant(rows, cols, 1 + static_cast<Count>(rng() % 40));
    if (cfa(flat).z.cwiseAbs().maxCoeff() != 0.0) ++nonzero_z;
  }
  out.detail = std::to_string(kCfaMatrices) + " matrices: " + std::to_string(bad_margins) + " marginal misses, " +
               std::to_string(bad_chi) + " chi-square misses; " + std::to_string(nonzero_z) +
               " all-equal tables with z != 0";
  if (bad_margins || bad_chi || nonzero_z) out.pass = false;
}

Dataset variant_dataset(std::mt19937& rng) {
  static const std::vector<std::string> names{"LOTKA", "PRICE", "MERTON", "GARFIELD", "BRADFORD", "ZIPF"};
  static const std::vector<std::string> sources{"J WASHINGTON ACAD SCI", "SCIENCE", "SOC SCI INFORM",
                                                "CURRENT CONTENTS", "ENGINEERING", "HUMAN BEHAV"};
  Dataset ds;
  ds.citing_years = {2000, 2005};
  ds.rpy_range = {1920, 1930};
  int serial = 0;
  for (std::size_t w = 0; w < names.size(); ++w) {
    const int rpy = 1920 + static_cast<int>(rng() % 3);
    const int variants = 1 + static_cast<int>(rng() % 5);
    for (int v = 0; v < variants; ++v) {
      std::string author = names[w], source = sources[w];
      if (rng() % 3 == 0 && author.size() > 4) author.erase(rng() % author.size(), 1);
      if (rng() % 3 == 0) source.erase(source.size() - 1 - rng() % 3);
      std::map<int, Count> per_year;
      for (int y = 2000; y <= 2005; ++y)
        if (rng() % 2) per_year[y] = 1 + static_cast<Count>(rng() % 6);
      if (per_year.empty()) per_year[2000] = 1;
      char id[16];
      std::snprintf(id, sizeof id, "CR%04d", serial++);
      ds.crs.push_back(make_cr(id, author, rpy, source, per_year));
    }
  }
  return ds;
}

void dedup_properties(Outcome& out) {
  std::mt19937 rng(4242);
  int order_dependent = 0, mass_changed = 0, undo_mismatch = 0, clusters = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Dataset ds = variant_dataset(rng);
    SimilarityConfig cfg;
    cfg.threshold = 0.7 + 0.05 * static_cast<double>(rng() % 5);
    cfg.year_tolerance = static_cast<int>(rng() % 2);
    auto pairs = match_pairs(ds, cfg);
    const auto reference = cluster(pairs, ds);
    clusters += static_cast<int>(reference.size());
    for (int s = 0; s < kShuffles; ++s) {
      std::shuffle(pairs.begin(), pairs.end(), rng);
      if (cluster(pairs, ds) != reference) {
        ++order_dependent;
        break;
      }
    }
    const std::string saved = save_project(ds);
    Dataset merged = load_project(saved);
    merge(merged, reference);
    if (merged.citation_mass() != ds.citation_mass()) ++mass_changed;
    undo(merged);
    if (save_project(merged) != saved) ++undo_mismatch;
  }
  out.detail = "50 variant sets, " + std::to_string(clusters) + " clusters: " + std::to_string(order_dependent) +
               " order-dependent, " + std::to_string(mass_changed) + " mass changes, " +
               std::to_string(undo_mismatch) + " undo mismatches";
  if (order_dependent || mass_changed || undo_mismatch || clusters == 0) out.pass = false;
}

void classifier(Outcome& out) {
  if (classify("+++---").type != CitationType::HotPaper) out.fail("+++--- is not hot_paper");
  if (classify("---0000---++").type != CitationType::SleepingBeauty) out.fail("---0000---++ is not sleeping_beauty");
  const std::string alphabet = "+0-";
  std::map<CitationType, int> tally;
  int unstable = 0;
  for (int code = 0; code < 729; ++code) {
    std::string s;
    for (int k = 0, c = code; k < 6; ++k, c /= 3) s.push_back(alphabet[static_cast<std::size_t>(c % 3)]);
    const TypeLabel first = classify(s);
    if (!(classify(s) == first)) ++unstable;
    ++tally[first.type];
  }
  int total = 0;
  for (const auto& [type, n] : tally) total += n;
  out.detail = "fixtures checked; 3^6 sequences -> " + std::to_string(total) + " labels, " +
               std::to_string(unstable) + " unstable";
  if (total != 729 || unstable) out.pass = false;
}

Dataset random_dataset(std::mt19937& rng) {
  Dataset ds;
  const int first = 1990 + static_cast<int>(rng() % 5);
  const int last = first + static_cast<int>(rng() % 6);
  ds.citing_years = {first, last};
  for (int y = first; y <= last; ++y) {
    CitingPublication pub{"P" + std::to_string(y) + "-" + std::to_string(rng() % 1000), y, {}};
    if (rng() % 2) pub.raw_refs.push_back("X " + std::to_string(rng()) + ", \"quoted\", \xC3\xA9");
    ds.pubs.push_back(pub);
  }
  ds.rpy_range = {1950, 1990};
  const int n = static_cast<int>(rng() % 15);
  for (int k = 0; k < n; ++k) {
    std::map<int, Count> per_year;
    for (int y = first; y <= last; ++y)
      if (rng() % 2) per_year[y] = static_cast<Count>(rng() % 50);
    std::erase_if(per_year, [](const auto& kv) { return kv.second == 0; });
    char id[16];
    std::snprintf(id, sizeof id, "CR%05d", k);
    CitedReference cr = make_cr(id, "AUTHOR" + std::to_string(rng() % 4), 1950 + static_cast<int>(rng() % 41),
                                "SOURCE " + std::to_string(rng() % 4), per_year);
    cr.authors.push_back({"SECOND", "AB"});
    if (rng() % 2) cr.title = "Title, \"with\" quotes; and\nnewline";
    if (rng() % 2) cr.volume = std::to_string(rng() % 100);
    if (rng() % 2) cr.page = "P" + std::to_string(rng() % 900);
    if (rng() % 3 == 0) cr.doi = "10.1000/" + std::to_string(rng());
    ds.crs.push_back(cr);
  }
  if (ds.crs.size() >= 3 && rng() % 2) {
    ClusterProposal p{{ds.crs[0].id, ds.crs[1].id}, {}, ds.crs[0].id};
    merge(ds, std::span(&p, 1));
  }
  if (ds.crs.size() >= 2 && rng() % 2) delete_crs(ds, std::vector<std::string>{ds.crs.back().id});
  return ds;
}

std::string mutate_bytes(std::string text, std::mt19937& rng) {
  const int edits = 1 + static_cast<int>(rng() % 8);
  for (int e = 0; e < edits && !text.empty(); ++e) {
    const std::size_t at = rng() % text.size();
    switch (rng() % 5) {
      case 0: text[at] = static_cast<char>(rng() % 256); break;
      case 1: text.erase(at, 1 + rng() % 16); break;
      case 2: text.insert(at, std::string(1 + rng() % 4, "\n\r\t ;,\"ER\xFF"[rng() % 10])); break;
      case 3: text.insert(at, text.substr(rng() % text.size(), rng() % 64)); break;
      default: text.resize(at); break;
    }
  }
  return text;
}

void round_trip(Outcome& out) {
  std::mt19937 rng(99);
  int mismatches = 0;
  for (int k = 0; k < kRoundTrips; ++k) {
    const Dataset ds = random_dataset(rng);
    const std::string text = save_project(ds);
    const Dataset back = load_project(text);
    if (!(back == ds) || save_project(back) != text) ++mismatches;
  }

  const std::vector<std::pair<InputFormat, std::string>> seeds{
      {InputFormat::Tagged,
       "FN x\nPT J\nAU A\nCR LOTKA AJ, 1926, J WASHINGTON ACAD SCI, V16, P317\n"
       "   PRICE DJD, 1965, SCIENCE, V149, P510, DOI 10.1126/science.149.3683.510\nPY 1980\nUT W1\nER\nEF\n"},
      {InputFormat::RefCsv,
       "Authors,Year,References,EID\nA,1980,\"LOTKA AJ, 1926, J WASH ACAD SCI, V16; Lotka, A.J., Title (1926) "
       "J Wash, 16, pp. 317-323\",e1\n"},
      {InputFormat::Project, save_project(small_world_dataset())},
  };
  int crashes = 0, rejected = 0;
  for (int k = 0; k < kFuzzInputs; ++k) {
    const auto& [format, seed] = seeds[static_cast<std::size_t>(k) % seeds.size()];
    const std::string input = mutate_bytes(seed, rng);
    for (InputFormat f : {format, InputFormat::Tagged, InputFormat::RefCsv}) {
      try {
        const IngestOutcome in = ingest_text(input, f);
        (void)analyze(in.dataset);
      } catch (const Error&) {
        ++rejected;
      } catch (const std::exception& e) {
        if (crashes++ == 0) out.fail(std::string("unexpected exception: ") + e.what());
      }
    }
  }
  out.detail = std::to_string(kRoundTrips) + " round trips, " + std::to_string(mismatches) + " mismatches; " +
               std::to_string(kFuzzInputs) + " fuzz inputs, " + std::to_string(rejected) + " cleanly rejected, " +
               std::to_string(crashes) + " crashes";
  if (mismatches || crashes) out.pass = false;
}

void cli_determinism(Outcome& out, const std::string& exe, const std::string& fixtures) {
  const auto dir = std::filesystem::temp_directory_path() / "crx_acceptance";
  std::filesystem::create_directories(dir);
  std::vector<std::string> csvs;
  for (int run = 0; run < 2; ++run) {
    const auto csv = dir / ("run" + std::to_string(run) + ".csv");
    std::filesystem::remove(csv);
    const std::string cmd = "\"" + exe + "\" analyze -i \"" + fixtures + "/small_world.crx.json\" --format project -o \"" +
                            csv.string() + "\" --report text 2>/dev/null";
    const int status = std::system(cmd.c_str());
    if (status != 0) out.fail("exit status " + std::to_string(status));
    csvs.push_back(std::filesystem::exists(csv) ? read_file(csv.string()) : std::string());
  }
  if (csvs[0].empty()) out.fail("no CSV written");
  if (csvs[0] != csvs[1]) out.fail("CSV differs between runs");
  if (out.pass) out.detail = "two runs, " + std::to_string(csvs[0].size()) + " identical bytes";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <crx-executable> <fixtures-dir>\n", argv[0]);
    return 2;
  }
  const std::string exe = argv[1], fixtures = argv[2];
  criterion("threshold-fixture", kFixtureSeconds, threshold_fixture);
  criterion("cfa-fixture", kFixtureSeconds, cfa_fixture);
  criterion("percentile-oracle", kOracleSeconds, percentile_oracle);
  criterion("cfa-properties", 0, cfa_properties);
  criterion("dedup-properties", 0, dedup_properties);
  criterion("classifier", 0, classifier);
  criterion("round-trip-and-fuzz", 0, round_trip);
  criterion("cli-determinism", 0, [&](Outcome& out) { cli_determinism(out, exe, fixtures); });
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
