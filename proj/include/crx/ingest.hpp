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

#ifndef CRX_INGEST_HPP
#define CRX_INGEST_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crx/analysis.hpp"
#include "crx/model.hpp"

namespace crx {

struct ParsedReference {
  std::vector<Author> authors;
  int year = 0;
  std::string source;
  std::optional<std::string> volume;
  std::optional<std::string> page;
  std::optional<std::string> doi;
  std::optional<std::string> title;

  bool operator==(const ParsedReference&) const = default;
};

struct RawReference {
  std::string source_pub_id;
  std::string raw_text;
  std::optional<ParsedReference> parsed;
};

struct ParseReport {
  std::size_t records = 0;
  std::size_t references = 0;
  std::size_t parsed = 0;
  std::vector<std::string> warnings;
};

/// Citing publications plus their references, before aggregation.
struct ParseResult {
  Dataset dataset;  // pubs and citing-year range only
  std::vector<RawReference> references;
  ParseReport report;
};

/// Tagged-field export: 2-letter tags, 3-space continuation lines, records
/// closed by "ER". Throws FormatError when no record delimiter is present.
ParseResult parse_tagged(std::string_view text);

/// CSV with `Year` and `References` columns; references split on "; "
/// outside quotes. Throws FormatError when a required column is missing.
ParseResult parse_refcsv(std::string_view text);

/// One reference string, either `AUTHOR, YEAR, SOURCE[, V<vol>][, P<page>][, DOI <doi>]`
/// (a token in double quotes is taken as the title) or the Scopus layout
/// `Last, I., Title (YEAR) Source, vol, pp. x-y`. Absent when no valid year.
std::optional<ParsedReference> parse_reference(std::string_view text);

/// Years accepted in references: [1000, current year + 1].
bool plausible_year(int year);

struct AggregateResult {
  Dataset dataset;
  std::size_t filtered_out = 0;  // occurrences outside the RPY filter
  std::size_t unparsed = 0;
};

/// Collapses references sharing a case-folded (author, year, source, volume,
/// page) key into one CR each and applies the optional RPY filter. Without a
/// filter the rpy range spans the observed years.
AggregateResult aggregate(const ParseResult& parsed, std::optional<YearRange> rpy_filter = std::nullopt);

/// Drops CRs outside `range` (not recorded in history) and narrows rpy_range.
std::size_t filter_rpy(Dataset& dataset, YearRange range);

inline constexpr int kProjectSchemaVersion = 1;

/// Versioned JSON project document with a checksum over the canonical body.
std::string save_project(const Dataset& dataset);

/// Throws VersionError for an unknown schema, IntegrityError for damaged or
/// inconsistent content.
Dataset load_project(std::string_view text);

/// One row per CR, ordered by rpy asc, n_cr desc, id asc.
std::string export_table(const Dataset& dataset, const Analysis& analysis);

std::string export_header(const AnalysisSettings& settings);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view text);

}  // namespace crx

#endif  // CRX_INGEST_HPP
