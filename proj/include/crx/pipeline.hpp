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

#ifndef CRX_PIPELINE_HPP
#define CRX_PIPELINE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crx/analysis.hpp"
#include "crx/dedup.hpp"
#include "crx/error.hpp"
#include "crx/ingest.hpp"
#include "crx/model.hpp"

namespace crx {

enum class InputFormat { Tagged, RefCsv, Project };

std::optional<InputFormat> parse_input_format(std::string_view name);
std::string_view to_string(InputFormat format);

/// Parses and aggregates one export (or loads a project) into a Dataset.
/// The RPY filter, when given, is applied after aggregation.
struct IngestOutcome {
  Dataset dataset;
  ParseReport parse;
  std::size_t crs_before_filter = 0;
  Count mass_before_filter = 0;
  std::size_t filtered_crs = 0;
};
IngestOutcome ingest_text(std::string_view text, InputFormat format, std::optional<YearRange> rpy_filter = {});

struct PipelineConfig {
  std::vector<std::string> inputs;
  InputFormat format = InputFormat::Tagged;
  std::optional<YearRange> rpy_range;
  /// Clustering runs only when set.
  std::optional<SimilarityConfig> clustering;
  bool auto_accept = false;
  AnalysisSettings analysis;
  std::optional<std::string> output_csv;
  std::optional<std::string> output_project;
  std::optional<std::string> proposals_out;
  std::optional<std::string> spectrum_csv;

  /// Throws ConfigError.
  void validate() const;
};

struct StageReport {
  std::string stage;
  std::size_t crs = 0;
  Count citation_mass = 0;
  std::string note;
};

struct PipelineReport {
  std::vector<StageReport> stages;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
  std::size_t proposals = 0;
  std::size_t merges = 0;
  bool stopped_for_review = false;
  int exit_status = 0;
  std::optional<ErrorCode> error;
  std::string error_stage;
  std::string error_message;
  /// Export CSV text; kept for callers that want it without a file.
  std::string csv;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFormat = 3;
inline constexpr int kExitIo = 4;

int exit_code_for(ErrorCode code);

/// ingest -> filter -> cluster -> merge -> indicators -> cfa -> export.
/// Never throws; failures land in the report with the failing stage.
PipelineReport run(const PipelineConfig& config);

/// ingest -> filter -> cluster, writing the proposals CSV to proposals_out
/// (or output_csv).
PipelineReport propose_clusters(const PipelineConfig& config);

std::string report_json(const PipelineReport& report);
std::string report_text(const PipelineReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace crx

#endif  // CRX_PIPELINE_HPP
