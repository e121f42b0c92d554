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

#include "crx/pipeline.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace crx {

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "tagged") return InputFormat::Tagged;
  if (name == "refcsv") return InputFormat::RefCsv;
  if (name == "project") return InputFormat::Project;
  return std::nullopt;
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::Tagged: return "tagged";
    case InputFormat::RefCsv: return "refcsv";
    case InputFormat::Project: return "project";
  }
  return "tagged";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::BadQuery: return kExitConfig;
    case ErrorCode::IoError: return kExitIo;
    default: return kExitFormat;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
}

namespace {

ParseResult parse_any(std::string_view text, InputFormat format) {
  return format == InputFormat::RefCsv ? parse_refcsv(text) : parse_tagged(text);
}

void append(ParseResult& into, ParseResult part, const std::string& prefix) {
  for (auto& pub : part.dataset.pubs) {
    pub.id = prefix + pub.id;
    into.dataset.pubs.push_back(std::move(pub));
  }
  for (auto& ref : part.references) {
    ref.source_pub_id = prefix + ref.source_pub_id;
    into.references.push_back(std::move(ref));
  }
  into.report.records += part.report.records;
  into.report.references += part.report.references;
  into.report.parsed += part.report.parsed;
  for (auto& w : part.report.warnings) into.report.warnings.push_back(prefix + w);
}

IngestOutcome finish_ingest(ParseResult parsed, std::optional<YearRange> rpy_filter) {
  parsed.dataset.citing_years = citing_year_span(parsed.dataset.pubs);
  IngestOutcome out;
  AggregateResult agg = aggregate(parsed);
  out.dataset = std::move(agg.dataset);
  out.parse = std::move(parsed.report);
  out.crs_before_filter = out.dataset.crs.size();
  out.mass_before_filter = out.dataset.citation_mass();
  if (rpy_filter) out.filtered_crs = filter_rpy(out.dataset, *rpy_filter);
  return out;
}

IngestOutcome ingest_many(const std::vector<std::string>& texts, InputFormat format,
                          std::optional<YearRange> rpy_filter) {
  if (format == InputFormat::Project) {
    if (texts.size() != 1) throw Error(ErrorCode::ConfigError, "exactly one project file can be loaded");
    return ingest_text(texts[0], format, rpy_filter);
  }
  if (texts.size() == 1) return ingest_text(texts[0], format, rpy_filter);
  ParseResult combined;
  for (std::size_t k = 0; k < texts.size(); ++k) {
    append(combined, parse_any(texts[k], format), "F" + std::to_string(k + 1) + ":");
  }
  return finish_ingest(std::move(combined), rpy_filter);
}

}  // namespace

IngestOutcome ingest_text(std::string_view text, InputFormat format, std::optional<YearRange> rpy_filter) {
  if (format == InputFormat::Project) {
    IngestOutcome out;
    out.dataset = load_project(text);
    out.crs_before_filter = out.dataset.crs.size();
    out.mass_before_filter = out.dataset.citation_mass();
    if (rpy_filter) out.filtered_crs = filter_rpy(out.dataset, *rpy_filter);
    return out;
  }
  return finish_ingest(parse_any(text, format), rpy_filter);
}

void PipelineConfig::validate() const {
  if (inputs.empty()) throw Error(ErrorCode::ConfigError, "no input file given");
  if (rpy_range && rpy_range->empty()) throw Error(ErrorCode::ConfigError, "RPY range is not well-ordered");
  if (clustering) clustering->validate();
  analysis.validate();
}

namespace {

struct Pipeline {
  const PipelineConfig& config;
  PipelineReport report;
  std::string stage = "config";

  void record(const Dataset& ds, std::string name, std::string note = {}) {
    report.stages.push_back({std::move(name), ds.crs.size(), ds.citation_mass(), std::move(note)});
  }

  Dataset ingest() {
    stage = "ingest";
    std::vector<std::string> texts;
    for (const auto& path : config.inputs) texts.push_back(read_file(path));
    IngestOutcome in = ingest_many(texts, config.format, std::nullopt);
    report.warnings = in.parse.warnings;
    report.stages.push_back({"ingest", in.crs_before_filter, in.mass_before_filter,
                             std::to_string(in.parse.records) + " records, " + std::to_string(in.parse.parsed) + "/" +
                                 std::to_string(in.parse.references) + " references parsed"});
    stage = "filter";
    if (config.rpy_range) {
      const auto removed = filter_rpy(in.dataset, *config.rpy_range);
      record(in.dataset, "filter",
             std::to_string(removed) + " CRs outside " + std::to_string(config.rpy_range->first) + "-" +
                 std::to_string(config.rpy_range->last));
    } else {
      record(in.dataset, "filter", "no RPY filter");
    }
    return std::move(in.dataset);
  }

  std::vector<ClusterProposal> propose(const Dataset& ds) {
    stage = "cluster";
    const auto pairs = match_pairs(ds, *config.clustering);
    auto proposals = cluster(pairs, ds);
    report.proposals = proposals.size();
    record(ds, "cluster", std::to_string(pairs.size()) + " matching pairs, " + std::to_string(proposals.size()) +
                              " proposals");
    return proposals;
  }

  void write(const std::optional<std::string>& path, std::string_view content) {
    if (!path) return;
    write_file(*path, content);
    report.outputs.push_back(*path);
  }

  void fail(const Error& e) {
    report.error = e.code();
    report.error_stage = stage;
    report.error_message = e.what();
    report.exit_status = exit_code_for(e.code());
  }
};

}  // namespace

PipelineReport run(const PipelineConfig& config) {
  Pipeline p{config, {}};
  try {
    config.validate();
    Dataset ds = p.ingest();
    if (config.clustering) {
      auto proposals = p.propose(ds);
      p.stage = "merge";
      if (!proposals.empty() && !config.auto_accept) {
        p.stage = "review";
        p.write(config.proposals_out ? config.proposals_out
                                     : std::optional<std::string>((config.output_csv ? *config.output_csv : std::string("crx")) +
                                                                  ".proposals.csv"),
                proposals_csv(ds, proposals));
        p.report.stopped_for_review = true;
        return p.report;
      }
      merge(ds, proposals);
      p.report.merges = proposals.size();
      p.record(ds, "merge", std::to_string(proposals.size()) + " clusters merged");
    }
    p.stage = "indicators";
    const Analysis analysis = analyze(ds, config.analysis);
    p.record(ds, "indicators");
    p.stage = "cfa";
    p.record(ds, "cfa", std::to_string(analysis.cohorts.size()) + " cohort(s)");
    p.report.warnings.insert(p.report.warnings.end(), analysis.warnings.begin(), analysis.warnings.end());
    p.stage = "export";
    p.report.csv = export_table(ds, analysis);
    p.write(config.output_csv, p.report.csv);
    p.write(config.spectrum_csv, spectrum_csv(analysis.spectrum));
    if (config.output_project) p.write(config.output_project, save_project(ds));
    p.record(ds, "export");
  } catch (const Error& e) {
    p.fail(e);
  }
  return p.report;
}

PipelineReport propose_clusters(const PipelineConfig& config) {
  Pipeline p{config, {}};
  try {
    config.validate();
    if (!config.clustering) throw Error(ErrorCode::ConfigError, "clustering settings are required");
    Dataset ds = p.ingest();
    auto proposals = p.propose(ds);
    p.stage = "export";
    p.report.csv = proposals_csv(ds, proposals);
    p.write(config.proposals_out ? config.proposals_out : config.output_csv, p.report.csv);
  } catch (const Error& e) {
    p.fail(e);
  }
  return p.report;
}

std::string report_json(const PipelineReport& report) {
  nlohmann::ordered_json j;
  j["exit_status"] = report.exit_status;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : report.stages) {
    stages.push_back({{"stage", s.stage}, {"crs", s.crs}, {"citation_mass", s.citation_mass}, {"note", s.note}});
  }
  j["stages"] = stages;
  j["proposals"] = report.proposals;
  j["merges"] = report.merges;
  j["stopped_for_review"] = report.stopped_for_review;
  j["outputs"] = report.outputs;
  j["warnings"] = report.warnings;
  if (report.error) {
    j["error"] = {{"code", std::string(to_string(*report.error))},
                  {"stage", report.error_stage},
                  {"message", report.error_message}};
  }
  return j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

std::string report_text(const PipelineReport& report) {
  std::ostringstream out;
  for (const auto& s : report.stages) {
    out << s.stage << ": " << s.crs << " CRs, " << s.citation_mass << " citations";
    if (!s.note.empty()) out << " (" << s.note << ")";
    out << "\n";
  }
  if (report.stopped_for_review) out << "stopped: " << report.proposals << " proposals written for review\n";
  for (const auto& path : report.outputs) out << "wrote " << path << "\n";
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  if (report.error) {
    out << "error [" << to_string(*report.error) << "] in stage " << report.error_stage << ": "
        << report.error_message << "\n";
  }
  return out.str();
}

}  // namespace crx
