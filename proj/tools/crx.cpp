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

// crx: cited-reference analytics from the command line.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crx/pipeline.hpp"
#include "crx/service.hpp"

namespace {

crx::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

struct Options {
  std::vector<std::string> inputs;
  std::string format = "tagged";
  std::string rpy_range;
  std::optional<double> cluster_threshold;
  int year_tolerance = 0;
  std::string weights;
  bool auto_accept = false;
  int npct_range = 0;
  std::vector<double> percentiles{50, 25, 10};
  double z_threshold = 1.0;
  int hot_window = 3;
  int sleep_years = 5;
  int min_seq_len = 5;
  int median_window = 2;
  std::string output;
  std::string save_project;
  std::string proposals_out;
  std::string spectrum;
  std::string report = "text";
};

void add_input_options(CLI::App* app, Options& o) {
  app->add_option("-i,--input", o.inputs, "Input file(s)")->required();
  app->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"tagged", "refcsv", "project"}));
  app->add_option("--rpy-range", o.rpy_range, "Keep CRs with RPY in FROM-TO");
}

void add_cluster_options(CLI::App* app, Options& o) {
  app->add_option("--cluster-threshold", o.cluster_threshold, "Similarity threshold in [0,1]; enables clustering");
  app->add_option("--year-tolerance", o.year_tolerance, "Max RPY difference for matching");
  app->add_option("--weights", o.weights, "Attribute weights title,author,source (default 0.5,0.25,0.25)");
}

void add_report_options(CLI::App* app, Options& o) {
  app->add_option("--report", o.report, "Report format")->check(CLI::IsMember({"json", "text"}));
}

crx::YearRange parse_range(const std::string& text) {
  const auto dash = text.find('-', 1);
  try {
    if (dash == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int first = std::stoi(text.substr(0, dash), &used);
    if (used != dash) throw std::invalid_argument(text);
    const std::string tail = text.substr(dash + 1);
    const int last = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(text);
    return {first, last};
  } catch (const std::logic_error&) {
    throw crx::Error(crx::ErrorCode::ConfigError, "RPY range must look like 1900-2005, got '" + text + "'");
  }
}

crx::PipelineConfig to_config(const Options& o) {
  crx::PipelineConfig cfg;
  cfg.inputs = o.inputs;
  cfg.format = *crx::parse_input_format(o.format);
  if (!o.rpy_range.empty()) cfg.rpy_range = parse_range(o.rpy_range);
  if (o.cluster_threshold) {
    crx::SimilarityConfig sim;
    sim.threshold = *o.cluster_threshold;
    sim.year_tolerance = o.year_tolerance;
    if (!o.weights.empty()) {
      std::vector<double> w;
      std::stringstream in(o.weights);
      for (std::string part; std::getline(in, part, ',');) {
        try {
          w.push_back(std::stod(part));
        } catch (const std::logic_error&) {
          throw crx::Error(crx::ErrorCode::ConfigError, "weights must be numbers, got '" + o.weights + "'");
        }
      }
      if (w.size() != 3) throw crx::Error(crx::ErrorCode::ConfigError, "--weights expects t,a,s");
      sim.title_weight = w[0];
      sim.author_weight = w[1];
      sim.source_weight = w[2];
    }
    cfg.clustering = sim;
  }
  cfg.auto_accept = o.auto_accept;
  cfg.analysis.npct.range = o.npct_range;
  cfg.analysis.npct.top_fractions.clear();
  for (double p : o.percentiles) cfg.analysis.npct.top_fractions.push_back(p / 100.0);
  cfg.analysis.z_threshold = o.z_threshold;
  cfg.analysis.classifier = {o.hot_window, o.sleep_years, o.min_seq_len};
  cfg.analysis.median_half_window = o.median_window;
  if (!o.output.empty()) cfg.output_csv = o.output;
  if (!o.save_project.empty()) cfg.output_project = o.save_project;
  if (!o.proposals_out.empty()) cfg.proposals_out = o.proposals_out;
  if (!o.spectrum.empty()) cfg.spectrum_csv = o.spectrum;
  return cfg;
}

int finish(const crx::PipelineReport& report, const Options& o, bool csv_to_stdout) {
  if (csv_to_stdout && report.exit_status == crx::kExitOk && !report.stopped_for_review) std::cout << report.csv;
  (o.report == "json" ? std::cerr << crx::report_json(report) : std::cerr << crx::report_text(report));
  return report.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cited-reference analytics: RPYS spectra, longevity indicators, citation-dynamics typing"};
  app.set_version_flag("--version", std::string("crx ") + CRX_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Run ingest, clustering, indicators, CFA and export");
  add_input_options(analyze, o);
  add_cluster_options(analyze, o);
  analyze->add_flag("--auto-accept", o.auto_accept, "Merge every cluster proposal without review");
  analyze->add_option("--npct-range", o.npct_range, "Citing years pooled on each side for thresholds");
  analyze->add_option("--percentiles", o.percentiles, "Top classes in percent")->delimiter(',');
  analyze->add_option("--z-threshold", o.z_threshold, "|z| cutoff for +/- symbols");
  analyze->add_option("--hot-window", o.hot_window, "Early years for the hot-paper rule");
  analyze->add_option("--sleep-years", o.sleep_years, "Sleeping period for the sleeping-beauty rule");
  analyze->add_option("--min-seq-len", o.min_seq_len, "Shorter sequences stay unclassified");
  analyze->add_option("--median-window", o.median_window, "Half-width of the spectrogram median window");
  analyze->add_option("-o,--output", o.output, "Indicator CSV (stdout when omitted)");
  analyze->add_option("--save-project", o.save_project, "Write the resulting project file");
  analyze->add_option("--proposals-out", o.proposals_out, "Where proposals go when review is required");
  analyze->add_option("--spectrum", o.spectrum, "Write the RPY spectrogram CSV");
  add_report_options(analyze, o);

  auto* propose = app.add_subcommand("propose-clusters", "Write cluster proposals for offline review");
  add_input_options(propose, o);
  add_cluster_options(propose, o);
  propose->add_option("-o,--output", o.output, "Proposals CSV (stdout when omitted)");
  add_report_options(propose, o);

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Start the curation HTTP service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("-i,--input", o.inputs, "Preload a session from this file");
  serve->add_option("--format", o.format, "Format of the preloaded file")
      ->check(CLI::IsMember({"tagged", "refcsv", "project"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : crx::kExitConfig;
  }

  try {
    if (*analyze) return finish(crx::run(to_config(o)), o, o.output.empty());
    if (*propose) {
      if (!o.cluster_threshold) o.cluster_threshold = 0.75;
      return finish(crx::propose_clusters(to_config(o)), o, o.output.empty());
    }

    crx::CurationService service;
    for (const auto& path : o.inputs) {
      const std::string id = service.create_session(crx::read_file(path), *crx::parse_input_format(o.format));
      std::cerr << "session " << id << " loaded from " << path << "\n";
    }
    crx::HttpServer server(service);
    const int bound = server.bind(host, port);
    if (bound < 0) {
      std::cerr << "cannot bind " << host << ":" << port << "\n";
      return crx::kExitIo;
    }
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cerr << "listening on http://" << host << ":" << bound << "\n";
    server.listen_after_bind();
    g_server = nullptr;
    return crx::kExitOk;
  } catch (const crx::Error& e) {
    std::cerr << "error [" << crx::to_string(e.code()) << "]: " << e.what() << "\n";
    return crx::exit_code_for(e.code());
  }
}
