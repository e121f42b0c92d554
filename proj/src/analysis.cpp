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

#include "crx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "crx/error.hpp"

namespace crx {

void AnalysisSettings::validate() const {
  npct.validate();
  classifier.validate();
  if (!(z_threshold > 0.0)) throw Error(ErrorCode::ConfigError, "z threshold must be positive");
  if (median_half_window < 1) throw Error(ErrorCode::ConfigError, "median half-window must be >= 1");
}

const CrResult* Analysis::find(const std::string& id) const {
  auto it = std::lower_bound(crs.begin(), crs.end(), id,
                             [](const CrResult& r, const std::string& key) { return r.id < key; });
  return it != crs.end() && it->id == id ? &*it : nullptr;
}

std::string top_column_name(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::round(fraction * 100.0 * 1e6) / 1e6);
  return std::string("N_TOP") + buf;
}

Analysis analyze(const Dataset& dataset, const AnalysisSettings& settings) {
  settings.validate();
  Analysis out;
  out.settings = settings;
  out.crs.resize(dataset.crs.size());
  for (std::size_t k = 0; k < dataset.crs.size(); ++k) {
    out.crs[k].id = dataset.crs[k].id;
    out.crs[k].type.params = settings.classifier;
    out.crs[k].indicators.n_top.assign(settings.npct.top_fractions.size(), 0);
  }

  for (int rpy : dataset.cohort_years()) {
    const CitationMatrix cohort = build_matrix(dataset, rpy);
    if (cohort.early_citations > 0) {
      out.warnings.push_back("RPY " + std::to_string(rpy) + ": " + std::to_string(cohort.early_citations) +
                             " citation(s) dated before publication counted in the first citing year");
    }
    const auto indicators = cohort_indicators(cohort, settings.npct);
    for (std::size_t i = 0; i < cohort.cr_ids.size(); ++i) {
      const auto pos = static_cast<std::size_t>(dataset.find(cohort.cr_ids[i]) - dataset.crs.data());
      out.crs[pos].indicators = indicators[i];
    }

    CohortCfa cfa = analyze_cohort(cohort, settings.z_threshold);
    if (!cfa.dropped_cr_ids.empty()) {
      out.warnings.push_back("RPY " + std::to_string(rpy) + ": " + std::to_string(cfa.dropped_cr_ids.size()) +
                             " CR(s) without citations excluded from CFA");
    }
    if (cfa.result && !cfa.result->low_expected_cells.empty()) {
      out.warnings.push_back("RPY " + std::to_string(rpy) + ": " +
                             std::to_string(cfa.result->low_expected_cells.size()) + " cell(s) with expected count < 5");
    }
    for (const auto& seq : cfa.sequences) {
      const auto pos = static_cast<std::size_t>(dataset.find(seq.cr_id) - dataset.crs.data());
      out.crs[pos].sequence = seq;
      out.crs[pos].type = classify(seq.symbols, settings.classifier);
    }
    out.cohorts.emplace(rpy, std::move(cfa));
  }

  out.spectrum = median_deviation(year_counts(dataset), settings.median_half_window);
  return out;
}

}  // namespace crx
