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

#ifndef CRX_ANALYSIS_HPP
#define CRX_ANALYSIS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crx/cfa.hpp"
#include "crx/indicators.hpp"
#include "crx/model.hpp"
#include "crx/spectroscopy.hpp"

namespace crx {

struct AnalysisSettings {
  NpctConfig npct;
  double z_threshold = 1.0;
  ClassifierParams classifier;
  int median_half_window = 2;

  void validate() const;
};

struct CrResult {
  std::string id;
  IndicatorSet indicators;
  std::optional<Sequence> sequence;  // absent for CRs without citations
  TypeLabel type;
};

/// Everything derived from a dataset: indicators, CFA per cohort, spectrum.
struct Analysis {
  AnalysisSettings settings;
  std::vector<CrResult> crs;  // aligned with Dataset::crs
  std::map<int, CohortCfa> cohorts;
  std::vector<SpectrumPoint> spectrum;
  std::vector<std::string> warnings;

  const CrResult* find(const std::string& id) const;
};

Analysis analyze(const Dataset& dataset, const AnalysisSettings& settings = {});

/// "N_TOP50" for 0.50, "N_TOP2.5" for 0.025.
std::string top_column_name(double fraction);

}  // namespace crx

#endif  // CRX_ANALYSIS_HPP
