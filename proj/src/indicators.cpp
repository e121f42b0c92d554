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

#include "crx/indicators.hpp"

#include <string>

namespace crx {

void NpctConfig::validate() const {
  if (range < 0) throw Error(ErrorCode::ConfigError, "NPCT range must be >= 0");
  if (top_fractions.empty()) throw Error(ErrorCode::ConfigError, "at least one top fraction is required");
  for (double f : top_fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw Error(ErrorCode::ConfigError, "top fraction " + std::to_string(f) + " outside (0,1)");
    }
  }
}

int n_pyears(const CitedReference& cr) {
  return static_cast<int>(std::count_if(cr.per_year.begin(), cr.per_year.end(),
                                        [](const auto& entry) { return entry.second > 0; }));
}

double perc_pyear(int n_pyears, const CitationMatrix& cohort) {
  const auto cited_years = (cohort.col_totals.array() > 0).count();
  if (cited_years == 0) {
    throw Error(ErrorCode::EmptyCohort, "cohort " + std::to_string(cohort.rpy) + " has no citations");
  }
  return 100.0 * n_pyears / static_cast<double>(cited_years);
}

double perc_pyear(const CitedReference& cr, const CitationMatrix& cohort) {
  return perc_pyear(n_pyears(cr), cohort);
}

std::vector<IndicatorSet> cohort_indicators(const CitationMatrix& cohort, const NpctConfig& cfg) {
  const Eigen::MatrixXi tops = n_top(cohort.cells, cfg);
  const bool any_citation = cohort.grand_total > 0;
  std::vector<IndicatorSet> out(static_cast<std::size_t>(cohort.cells.rows()));
  for (Eigen::Index i = 0; i < cohort.cells.rows(); ++i) {
    IndicatorSet& set = out[static_cast<std::size_t>(i)];
    set.n_pyears = n_pyears(cohort.cells.row(i));
    set.perc_pyear = any_citation ? perc_pyear(set.n_pyears, cohort) : 0.0;
    set.n_top.reserve(static_cast<std::size_t>(tops.cols()));
    for (Eigen::Index k = 0; k < tops.cols(); ++k) set.n_top.push_back(tops(i, k));
  }
  return out;
}

}  // namespace crx
