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

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "crx/csv.hpp"
#include "crx/ingest.hpp"

namespace crx {

std::string export_header(const AnalysisSettings& settings) {
  std::string header = "CR,RPY,N_CR,N_PYEARS,PERC_PYEAR";
  for (double f : settings.npct.top_fractions) header += "," + top_column_name(f);
  header += ",SEQUENCE,TYPE";
  return header;
}

std::string export_table(const Dataset& dataset, const Analysis& analysis) {
  std::vector<std::size_t> order(dataset.crs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&crs = dataset.crs](std::size_t a, std::size_t b) {
    return std::make_tuple(crs[a].rpy, -crs[a].n_cr, std::cref(crs[a].id)) <
           std::make_tuple(crs[b].rpy, -crs[b].n_cr, std::cref(crs[b].id));
  });

  std::string out = export_header(analysis.settings) + "\n";
  char perc[32];
  for (std::size_t k : order) {
    const CitedReference& cr = dataset.crs[k];
    const CrResult* result = analysis.find(cr.id);
    const IndicatorSet empty{0, 0.0, std::vector<int>(analysis.settings.npct.top_fractions.size(), 0)};
    const IndicatorSet& ind = result ? result->indicators : empty;
    std::snprintf(perc, sizeof perc, "%.2f", ind.perc_pyear);
    out += csv_escape(cr.label()) + "," + std::to_string(cr.rpy) + "," + std::to_string(cr.n_cr) + "," +
           std::to_string(ind.n_pyears) + "," + perc;
    for (int n : ind.n_top) out += "," + std::to_string(n);
    out += ",";
    if (result && result->sequence) out += result->sequence->symbols;
    out += ",";
    out += to_string(result ? result->type.type : CitationType::Unclassified);
    out += "\n";
  }
  return out;
}

}  // namespace crx
