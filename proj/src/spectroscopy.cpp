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

#include "crx/spectroscopy.hpp"

#include <algorithm>

#include "crx/error.hpp"

namespace crx {

std::vector<SpectrumPoint> year_counts(const Dataset& dataset) {
  const YearRange& range = dataset.rpy_range;
  std::vector<SpectrumPoint> series(static_cast<std::size_t>(range.size()));
  for (int k = 0; k < range.size(); ++k) series[static_cast<std::size_t>(k)].rpy = range.first + k;
  for (const auto& cr : dataset.crs) {
    if (range.contains(cr.rpy)) series[static_cast<std::size_t>(cr.rpy - range.first)].n_cr += cr.n_cr;
  }
  return series;
}

std::vector<SpectrumPoint> median_deviation(std::span<const SpectrumPoint> series, int half_window) {
  if (half_window < 1) throw Error(ErrorCode::ConfigError, "median half-window must be >= 1");
  std::vector<SpectrumPoint> out(series.begin(), series.end());
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<Count> window;
  for (std::ptrdiff_t y = 0; y < n; ++y) {
    const auto lo = std::max<std::ptrdiff_t>(0, y - half_window);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, y + half_window);
    window.clear();
    for (auto k = lo; k <= hi; ++k) window.push_back(series[static_cast<std::size_t>(k)].n_cr);
    const auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
    std::nth_element(window.begin(), mid, window.end());
    out[static_cast<std::size_t>(y)].median_dev = series[static_cast<std::size_t>(y)].n_cr - *mid;
  }
  return out;
}

std::string spectrum_csv(std::span<const SpectrumPoint> series) {
  std::string out = "RPY,N_CR,MEDIAN_DEV\n";
  for (const auto& point : series) {
    out += std::to_string(point.rpy) + "," + std::to_string(point.n_cr) + ",";
    if (point.median_dev) out += std::to_string(*point.median_dev);
    out += "\n";
  }
  return out;
}

}  // namespace crx
