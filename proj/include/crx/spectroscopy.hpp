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

#ifndef CRX_SPECTROSCOPY_HPP
#define CRX_SPECTROSCOPY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crx/model.hpp"

namespace crx {

struct SpectrumPoint {
  int rpy = 0;
  Count n_cr = 0;
  std::optional<Count> median_dev;

  bool operator==(const SpectrumPoint&) const = default;
};

/// Occurrences per RPY over the dataset's rpy range, zero-filled, ascending.
std::vector<SpectrumPoint> year_counts(const Dataset& dataset);

/// Deviation of each point from the median of the window [Y-X, Y+X], clipped
/// to the series. Even-sized windows use the lower-middle element.
std::vector<SpectrumPoint> median_deviation(std::span<const SpectrumPoint> series, int half_window = 2);

/// "RPY,N_CR,MEDIAN_DEV" with one line per point.
std::string spectrum_csv(std::span<const SpectrumPoint> series);

}  // namespace crx

#endif  // CRX_SPECTROSCOPY_HPP
