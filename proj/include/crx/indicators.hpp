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

#ifndef CRX_INDICATORS_HPP
#define CRX_INDICATORS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "crx/error.hpp"
#include "crx/model.hpp"

namespace crx {

/// Longevity indicators of one CR within its cohort. `n_top[k]` belongs to
/// `NpctConfig::top_fractions[k]`.
struct IndicatorSet {
  int n_pyears = 0;
  double perc_pyear = 0.0;
  std::vector<int> n_top;

  bool operator==(const IndicatorSet&) const = default;
};

struct NpctConfig {
  /// Half-width of the citing-year window pooled for each threshold.
  int range = 0;
  /// Top classes as fractions, e.g. 0.10 for "top 10%".
  std::vector<double> top_fractions{0.50, 0.25, 0.10};

  /// Throws ConfigError unless range >= 0 and every fraction is in (0,1).
  void validate() const;
};

/// Number of citing years with at least one citation.
int n_pyears(const CitedReference& cr);

template <typename Derived>
int n_pyears(const Eigen::MatrixBase<Derived>& row) {
  return static_cast<int>((row.array() > 0).count());
}

/// 100 * n_pyears / D where D counts the cohort columns holding any citation.
/// Throws EmptyCohort if the cohort has no citations at all.
double perc_pyear(int n_pyears, const CitationMatrix& cohort);
double perc_pyear(const CitedReference& cr, const CitationMatrix& cohort);

/// 1-based rank used for percentile q over n values: max(1, floor(q*n)).
/// A small tolerance absorbs representation error in q (1 - 0.9 != 0.1).
inline Eigen::Index percentile_rank(double q, Eigen::Index n) {
  const auto k = static_cast<Eigen::Index>(std::floor(q * static_cast<double>(n) + 1e-9));
  return std::clamp<Eigen::Index>(k, 1, n);
}

/// Value at rank max(1, floor(q*n)) of the ascending values. Throws EmptyInput.
template <typename T>
T percentile_threshold(std::span<const T> values, double q) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "percentile of an empty set");
  std::vector<T> sorted(values.begin(), values.end());
  const auto k = percentile_rank(q, static_cast<Eigen::Index>(sorted.size()));
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return sorted[static_cast<std::size_t>(k - 1)];
}

/// Per-column thresholds for the top fraction `top`, each pooling the cells
/// of columns [t - range, t + range] clipped to the matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic> column_thresholds(
    const Eigen::MatrixBase<Derived>& cells, double top, int range) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index cols = cells.cols();
  const Eigen::Index rows = cells.rows();
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out(cols);
  std::vector<Scalar> pool;
  for (Eigen::Index t = 0; t < cols; ++t) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, t - range);
    const Eigen::Index hi = std::min<Eigen::Index>(cols - 1, t + range);
    pool.clear();
    pool.reserve(static_cast<std::size_t>(rows * (hi - lo + 1)));
    for (Eigen::Index c = lo; c <= hi; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) pool.push_back(cells(r, c));
    }
    out(t) = percentile_threshold<Scalar>(pool, 1.0 - top);
  }
  return out;
}

/// 0/1 table: cell strictly above its column threshold.
template <typename Derived, typename ThresholdDerived>
Eigen::MatrixXi above_threshold(const Eigen::MatrixBase<Derived>& cells,
                                const Eigen::MatrixBase<ThresholdDerived>& thresholds) {
  return (cells.array() > thresholds.replicate(cells.rows(), 1).array()).template cast<int>();
}

/// N_TOP counts per CR (rows) and top fraction (columns).
template <typename Derived>
Eigen::MatrixXi n_top(const Eigen::MatrixBase<Derived>& cells, const NpctConfig& cfg) {
  cfg.validate();
  Eigen::MatrixXi out(cells.rows(), static_cast<Eigen::Index>(cfg.top_fractions.size()));
  if (cells.rows() == 0 || cells.cols() == 0) return Eigen::MatrixXi::Zero(out.rows(), out.cols());
  for (std::size_t k = 0; k < cfg.top_fractions.size(); ++k) {
    const auto thresholds = column_thresholds(cells, cfg.top_fractions[k], cfg.range);
    out.col(static_cast<Eigen::Index>(k)) = above_threshold(cells, thresholds).rowwise().sum();
  }
  return out;
}

/// All indicators for every row of the cohort matrix, in row order.
std::vector<IndicatorSet> cohort_indicators(const CitationMatrix& cohort, const NpctConfig& cfg);

}  // namespace crx

#endif  // CRX_INDICATORS_HPP
