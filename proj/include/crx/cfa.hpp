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

#ifndef CRX_CFA_HPP
#define CRX_CFA_HPP

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crx/error.hpp"
#include "crx/model.hpp"

namespace crx {

// Configural frequency analysis of a cohort's CR x citing-year table under
// the independence model.

/// e_ij = row_i * col_j / total. Throws EmptyMatrix when the table holds no
/// citations.
template <typename Derived>
Eigen::MatrixXd expected_counts(const Eigen::MatrixBase<Derived>& observed) {
  const Eigen::MatrixXd o = observed.template cast<double>();
  const double total = o.sum();
  if (o.size() == 0 || !(total > 0.0)) {
    throw Error(ErrorCode::EmptyMatrix, "expected counts of an empty table");
  }
  return (o.rowwise().sum() * o.colwise().sum()) / total;
}

/// z_ij = (o_ij - e_ij) / sqrt(e_ij). Throws ZeroExpected if any e_ij <= 0.
template <typename Derived, typename ExpectedDerived>
Eigen::MatrixXd z_values(const Eigen::MatrixBase<Derived>& observed,
                         const Eigen::MatrixBase<ExpectedDerived>& expected) {
  if ((expected.array() <= 0.0).any()) {
    throw Error(ErrorCode::ZeroExpected, "expected count of zero; drop empty rows and columns first");
  }
  const Eigen::MatrixXd o = observed.template cast<double>();
  return ((o - expected).array() / expected.array().sqrt()).matrix();
}

struct CfaResult {
  Eigen::MatrixXd expected;
  Eigen::MatrixXd z;
  double chi_square = 0.0;
  int df = 0;
  /// (row, col) cells with e < 5.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> low_expected_cells;
};

inline constexpr double kLowExpected = 5.0;

template <typename Derived>
CfaResult cfa(const Eigen::MatrixBase<Derived>& observed) {
  CfaResult result;
  result.expected = expected_counts(observed);
  result.z = z_values(observed, result.expected);
  result.chi_square = result.z.squaredNorm();
  result.df = static_cast<int>((observed.rows() - 1) * (observed.cols() - 1));
  for (Eigen::Index j = 0; j < result.expected.cols(); ++j) {
    for (Eigen::Index i = 0; i < result.expected.rows(); ++i) {
      if (result.expected(i, j) < kLowExpected) result.low_expected_cells.emplace_back(i, j);
    }
  }
  return result;
}

struct Sequence {
  std::string cr_id;
  std::string symbols;  // one of '+', '0', '-' per citing year
  double theta = 1.0;

  bool operator==(const Sequence&) const = default;
};

/// '+' where z > theta, '-' where z < -theta, '0' otherwise.
template <typename Derived>
Sequence sequence(const Eigen::DenseBase<Derived>& z_row, double theta = 1.0, std::string cr_id = {}) {
  if (!(theta > 0.0)) throw Error(ErrorCode::ConfigError, "z threshold must be positive");
  Sequence seq{std::move(cr_id), {}, theta};
  seq.symbols.reserve(static_cast<std::size_t>(z_row.size()));
  for (Eigen::Index j = 0; j < z_row.size(); ++j) {
    const double z = z_row(j);
    seq.symbols.push_back(z > theta ? '+' : (z < -theta ? '-' : '0'));
  }
  return seq;
}

enum class CitationType { HotPaper, SleepingBeauty, LifeCycle, ConstantPerformer, Unclassified };

std::string_view to_string(CitationType type);
std::optional<CitationType> parse_citation_type(std::string_view name);

struct ClassifierParams {
  int hot_window = 3;   // E: early years in which a hot paper peaks
  int sleep_years = 5;  // B: length of the sleeping period
  int min_length = 5;   // L: shorter sequences stay unclassified

  void validate() const;
  bool operator==(const ClassifierParams&) const = default;
};

struct TypeLabel {
  CitationType type = CitationType::Unclassified;
  ClassifierParams params;

  bool operator==(const TypeLabel&) const = default;
};

/// First matching rule wins: hot paper, sleeping beauty, life cycle,
/// constant performer, otherwise unclassified.
TypeLabel classify(std::string_view symbols, const ClassifierParams& params = {});

/// CFA of one cohort. All-zero rows and columns are set aside before the
/// analysis; dropped columns read as '0' in the sequences, so every sequence
/// spans the full cohort column range.
struct CohortCfa {
  int rpy = 0;
  std::vector<int> citing_years;          // all cohort columns
  std::vector<Eigen::Index> kept_rows;    // indices into the cohort matrix
  std::vector<Eigen::Index> kept_columns;
  std::vector<std::string> dropped_cr_ids;
  CountMatrix observed;                   // kept rows x kept columns
  std::optional<CfaResult> result;        // absent when nothing is left
  std::vector<Sequence> sequences;        // one per kept row
};

CohortCfa analyze_cohort(const CitationMatrix& cohort, double theta = 1.0);

}  // namespace crx

#endif  // CRX_CFA_HPP
