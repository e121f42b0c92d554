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

#ifndef CRX_TESTS_FIXTURES_HPP
#define CRX_TESTS_FIXTURES_HPP

#include <array>
#include <optional>
#include <string>

#include "crx/error.hpp"
#include "crx/model.hpp"

namespace crx::testing {

// Small-world cohort: four CRs published in 1980, cited 1980-1985.
inline constexpr std::array<std::array<int, 6>, 4> kSmallWorld{{
    {6, 5, 0, 17, 24, 21},
    {9, 9, 5, 10, 8, 9},
    {20, 34, 0, 16, 5, 6},
    {6, 10, 15, 25, 15, 5},
}};
inline constexpr int kCohortYear = 1980;

// Reference limits, rows: top 50%, top 25%, top 10%.
inline constexpr std::array<std::array<int, 6>, 3> kReferenceLimits{{
    {6, 9, 0, 16, 8, 6},
    {9, 10, 5, 17, 15, 9},
    {9, 10, 5, 17, 15, 9},
}};

// Reference 0/1 cells per top class, CR, citing year.
inline constexpr std::array<std::array<std::array<int, 6>, 4>, 3> kReferenceAbove{{
    {{{0, 0, 0, 1, 1, 1}, {1, 0, 1, 0, 0, 1}, {1, 1, 0, 0, 0, 0}, {0, 1, 1, 1, 1, 0}}},
    {{{0, 0, 0, 0, 1, 1}, {0, 0, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0}, {0, 0, 1, 1, 0, 0}}},
    {{{0, 0, 0, 0, 1, 1}, {0, 0, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0}, {0, 0, 1, 1, 0, 0}}},
}};

inline constexpr std::array<int, 4> kNTop50{3, 3, 2, 4};
inline constexpr std::array<int, 4> kNTop25{2, 0, 2, 2};
inline constexpr std::array<int, 4> kNTop10{2, 0, 2, 2};
inline constexpr std::array<int, 4> kNPYears{5, 6, 5, 6};

// Two-decimal reference values, kept as given. B/1982 (3.36) and C/1982
// (5.78) do not follow from the marginals, which give 3.5714 and 5.7857.
inline constexpr std::array<std::array<double, 6>, 4> kReferenceExpected{{
    {10.69, 15.12, 5.21, 17.73, 13.56, 10.69},
    {7.32, 10.36, 3.36, 12.14, 9.29, 7.32},
    {11.86, 16.78, 5.78, 19.67, 15.04, 11.86},
    {11.13, 15.74, 5.43, 18.46, 14.11, 11.13},
}};

inline constexpr std::array<std::array<double, 6>, 4> kReferenceZ{{
    {-1.43, -2.60, -2.28, -0.17, 2.84, 3.15},
    {0.62, -0.42, 0.76, -0.61, -0.42, 0.62},
    {2.36, 4.20, -2.41, -0.83, -2.59, -1.70},
    {-1.54, -1.45, 4.11, 1.52, 0.24, -1.84},
}};

inline constexpr std::array<const char*, 4> kReferenceSequences{"---0++", "000000", "++-0--", "--++0-"};

inline CountMatrix small_world_matrix() {
  CountMatrix m(4, 6);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = kSmallWorld[i][j];
  return m;
}

/// The small world as a Dataset: CRs "A".."D", one citing publication per year.
inline Dataset small_world_dataset() {
  Dataset ds;
  const std::array<std::string, 4> names{"A", "B", "C", "D"};
  for (int i = 0; i < 4; ++i) {
    CitedReference cr;
    cr.id = names[i];
    cr.authors = {{names[i], ""}};
    cr.rpy = kCohortYear;
    cr.source = "SMALL WORLD";
    for (int j = 0; j < 6; ++j) {
      if (kSmallWorld[i][j] > 0) cr.per_year[kCohortYear + j] = kSmallWorld[i][j];
      cr.n_cr += kSmallWorld[i][j];
    }
    ds.crs.push_back(cr);
  }
  for (int year = 1980; year <= 1985; ++year) ds.pubs.push_back({"P" + std::to_string(year), year, {}});
  ds.citing_years = {1980, 1985};
  ds.rpy_range = {1980, 1980};
  return ds;
}

inline CitedReference make_cr(std::string id, std::string author, int rpy, std::string source,
                              std::map<int, Count> per_year) {
  CitedReference cr;
  cr.id = std::move(id);
  cr.authors = {{std::move(author), ""}};
  cr.rpy = rpy;
  cr.source = std::move(source);
  cr.per_year = std::move(per_year);
  for (const auto& [y, c] : cr.per_year) cr.n_cr += c;
  return cr;
}

/// Code of the crx::Error thrown by `fn`, or nothing when it returns.
inline std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace crx::testing

#endif  // CRX_TESTS_FIXTURES_HPP
