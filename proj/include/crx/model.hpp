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

#ifndef CRX_MODEL_HPP
#define CRX_MODEL_HPP

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crx {

using Count = std::int64_t;
using CountMatrix = Eigen::Matrix<Count, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<Count, Eigen::Dynamic, 1>;
using CountRowVector = Eigen::Matrix<Count, 1, Eigen::Dynamic>;

/// Inclusive range of years. An empty range has first > last.
struct YearRange {
  int first = 0;
  int last = -1;

  bool empty() const { return first > last; }
  int size() const { return empty() ? 0 : last - first + 1; }
  bool contains(int year) const { return year >= first && year <= last; }

  bool operator==(const YearRange&) const = default;
};

struct Author {
  std::string last_name;
  std::string initials;

  bool operator==(const Author&) const = default;
};

struct CitedReference {
  std::string id;
  std::vector<Author> authors;
  int rpy = 0;
  std::optional<std::string> title;
  std::string source;
  std::optional<std::string> volume;
  std::optional<std::string> page;
  std::optional<std::string> doi;
  Count n_cr = 0;
  std::map<int, Count> per_year;  // citing year -> occurrences

  /// Reference string in the tagged export style, e.g.
  /// "LOTKA AJ, 1926, J WASHINGTON ACAD SCI, V16, P317".
  std::string label() const;

  bool operator==(const CitedReference&) const = default;
};

struct CitingPublication {
  std::string id;
  int pub_year = 0;
  std::vector<std::string> raw_refs;

  bool operator==(const CitingPublication&) const = default;
};

/// One cluster folded onto its representative. Both sides are stored in full
/// so the step can be reverted exactly.
struct MergeStep {
  CitedReference representative_before;
  std::vector<CitedReference> absorbed;

  bool operator==(const MergeStep&) const = default;
};

struct Mutation {
  enum class Kind { Merge, Delete };

  Kind kind = Kind::Merge;
  std::vector<MergeStep> merges;
  std::vector<CitedReference> deleted;

  bool operator==(const Mutation&) const = default;
};

struct Dataset {
  std::vector<CitedReference> crs;  // ascending id
  std::vector<CitingPublication> pubs;
  YearRange citing_years;
  YearRange rpy_range;
  std::vector<Mutation> history;

  const CitedReference* find(std::string_view id) const;
  CitedReference* find(std::string_view id);

  /// Inserts keeping ascending id order; throws if the id already exists.
  void insert(CitedReference cr);
  /// Removes and returns the CR; throws NotFound.
  CitedReference take(std::string_view id);

  Count citation_mass() const;
  /// Distinct rpy values in ascending order.
  std::vector<int> cohort_years() const;

  /// Checks the structural invariants, throwing IntegrityError on violation.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

/// Sets citing_years to the (min, max) publication year over pubs.
YearRange citing_year_span(std::span<const CitingPublication> pubs);

/// Removes CRs and records the removal as one undoable mutation.
void delete_crs(Dataset& dataset, std::span<const std::string> ids);

/// Reverts the most recent mutation; throws EmptyHistory.
void undo(Dataset& dataset);

/// Per-rpy cohort cross-classified by citing year.
struct CitationMatrix {
  int rpy = 0;
  std::vector<std::string> cr_ids;
  std::vector<int> citing_years;
  CountMatrix cells;
  CountVector row_totals;
  CountRowVector col_totals;
  Count grand_total = 0;
  /// Occurrences dated before the first column, folded into it.
  Count early_citations = 0;
};

/// Builds the cohort matrix for `rpy`. Columns run from max(rpy, first citing
/// year) to the last citing year; rows are the cohort CRs in ascending id.
/// Throws EmptyCohort when no CR has that rpy.
CitationMatrix build_matrix(const Dataset& dataset, int rpy);

}  // namespace crx

#endif  // CRX_MODEL_HPP
