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

#ifndef CRX_DEDUP_HPP
#define CRX_DEDUP_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crx/model.hpp"

namespace crx {

struct SimilarityConfig {
  double threshold = 0.75;
  double title_weight = 0.5;
  double author_weight = 0.25;
  double source_weight = 0.25;
  int year_tolerance = 0;

  void validate() const;
};

/// Upper-cased, punctuation replaced by blanks, whitespace collapsed.
std::string canonicalize(std::string_view text);

/// Levenshtein distance (unit insert/delete/substitute costs).
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - distance / max(|a|, |b|); two empty strings are identical.
double edit_similarity(std::string_view a, std::string_view b);

/// Weighted mean of title/author/source edit similarities over the
/// attributes present in both records; 0 when the RPYs differ by more than
/// the year tolerance or no attribute is shared.
double similarity(const CitedReference& a, const CitedReference& b, const SimilarityConfig& cfg = {});

struct ScoredPair {
  std::string first;  // first < second
  std::string second;
  double score = 0.0;

  bool operator==(const ScoredPair&) const = default;
};

/// Every unordered pair within the RPY blocks scoring >= threshold, sorted by
/// (first, second).
std::vector<ScoredPair> match_pairs(const Dataset& dataset, const SimilarityConfig& cfg = {});

struct ClusterProposal {
  std::vector<std::string> member_ids;  // ascending
  std::map<std::pair<std::string, std::string>, double> pair_scores;
  std::string representative_id;

  bool operator==(const ClusterProposal&) const = default;
};

/// Highest n_cr, then older rpy, then smallest id. Throws StaleProposal for
/// ids not in the dataset.
std::string elect_representative(const Dataset& dataset, std::span<const std::string> member_ids);

/// Connected components of the match graph, singletons omitted, ordered by
/// first member id.
std::vector<ClusterProposal> cluster(std::span<const ScoredPair> pairs, const Dataset& dataset);

/// Folds each accepted proposal onto its representative and records the whole
/// batch as a single undoable mutation. Validation happens before anything
/// changes: a missing member or a member shared by two accepted proposals
/// throws StaleProposal and leaves the dataset untouched.
void merge(Dataset& dataset, std::span<const ClusterProposal> proposals, std::span<const std::size_t> accepted);
void merge(Dataset& dataset, std::span<const ClusterProposal> proposals);

/// "CLUSTER,REPRESENTATIVE,MEMBER,N_CR,RPY,MAX_SCORE,CR" review listing.
std::string proposals_csv(const Dataset& dataset, std::span<const ClusterProposal> proposals);

}  // namespace crx

#endif  // CRX_DEDUP_HPP
