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

#include "crx/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <numeric>
#include <set>
#include <thread>

#include "crx/csv.hpp"
#include "crx/error.hpp"

namespace crx {

void SimilarityConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "cluster threshold must lie in [0,1]");
  }
  if (!(title_weight >= 0.0 && author_weight >= 0.0 && source_weight >= 0.0) ||
      title_weight + author_weight + source_weight <= 0.0) {
    throw Error(ErrorCode::ConfigError, "similarity weights must be non-negative and not all zero");
  }
  if (year_tolerance < 0) throw Error(ErrorCode::ConfigError, "year tolerance must be >= 0");
}

std::string canonicalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::toupper(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

namespace {

struct Fields {
  std::string title;
  std::string authors;
  std::string source;
};

Fields canonical_fields(const CitedReference& cr) {
  Fields f;
  if (cr.title) f.title = canonicalize(*cr.title);
  std::string names;
  for (const auto& author : cr.authors) {
    if (!names.empty()) names.push_back(' ');
    names += author.last_name;
  }
  f.authors = canonicalize(names);
  f.source = canonicalize(cr.source);
  return f;
}

double length_bound(std::string_view a, std::string_view b) {
  const auto longest = std::max(a.size(), b.size());
  return longest == 0 ? 1.0 : static_cast<double>(std::min(a.size(), b.size())) / static_cast<double>(longest);
}

// Weighted mean over shared attributes. With `bound` set, per-attribute edit
// similarities are replaced by their length-ratio upper bound.
double score_fields(const Fields& a, const Fields& b, const SimilarityConfig& cfg, bool bound) {
  double weighted = 0.0;
  double weights = 0.0;
  auto add = [&](const std::string& x, const std::string& y, double w) {
    if (x.empty() || y.empty() || w <= 0.0) return;
    weighted += w * (bound ? length_bound(x, y) : edit_similarity(x, y));
    weights += w;
  };
  add(a.title, b.title, cfg.title_weight);
  add(a.authors, b.authors, cfg.author_weight);
  add(a.source, b.source, cfg.source_weight);
  return weights > 0.0 ? weighted / weights : 0.0;
}

bool within_tolerance(int a, int b, int tolerance) { return std::abs(a - b) <= tolerance; }

}  // namespace

double similarity(const CitedReference& a, const CitedReference& b, const SimilarityConfig& cfg) {
  if (!within_tolerance(a.rpy, b.rpy, cfg.year_tolerance)) return 0.0;
  return score_fields(canonical_fields(a), canonical_fields(b), cfg, false);
}

std::vector<ScoredPair> match_pairs(const Dataset& dataset, const SimilarityConfig& cfg) {
  cfg.validate();
  const auto& crs = dataset.crs;
  std::vector<std::size_t> order(crs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return crs[x].rpy < crs[y].rpy; });
  std::vector<Fields> fields(crs.size());
  for (std::size_t k = 0; k < crs.size(); ++k) fields[k] = canonical_fields(crs[k]);

  // Row i of the sorted order is compared with every later row inside the
  // year window; rows are dealt to workers round-robin.
  auto scan = [&](std::size_t worker, std::size_t workers) {
    std::vector<ScoredPair> found;
    for (std::size_t i = worker; i < order.size(); i += workers) {
      const std::size_t a = order[i];
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        const std::size_t b = order[j];
        if (crs[b].rpy - crs[a].rpy > cfg.year_tolerance) break;
        if (score_fields(fields[a], fields[b], cfg, true) < cfg.threshold) continue;
        const double score = score_fields(fields[a], fields[b], cfg, false);
        if (score < cfg.threshold) continue;
        const auto& [lo, hi] = std::minmax(crs[a].id, crs[b].id);
        found.push_back({lo, hi, score});
      }
    }
    return found;
  };

  const std::size_t workers =
      crs.size() < 512 ? 1 : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<ScoredPair> pairs;
  if (workers == 1) {
    pairs = scan(0, 1);
  } else {
    std::vector<std::future<std::vector<ScoredPair>>> jobs;
    for (std::size_t w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, scan, w, workers));
    for (auto& job : jobs) {
      auto part = job.get();
      pairs.insert(pairs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const ScoredPair& x, const ScoredPair& y) {
    return std::tie(x.first, x.second) < std::tie(y.first, y.second);
  });
  return pairs;
}

std::string elect_representative(const Dataset& dataset, std::span<const std::string> member_ids) {
  const CitedReference* best = nullptr;
  for (const auto& id : member_ids) {
    const CitedReference* cr = dataset.find(id);
    if (!cr) throw Error(ErrorCode::StaleProposal, "CR '" + id + "' no longer exists");
    if (!best || std::make_tuple(-cr->n_cr, cr->rpy, cr->id) < std::make_tuple(-best->n_cr, best->rpy, best->id)) {
      best = cr;
    }
  }
  if (!best) throw Error(ErrorCode::StaleProposal, "empty cluster");
  return best->id;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

}  // namespace

std::vector<ClusterProposal> cluster(std::span<const ScoredPair> pairs, const Dataset& dataset) {
  std::vector<std::string> ids;
  for (const auto& pair : pairs) {
    ids.push_back(pair.first);
    ids.push_back(pair.second);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&ids](const std::string& id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  DisjointSets sets(ids.size());
  for (const auto& pair : pairs) sets.unite(index_of(pair.first), index_of(pair.second));

  // Components keyed by their smallest member, which is also their order.
  std::map<std::size_t, ClusterProposal> components;
  std::vector<std::size_t> first_member(ids.size(), ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const std::size_t root = sets.find(k);
    if (first_member[root] == ids.size()) first_member[root] = k;
    components[first_member[root]].member_ids.push_back(ids[k]);
  }
  for (const auto& pair : pairs) {
    const std::size_t root = sets.find(index_of(pair.first));
    auto& scores = components[first_member[root]].pair_scores;
    const auto key = std::minmax(pair.first, pair.second);
    scores[{key.first, key.second}] = pair.score;
  }

  std::vector<ClusterProposal> out;
  out.reserve(components.size());
  for (auto& [first, proposal] : components) {
    proposal.representative_id = elect_representative(dataset, proposal.member_ids);
    out.push_back(std::move(proposal));
  }
  return out;
}

void merge(Dataset& dataset, std::span<const ClusterProposal> proposals, std::span<const std::size_t> accepted) {
  std::set<std::string> seen;
  for (std::size_t index : accepted) {
    if (index >= proposals.size()) throw Error(ErrorCode::StaleProposal, "unknown proposal index");
    const ClusterProposal& proposal = proposals[index];
    if (std::find(proposal.member_ids.begin(), proposal.member_ids.end(), proposal.representative_id) ==
        proposal.member_ids.end()) {
      throw Error(ErrorCode::StaleProposal, "representative is not a cluster member");
    }
    for (const auto& id : proposal.member_ids) {
      if (!dataset.find(id)) throw Error(ErrorCode::StaleProposal, "CR '" + id + "' no longer exists");
      if (!seen.insert(id).second) throw Error(ErrorCode::StaleProposal, "CR '" + id + "' is in two proposals");
    }
  }
  if (accepted.empty()) return;

  Mutation mutation;
  mutation.kind = Mutation::Kind::Merge;
  for (std::size_t index : accepted) {
    const ClusterProposal& proposal = proposals[index];
    MergeStep step;
    step.representative_before = *dataset.find(proposal.representative_id);
    CitedReference merged = step.representative_before;
    for (const auto& id : proposal.member_ids) {
      if (id == proposal.representative_id) continue;
      CitedReference absorbed = dataset.take(id);
      merged.n_cr += absorbed.n_cr;
      for (const auto& [year, count] : absorbed.per_year) merged.per_year[year] += count;
      step.absorbed.push_back(std::move(absorbed));
    }
    *dataset.find(proposal.representative_id) = std::move(merged);
    mutation.merges.push_back(std::move(step));
  }
  dataset.history.push_back(std::move(mutation));
}

void merge(Dataset& dataset, std::span<const ClusterProposal> proposals) {
  std::vector<std::size_t> all(proposals.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  merge(dataset, proposals, all);
}

std::string proposals_csv(const Dataset& dataset, std::span<const ClusterProposal> proposals) {
  std::string out = "CLUSTER,REPRESENTATIVE,MEMBER,N_CR,RPY,MAX_SCORE,CR\n";
  char score[32];
  for (std::size_t k = 0; k < proposals.size(); ++k) {
    const auto& proposal = proposals[k];
    for (const auto& id : proposal.member_ids) {
      double best = 0.0;
      for (const auto& [key, value] : proposal.pair_scores) {
        if (key.first == id || key.second == id) best = std::max(best, value);
      }
      std::snprintf(score, sizeof score, "%.4f", best);
      const CitedReference* cr = dataset.find(id);
      out += std::to_string(k) + "," + csv_escape(proposal.representative_id) + "," + csv_escape(id) + "," +
             (cr ? std::to_string(cr->n_cr) : "") + "," + (cr ? std::to_string(cr->rpy) : "") + "," + score +
             "," + (cr ? csv_escape(cr->label()) : "") + "\n";
    }
  }
  return out;
}

}  // namespace crx
