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

#include "crx/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "crx/error.hpp"

namespace crx {

std::string CitedReference::label() const {
  std::string out;
  for (const auto& author : authors) {
    if (!out.empty()) out += "; ";
    out += author.last_name;
    if (!author.initials.empty()) out += " " + author.initials;
  }
  auto append = [&out](std::string_view part) {
    if (!out.empty()) out += ", ";
    out += part;
  };
  append(std::to_string(rpy));
  if (!source.empty()) append(source);
  if (volume) append("V" + *volume);
  if (page) append("P" + *page);
  if (doi) append("DOI " + *doi);
  return out;
}

namespace {

auto lower_bound_id(auto& crs, std::string_view id) {
  return std::lower_bound(crs.begin(), crs.end(), id,
                          [](const CitedReference& cr, std::string_view key) {
                            return cr.id < key;
                          });
}

}  // namespace

const CitedReference* Dataset::find(std::string_view id) const {
  auto it = lower_bound_id(crs, id);
  return it != crs.end() && it->id == id ? &*it : nullptr;
}

CitedReference* Dataset::find(std::string_view id) {
  auto it = lower_bound_id(crs, id);
  return it != crs.end() && it->id == id ? &*it : nullptr;
}

void Dataset::insert(CitedReference cr) {
  auto it = lower_bound_id(crs, cr.id);
  if (it != crs.end() && it->id == cr.id) {
    throw Error(ErrorCode::IntegrityError, "duplicate CR id '" + cr.id + "'");
  }
  crs.insert(it, std::move(cr));
}

CitedReference Dataset::take(std::string_view id) {
  auto it = lower_bound_id(crs, id);
  if (it == crs.end() || it->id != id) {
    throw Error(ErrorCode::NotFound, "no CR with id '" + std::string(id) + "'");
  }
  CitedReference cr = std::move(*it);
  crs.erase(it);
  return cr;
}

Count Dataset::citation_mass() const {
  return std::accumulate(crs.begin(), crs.end(), Count{0},
                         [](Count acc, const CitedReference& cr) { return acc + cr.n_cr; });
}

std::vector<int> Dataset::cohort_years() const {
  std::set<int> years;
  for (const auto& cr : crs) years.insert(cr.rpy);
  return {years.begin(), years.end()};
}

void Dataset::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::IntegrityError, what); };
  for (std::size_t i = 1; i < crs.size(); ++i) {
    if (!(crs[i - 1].id < crs[i].id)) fail("CR ids not unique and ascending at '" + crs[i].id + "'");
  }
  if (!pubs.empty() && citing_year_span(pubs) != citing_years) {
    fail("citing-year range does not match the citing publications");
  }
  for (const auto& cr : crs) {
    Count sum = 0;
    for (const auto& [year, count] : cr.per_year) {
      if (count < 0) fail("negative count for CR '" + cr.id + "'");
      if (!citing_years.contains(year)) {
        fail("CR '" + cr.id + "' cited in " + std::to_string(year) + " outside the citing-year range");
      }
      sum += count;
    }
    if (sum != cr.n_cr) fail("n_cr of CR '" + cr.id + "' differs from its per-year sum");
  }
}

YearRange citing_year_span(std::span<const CitingPublication> pubs) {
  if (pubs.empty()) return {};
  auto [lo, hi] = std::minmax_element(pubs.begin(), pubs.end(), [](const auto& a, const auto& b) {
    return a.pub_year < b.pub_year;
  });
  return {lo->pub_year, hi->pub_year};
}

void delete_crs(Dataset& dataset, std::span<const std::string> ids) {
  std::set<std::string> unique(ids.begin(), ids.end());
  for (const auto& id : unique) {
    if (!dataset.find(id)) throw Error(ErrorCode::NotFound, "no CR with id '" + id + "'");
  }
  if (unique.empty()) return;
  Mutation mutation;
  mutation.kind = Mutation::Kind::Delete;
  for (const auto& id : unique) mutation.deleted.push_back(dataset.take(id));
  dataset.history.push_back(std::move(mutation));
}

void undo(Dataset& dataset) {
  if (dataset.history.empty()) throw Error(ErrorCode::EmptyHistory, "nothing to undo");
  Mutation last = std::move(dataset.history.back());
  dataset.history.pop_back();
  switch (last.kind) {
    case Mutation::Kind::Delete:
      for (auto& cr : last.deleted) dataset.insert(std::move(cr));
      break;
    case Mutation::Kind::Merge:
      for (auto it = last.merges.rbegin(); it != last.merges.rend(); ++it) {
        CitedReference* rep = dataset.find(it->representative_before.id);
        if (!rep) throw Error(ErrorCode::IntegrityError, "merge history refers to a missing representative");
        *rep = std::move(it->representative_before);
        for (auto& cr : it->absorbed) dataset.insert(std::move(cr));
      }
      break;
  }
}

CitationMatrix build_matrix(const Dataset& dataset, int rpy) {
  std::vector<const CitedReference*> rows;
  for (const auto& cr : dataset.crs) {
    if (cr.rpy == rpy) rows.push_back(&cr);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyCohort, "no cited reference with RPY " + std::to_string(rpy));
  }

  const YearRange& span = dataset.citing_years;
  YearRange columns{std::max(rpy, span.first), span.last};
  // A cohort younger than every citing publication still gets one column.
  if (columns.empty()) columns.first = columns.last;

  CitationMatrix m;
  m.rpy = rpy;
  m.citing_years.resize(static_cast<std::size_t>(columns.size()));
  std::iota(m.citing_years.begin(), m.citing_years.end(), columns.first);
  m.cells = CountMatrix::Zero(static_cast<Eigen::Index>(rows.size()), columns.size());
  m.cr_ids.reserve(rows.size());

  for (Eigen::Index i = 0; i < m.cells.rows(); ++i) {
    const CitedReference& cr = *rows[static_cast<std::size_t>(i)];
    m.cr_ids.push_back(cr.id);
    for (const auto& [year, count] : cr.per_year) {
      int column = year - columns.first;
      if (column < 0) {
        m.early_citations += count;
        column = 0;
      } else if (column >= columns.size()) {
        throw Error(ErrorCode::IntegrityError,
                    "CR '" + cr.id + "' cited in " + std::to_string(year) + " after the last citing year");
      }
      m.cells(i, column) += count;
    }
  }
  m.row_totals = m.cells.rowwise().sum();
  m.col_totals = m.cells.colwise().sum();
  m.grand_total = m.cells.sum();
  return m;
}

}  // namespace crx
