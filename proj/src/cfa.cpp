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

#include "crx/cfa.hpp"

#include <algorithm>
#include <array>

namespace crx {

std::string_view to_string(CitationType type) {
  switch (type) {
    case CitationType::HotPaper: return "hot_paper";
    case CitationType::SleepingBeauty: return "sleeping_beauty";
    case CitationType::LifeCycle: return "life_cycle";
    case CitationType::ConstantPerformer: return "constant_performer";
    case CitationType::Unclassified: return "unclassified";
  }
  return "unclassified";
}

std::optional<CitationType> parse_citation_type(std::string_view name) {
  constexpr std::array all{CitationType::HotPaper, CitationType::SleepingBeauty, CitationType::LifeCycle,
                           CitationType::ConstantPerformer, CitationType::Unclassified};
  for (auto type : all) {
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

void ClassifierParams::validate() const {
  if (hot_window < 1 || sleep_years < 1 || min_length < 1) {
    throw Error(ErrorCode::ConfigError, "classifier windows must be >= 1");
  }
}

namespace {

bool contains(std::string_view s, char c) { return s.find(c) != std::string_view::npos; }

bool is_hot_paper(std::string_view s, std::size_t early) {
  const auto head = s.substr(0, early);
  const auto tail = s.substr(std::min(early, s.size()));
  return contains(head, '+') && !contains(tail, '+') && contains(tail, '-');
}

bool is_sleeping_beauty(std::string_view s, std::size_t sleep) {
  const auto head = s.substr(0, sleep);
  const auto tail = s.substr(std::min(sleep, s.size()));
  return !contains(head, '+') && contains(head, '-') && contains(tail, '+');
}

// Some '-' ... '+' ... '-' subsequence.
bool is_life_cycle(std::string_view s) {
  const auto first_low = s.find('-');
  if (first_low == std::string_view::npos) return false;
  const auto peak = s.find('+', first_low);
  if (peak == std::string_view::npos) return false;
  return s.find('-', peak) != std::string_view::npos;
}

}  // namespace

TypeLabel classify(std::string_view symbols, const ClassifierParams& params) {
  params.validate();
  TypeLabel label{CitationType::Unclassified, params};
  if (symbols.size() < static_cast<std::size_t>(params.min_length)) return label;
  if (is_hot_paper(symbols, static_cast<std::size_t>(params.hot_window))) {
    label.type = CitationType::HotPaper;
  } else if (is_sleeping_beauty(symbols, static_cast<std::size_t>(params.sleep_years))) {
    label.type = CitationType::SleepingBeauty;
  } else if (is_life_cycle(symbols)) {
    label.type = CitationType::LifeCycle;
  } else if (!contains(symbols, '-')) {
    label.type = CitationType::ConstantPerformer;
  }
  return label;
}

CohortCfa analyze_cohort(const CitationMatrix& cohort, double theta) {
  CohortCfa out;
  out.rpy = cohort.rpy;
  out.citing_years = cohort.citing_years;
  for (Eigen::Index i = 0; i < cohort.cells.rows(); ++i) {
    if (cohort.row_totals(i) > 0) {
      out.kept_rows.push_back(i);
    } else {
      out.dropped_cr_ids.push_back(cohort.cr_ids[static_cast<std::size_t>(i)]);
    }
  }
  for (Eigen::Index j = 0; j < cohort.cells.cols(); ++j) {
    if (cohort.col_totals(j) > 0) out.kept_columns.push_back(j);
  }
  out.observed = cohort.cells(out.kept_rows, out.kept_columns);
  if (out.observed.size() == 0) return out;

  out.result = cfa(out.observed);
  const Eigen::Index width = cohort.cells.cols();
  for (std::size_t r = 0; r < out.kept_rows.size(); ++r) {
    Eigen::VectorXd z_full = Eigen::VectorXd::Zero(width);
    for (std::size_t c = 0; c < out.kept_columns.size(); ++c) {
      z_full(out.kept_columns[c]) =
          out.result->z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    out.sequences.push_back(sequence(z_full, theta, cohort.cr_ids[static_cast<std::size_t>(out.kept_rows[r])]));
  }
  return out;
}

}  // namespace crx
