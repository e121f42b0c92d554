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

#include "crx/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <variant>

#include "crx/csv.hpp"
#include "crx/ingest.hpp"

namespace crx {

using json = nlohmann::json;

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  text = trim(text);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadQuery, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

json range_json(const YearRange& r) { return r.empty() ? json(nullptr) : json::array({r.first, r.last}); }

json settings_json(const AnalysisSettings& s) {
  json percentiles = json::array();
  for (double f : s.npct.top_fractions) percentiles.push_back(std::round(f * 100.0 * 1e6) / 1e6);
  return {{"npct_range", s.npct.range},
          {"percentiles", percentiles},
          {"z_threshold", s.z_threshold},
          {"hot_window", s.classifier.hot_window},
          {"sleep_years", s.classifier.sleep_years},
          {"min_seq_len", s.classifier.min_length},
          {"median_half_window", s.median_half_window}};
}

json cr_json(const CitedReference& cr, const CrResult& result, const AnalysisSettings& settings) {
  json tops = json::object();
  for (std::size_t k = 0; k < settings.npct.top_fractions.size(); ++k) {
    tops[top_column_name(settings.npct.top_fractions[k])] = result.indicators.n_top[k];
  }
  return {{"id", cr.id},
          {"cr", cr.label()},
          {"rpy", cr.rpy},
          {"n_cr", cr.n_cr},
          {"n_pyears", result.indicators.n_pyears},
          {"perc_pyear", result.indicators.perc_pyear},
          {"n_top", tops},
          {"sequence", result.sequence ? result.sequence->symbols : std::string()},
          {"type", std::string(to_string(result.type.type))}};
}

json matrix_json(const auto& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

using SortValue = std::variant<double, std::string>;

SortValue sort_value(const std::string& column, const CitedReference& cr, const CrResult& r,
                     const AnalysisSettings& settings) {
  if (column == "ID") return cr.id;
  if (column == "CR") return cr.label();
  if (column == "RPY") return static_cast<double>(cr.rpy);
  if (column == "N_CR") return static_cast<double>(cr.n_cr);
  if (column == "N_PYEARS") return static_cast<double>(r.indicators.n_pyears);
  if (column == "PERC_PYEAR") return r.indicators.perc_pyear;
  if (column == "SEQUENCE") return r.sequence ? r.sequence->symbols : std::string();
  if (column == "TYPE") return std::string(to_string(r.type.type));
  for (std::size_t k = 0; k < settings.npct.top_fractions.size(); ++k) {
    if (column == top_column_name(settings.npct.top_fractions[k])) return static_cast<double>(r.indicators.n_top[k]);
  }
  throw Error(ErrorCode::BadQuery, "unknown sort column '" + column + "'");
}

void validate_sort_column(const std::string& column, const AnalysisSettings& settings) {
  static const std::vector<std::string> fixed{"ID", "CR", "RPY", "N_CR", "N_PYEARS", "PERC_PYEAR", "SEQUENCE", "TYPE"};
  if (std::find(fixed.begin(), fixed.end(), column) != fixed.end()) return;
  for (double f : settings.npct.top_fractions) {
    if (column == top_column_name(f)) return;
  }
  throw Error(ErrorCode::BadQuery, "unknown sort column '" + column + "'");
}

std::size_t checked_page_size(std::size_t page_size) {
  if (page_size == 0 || page_size > 10000) throw Error(ErrorCode::BadQuery, "page size must be in 1..10000");
  return page_size;
}

}  // namespace

void apply_filter(CrQuery& query, std::string_view filter) {
  for (const auto& clause : split_outside_quotes(filter, ",")) {
    const auto eq = clause.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadQuery, "filter clause '" + clause + "' lacks '='");
    const std::string key(trim(std::string_view(clause).substr(0, eq)));
    const std::string_view value = trim(std::string_view(clause).substr(eq + 1));
    if (key == "rpy") {
      query.rpy = parse_number<int>(value, "rpy");
    } else if (key == "type") {
      query.type = parse_citation_type(value);
      if (!query.type) throw Error(ErrorCode::BadQuery, "unknown type '" + std::string(value) + "'");
    } else if (key == "min_n_cr") {
      query.min_n_cr = parse_number<Count>(value, "min_n_cr");
    } else {
      throw Error(ErrorCode::BadQuery, "unknown filter key '" + key + "'");
    }
  }
}

std::shared_ptr<const CurationService::Snapshot> CurationService::Session::snapshot() const {
  std::lock_guard lock(publish);
  return current;
}

void CurationService::Session::publish_snapshot(std::shared_ptr<const Snapshot> next) {
  std::lock_guard lock(publish);
  current = std::move(next);
}

std::string CurationService::create_session(std::string_view content, InputFormat format,
                                            std::optional<YearRange> rpy_filter) {
  IngestOutcome in = ingest_text(content, format, rpy_filter);
  auto snap = std::make_shared<Snapshot>();
  snap->dataset = std::move(in.dataset);
  snap->analysis = analyze(snap->dataset, snap->settings);
  auto created = std::make_shared<Session>();
  created->current = std::move(snap);

  std::unique_lock lock(sessions_mutex_);
  std::string id = "s" + std::to_string(next_id_++);
  sessions_.emplace(id, std::move(created));
  return id;
}

bool CurationService::has_session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.count(id) > 0;
}

std::shared_ptr<CurationService::Session> CurationService::session(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

std::shared_ptr<const CurationService::Snapshot> CurationService::snapshot(const std::string& id) const {
  return session(id)->snapshot();
}

json CurationService::summarize(const Snapshot& snap) {
  return {{"version", snap.version},
          {"crs", snap.dataset.crs.size()},
          {"citation_mass", snap.dataset.citation_mass()},
          {"history_depth", snap.dataset.history.size()},
          {"citing_years", range_json(snap.dataset.citing_years)},
          {"rpy_range", range_json(snap.dataset.rpy_range)},
          {"cohorts", snap.analysis.cohorts.size()},
          {"settings", settings_json(snap.settings)},
          {"warnings", snap.analysis.warnings}};
}

template <typename Mutate>
json CurationService::mutate(const std::string& id, Mutate&& change) {
  auto s = session(id);
  std::lock_guard writer(s->writer);
  const auto base = s->snapshot();
  auto next = std::make_shared<Snapshot>(*base);
  change(*next);
  next->analysis = analyze(next->dataset, next->settings);
  next->version = base->version + 1;
  json out = summarize(*next);
  s->publish_snapshot(std::move(next));
  return out;
}

json CurationService::summary(const std::string& id) const {
  json out = summarize(*snapshot(id));
  out["id"] = id;
  return out;
}

json CurationService::spectrogram(const std::string& id, std::optional<int> from, std::optional<int> to) const {
  const auto snap = snapshot(id);
  json points = json::array();
  for (const auto& p : snap->analysis.spectrum) {
    if ((from && p.rpy < *from) || (to && p.rpy > *to)) continue;
    points.push_back({{"rpy", p.rpy}, {"n_cr", p.n_cr}, {"median_dev", p.median_dev.value_or(0)}});
  }
  return {{"version", snap->version}, {"points", points}};
}

json CurationService::crs(const std::string& id, const CrQuery& query) const {
  const auto snap = snapshot(id);
  const auto& ds = snap->dataset;
  const auto& analysis = snap->analysis;
  checked_page_size(query.page_size);

  struct Row {
    std::size_t index;
    SortValue key;
  };
  std::vector<Row> rows;
  for (std::size_t k = 0; k < ds.crs.size(); ++k) {
    const auto& cr = ds.crs[k];
    const auto& result = analysis.crs[k];
    if (query.rpy && cr.rpy != *query.rpy) continue;
    if (query.type && result.type.type != *query.type) continue;
    if (query.min_n_cr && cr.n_cr < *query.min_n_cr) continue;
    rows.push_back({k, sort_value(query.sort, cr, result, snap->settings)});
  }
  validate_sort_column(query.sort, snap->settings);
  // Rows arrive in ascending id, so a stable sort leaves ties in id order.
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    return query.descending ? b.key < a.key : a.key < b.key;
  });

  json items = json::array();
  const std::size_t first = std::min(rows.size(), query.page * query.page_size);
  const std::size_t last = std::min(rows.size(), first + query.page_size);
  for (std::size_t k = first; k < last; ++k) {
    items.push_back(cr_json(ds.crs[rows[k].index], analysis.crs[rows[k].index], snap->settings));
  }
  return {{"version", snap->version},
          {"total", rows.size()},
          {"page", query.page},
          {"page_size", query.page_size},
          {"items", items}};
}

json CurationService::proposals(const std::string& id, const SimilarityConfig& cfg) const {
  const auto snap = snapshot(id);
  cfg.validate();
  const auto pairs = match_pairs(snap->dataset, cfg);
  const auto clusters = cluster(pairs, snap->dataset);
  json items = json::array();
  for (const auto& c : clusters) {
    json scores = json::array();
    for (const auto& [key, score] : c.pair_scores) scores.push_back({{"a", key.first}, {"b", key.second}, {"score", score}});
    json members = json::array();
    for (const auto& member : c.member_ids) {
      const auto* cr = snap->dataset.find(member);
      members.push_back({{"id", member}, {"cr", cr->label()}, {"n_cr", cr->n_cr}, {"rpy", cr->rpy}});
    }
    items.push_back({{"representative", c.representative_id}, {"members", members}, {"pair_scores", scores}});
  }
  return {{"version", snap->version}, {"threshold", cfg.threshold}, {"proposals", items}};
}

json CurationService::sequences(const std::string& id, std::optional<CitationType> type, std::size_t page,
                                std::size_t page_size) const {
  const auto snap = snapshot(id);
  checked_page_size(page_size);
  std::vector<std::size_t> hits;
  for (std::size_t k = 0; k < snap->dataset.crs.size(); ++k) {
    const auto& result = snap->analysis.crs[k];
    if (!result.sequence) continue;
    if (type && result.type.type != *type) continue;
    hits.push_back(k);
  }
  json items = json::array();
  const std::size_t first = std::min(hits.size(), page * page_size);
  const std::size_t last = std::min(hits.size(), first + page_size);
  for (std::size_t k = first; k < last; ++k) {
    const auto& cr = snap->dataset.crs[hits[k]];
    const auto& result = snap->analysis.crs[hits[k]];
    items.push_back({{"id", cr.id},
                     {"cr", cr.label()},
                     {"rpy", cr.rpy},
                     {"sequence", result.sequence->symbols},
                     {"type", std::string(to_string(result.type.type))}});
  }
  return {{"version", snap->version}, {"total", hits.size()}, {"page", page}, {"items", items}};
}

json CurationService::cohort_cfa(const std::string& id, int rpy) const {
  const auto snap = snapshot(id);
  auto it = snap->analysis.cohorts.find(rpy);
  if (it == snap->analysis.cohorts.end()) {
    throw Error(ErrorCode::NotFound, "no cohort with RPY " + std::to_string(rpy));
  }
  const CohortCfa& c = it->second;
  json kept_ids = json::array();
  for (const auto& s : c.sequences) kept_ids.push_back(s.cr_id);
  json years = json::array();
  for (auto col : c.kept_columns) years.push_back(c.citing_years[static_cast<std::size_t>(col)]);
  json out = {{"version", snap->version},
              {"rpy", rpy},
              {"citing_years", c.citing_years},
              {"cr_ids", kept_ids},
              {"excluded_cr_ids", c.dropped_cr_ids},
              {"analyzed_years", years},
              {"observed", matrix_json(c.observed)}};
  if (c.result) {
    json low = json::array();
    for (const auto& [i, j] : c.result->low_expected_cells) low.push_back({i, j});
    out["expected"] = matrix_json(c.result->expected);
    out["z"] = matrix_json(c.result->z);
    out["chi_square"] = c.result->chi_square;
    out["df"] = c.result->df;
    out["low_expected_cells"] = low;
  }
  json seqs = json::array();
  for (const auto& s : c.sequences) {
    const auto* result = snap->analysis.find(s.cr_id);
    seqs.push_back({{"id", s.cr_id}, {"sequence", s.symbols}, {"type", std::string(to_string(result->type.type))}});
  }
  out["sequences"] = seqs;
  return out;
}

std::string CurationService::export_csv(const std::string& id) const {
  const auto snap = snapshot(id);
  return export_table(snap->dataset, snap->analysis);
}

std::string CurationService::project(const std::string& id) const { return save_project(snapshot(id)->dataset); }

json CurationService::merge(const std::string& id, const std::vector<MergeRequest>& clusters) {
  return mutate(id, [&clusters](Snapshot& snap) {
    std::vector<ClusterProposal> proposals;
    for (const auto& request : clusters) {
      if (request.members.size() < 2) throw Error(ErrorCode::BadQuery, "a merge needs at least two members");
      ClusterProposal p;
      p.member_ids = request.members;
      std::sort(p.member_ids.begin(), p.member_ids.end());
      p.representative_id = request.representative ? *request.representative
                                                   : elect_representative(snap.dataset, p.member_ids);
      proposals.push_back(std::move(p));
    }
    crx::merge(snap.dataset, proposals);
  });
}

json CurationService::delete_crs(const std::string& id, const std::vector<std::string>& cr_ids) {
  return mutate(id, [&cr_ids](Snapshot& snap) { crx::delete_crs(snap.dataset, cr_ids); });
}

json CurationService::undo(const std::string& id) {
  return mutate(id, [](Snapshot& snap) { crx::undo(snap.dataset); });
}

json CurationService::update_settings(const std::string& id, const json& patch) {
  if (!patch.is_object()) throw Error(ErrorCode::BadQuery, "settings must be a JSON object");
  return mutate(id, [&patch](Snapshot& snap) {
    AnalysisSettings next = snap.settings;
    try {
      for (const auto& [key, value] : patch.items()) {
        if (key == "npct_range") {
          next.npct.range = value.get<int>();
        } else if (key == "percentiles") {
          next.npct.top_fractions.clear();
          for (const auto& p : value) next.npct.top_fractions.push_back(p.get<double>() / 100.0);
        } else if (key == "z_threshold") {
          next.z_threshold = value.get<double>();
        } else if (key == "hot_window") {
          next.classifier.hot_window = value.get<int>();
        } else if (key == "sleep_years") {
          next.classifier.sleep_years = value.get<int>();
        } else if (key == "min_seq_len") {
          next.classifier.min_length = value.get<int>();
        } else if (key == "median_half_window") {
          next.median_half_window = value.get<int>();
        } else {
          throw Error(ErrorCode::BadQuery, "unknown setting '" + key + "'");
        }
      }
      next.validate();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BadQuery, std::string("invalid setting value: ") + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::BadQuery, e.what());
    }
    snap.settings = std::move(next);
  });
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::EmptyCohort: return 404;
    case ErrorCode::BadQuery:
    case ErrorCode::ConfigError: return 400;
    case ErrorCode::StaleProposal:
    case ErrorCode::EmptyHistory: return 409;
    case ErrorCode::FormatError:
    case ErrorCode::VersionError:
    case ErrorCode::IntegrityError: return 422;
    default: return 500;
  }
}

}  // namespace crx
