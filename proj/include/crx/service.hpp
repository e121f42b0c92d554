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

#ifndef CRX_SERVICE_HPP
#define CRX_SERVICE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crx/analysis.hpp"
#include "crx/dedup.hpp"
#include "crx/model.hpp"
#include "crx/pipeline.hpp"

namespace crx {

struct CrQuery {
  std::string sort = "ID";  // any export column, or ID
  bool descending = false;
  std::optional<int> rpy;
  std::optional<CitationType> type;
  std::optional<Count> min_n_cr;
  std::size_t page = 0;
  std::size_t page_size = 50;
};

/// Parses "rpy=1980,type=hot_paper,min_n_cr=3"; throws BadQuery.
void apply_filter(CrQuery& query, std::string_view filter);

/// In-memory curation sessions. Mutations on a session are serialized and
/// recompute every derived value before returning; queries read the last
/// published snapshot and never block on a running mutation.
class CurationService {
 public:
  using json = nlohmann::json;

  std::string create_session(std::string_view content, InputFormat format, std::optional<YearRange> rpy_filter = {});
  bool has_session(const std::string& id) const;

  json summary(const std::string& id) const;
  json spectrogram(const std::string& id, std::optional<int> from = {}, std::optional<int> to = {}) const;
  json crs(const std::string& id, const CrQuery& query) const;
  json proposals(const std::string& id, const SimilarityConfig& cfg) const;
  json sequences(const std::string& id, std::optional<CitationType> type, std::size_t page = 0,
                 std::size_t page_size = 50) const;
  json cohort_cfa(const std::string& id, int rpy) const;
  std::string export_csv(const std::string& id) const;
  std::string project(const std::string& id) const;

  /// Each entry lists the member ids of one cluster; the representative is
  /// elected unless given.
  struct MergeRequest {
    std::vector<std::string> members;
    std::optional<std::string> representative;
  };
  json merge(const std::string& id, const std::vector<MergeRequest>& clusters);
  json delete_crs(const std::string& id, const std::vector<std::string>& cr_ids);
  json undo(const std::string& id);
  /// Partial update of analysis settings from a JSON object; throws BadQuery.
  json update_settings(const std::string& id, const json& patch);

 private:
  struct Snapshot {
    Dataset dataset;
    AnalysisSettings settings;
    Analysis analysis;
    std::uint64_t version = 0;
  };

  struct Session {
    std::mutex writer;
    mutable std::mutex publish;
    std::shared_ptr<const Snapshot> current;

    std::shared_ptr<const Snapshot> snapshot() const;
    void publish_snapshot(std::shared_ptr<const Snapshot> next);
  };

  std::shared_ptr<Session> session(const std::string& id) const;
  std::shared_ptr<const Snapshot> snapshot(const std::string& id) const;

  template <typename Mutate>
  json mutate(const std::string& id, Mutate&& change);

  static json summarize(const Snapshot& snap);

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);

/// Thin HTTP front end over CurationService.
class HttpServer {
 public:
  explicit HttpServer(CurationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to the port (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace crx

#endif  // CRX_SERVICE_HPP
