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

#include <charconv>
#include <cstdlib>

// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "crx/csv.hpp"
#include "crx/service.hpp"

#include <httplib.h>

namespace crx {

using json = nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), kJson);
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}}, http_status(code));
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

template <typename T>
std::optional<T> numeric_param(const httplib::Request& req, const char* name) {
  auto text = param(req, name);
  if (!text || text->empty()) return std::nullopt;
  T value{};
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (ec != std::errc{} || ptr != text->data() + text->size()) {
    throw Error(ErrorCode::BadQuery, std::string("invalid ") + name + " '" + *text + "'");
  }
  return value;
}

// strtod keeps this independent of floating-point from_chars support.
std::optional<double> double_param(const httplib::Request& req, const char* name) {
  auto text = param(req, name);
  if (!text || text->empty()) return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(text->c_str(), &end);
  if (end != text->c_str() + text->size()) {
    throw Error(ErrorCode::BadQuery, std::string("invalid ") + name + " '" + *text + "'");
  }
  return value;
}

json body_json(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) throw Error(ErrorCode::BadQuery, "request body is not valid JSON");
  return body;
}

std::vector<std::string> string_list(const json& value, const char* what) {
  if (!value.is_array()) throw Error(ErrorCode::BadQuery, std::string(what) + " must be an array of ids");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) throw Error(ErrorCode::BadQuery, std::string(what) + " must contain strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

struct HttpServer::Impl {
  CurationService& service;
  httplib::Server server;

  explicit Impl(CurationService& s) : service(s) { routes(); }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, ErrorCode::BadQuery, e.what());
      }
    };
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto format_name = param(req, "format").value_or("tagged");
      const auto format = parse_input_format(format_name);
      if (!format) throw Error(ErrorCode::BadQuery, "unknown format '" + format_name + "'");
      std::optional<YearRange> filter;
      const auto from = numeric_param<int>(req, "rpy_from");
      const auto to = numeric_param<int>(req, "rpy_to");
      if (from || to) filter = YearRange{from.value_or(1000), to.value_or(9999)};
      const std::string id = service.create_session(req.body, *format, filter);
      send_json(res, service.summary(id), 201);
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, service.summary(req.matches[1]));
    }));

    server.Get(R"(/sessions/([^/]+)/spectrogram)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, service.spectrogram(req.matches[1], numeric_param<int>(req, "from"), numeric_param<int>(req, "to")));
    }));

    server.Get(R"(/sessions/([^/]+)/crs)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      CrQuery query;
      if (auto sort = param(req, "sort")) query.sort = *sort;
      if (auto dir = param(req, "dir")) {
        if (*dir != "asc" && *dir != "desc") throw Error(ErrorCode::BadQuery, "dir must be asc or desc");
        query.descending = *dir == "desc";
      }
      if (auto filter = param(req, "filter")) apply_filter(query, *filter);
      query.page = numeric_param<std::size_t>(req, "page").value_or(0);
      query.page_size = numeric_param<std::size_t>(req, "page_size").value_or(50);
      send_json(res, service.crs(req.matches[1], query));
    }));

    server.Get(R"(/sessions/([^/]+)/proposals)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      SimilarityConfig cfg;
      if (auto threshold = double_param(req, "threshold")) cfg.threshold = *threshold;
      if (auto tolerance = numeric_param<int>(req, "year_tolerance")) cfg.year_tolerance = *tolerance;
      if (auto weights = param(req, "weights")) {
        const auto parts = split_outside_quotes(*weights, ",");
        if (parts.size() != 3) throw Error(ErrorCode::BadQuery, "weights must be t,a,s");
        cfg.title_weight = std::stod(parts[0]);
        cfg.author_weight = std::stod(parts[1]);
        cfg.source_weight = std::stod(parts[2]);
      }
      try {
        cfg.validate();
      } catch (const Error& e) {
        throw Error(ErrorCode::BadQuery, e.what());
      }
      send_json(res, service.proposals(req.matches[1], cfg));
    }));

    server.Get(R"(/sessions/([^/]+)/sequences)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::optional<CitationType> type;
      if (auto name = param(req, "type"); name && !name->empty()) {
        type = parse_citation_type(*name);
        if (!type) throw Error(ErrorCode::BadQuery, "unknown type '" + *name + "'");
      }
      send_json(res, service.sequences(req.matches[1], type, numeric_param<std::size_t>(req, "page").value_or(0),
                                       numeric_param<std::size_t>(req, "page_size").value_or(50)));
    }));

    server.Get(R"(/sessions/([^/]+)/cohorts/(-?\d+)/cfa)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, service.cohort_cfa(req.matches[1], std::stoi(req.matches[2])));
               }));

    server.Get(R"(/sessions/([^/]+)/export\.csv)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      res.set_content(service.export_csv(req.matches[1]), "text/csv; charset=utf-8");
    }));

    server.Get(R"(/sessions/([^/]+)/project)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      res.set_content(service.project(req.matches[1]), kJson);
    }));

    server.Post(R"(/sessions/([^/]+)/merge)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = body_json(req);
      if (!body.contains("proposals") || !body["proposals"].is_array()) {
        throw Error(ErrorCode::BadQuery, "body must contain a 'proposals' array");
      }
      std::vector<CurationService::MergeRequest> requests;
      for (const auto& p : body["proposals"]) {
        if (!p.is_object() || !p.contains("members")) throw Error(ErrorCode::BadQuery, "proposal without 'members'");
        CurationService::MergeRequest request{string_list(p["members"], "members"), std::nullopt};
        if (p.contains("representative") && p["representative"].is_string()) {
          request.representative = p["representative"].get<std::string>();
        }
        requests.push_back(std::move(request));
      }
      send_json(res, service.merge(req.matches[1], requests));
    }));

    server.Post(R"(/sessions/([^/]+)/delete)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = body_json(req);
      if (!body.contains("ids")) throw Error(ErrorCode::BadQuery, "body must contain an 'ids' array");
      send_json(res, service.delete_crs(req.matches[1], string_list(body["ids"], "ids")));
    }));

    server.Post(R"(/sessions/([^/]+)/undo)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, service.undo(req.matches[1]));
    }));

    server.Put(R"(/sessions/([^/]+)/settings)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, service.update_settings(req.matches[1], body_json(req)));
    }));
  }
};

HttpServer::HttpServer(CurationService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace crx
