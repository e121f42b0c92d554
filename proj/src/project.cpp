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

#include <cstdint>

#include <json.hpp>

#include "crx/error.hpp"
#include "crx/ingest.hpp"

namespace crx {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatName = "crx-project";

json optional_field(const std::optional<std::string>& value) { return value ? json(*value) : json(nullptr); }

json encode(const CitedReference& cr) {
  json authors = json::array();
  for (const auto& a : cr.authors) authors.push_back({a.last_name, a.initials});
  json per_year = json::array();
  for (const auto& [year, count] : cr.per_year) per_year.push_back({year, count});
  return {{"id", cr.id},         {"authors", authors}, {"rpy", cr.rpy},
          {"title", optional_field(cr.title)},
          {"source", cr.source}, {"volume", optional_field(cr.volume)},
          {"page", optional_field(cr.page)},
          {"doi", optional_field(cr.doi)},
          {"n_cr", cr.n_cr},     {"per_year", per_year}};
}

std::optional<std::string> optional_string(const json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<std::string>();
}

CitedReference decode_cr(const json& j) {
  CitedReference cr;
  cr.id = j.at("id").get<std::string>();
  for (const auto& a : j.at("authors")) cr.authors.push_back({a.at(0).get<std::string>(), a.at(1).get<std::string>()});
  cr.rpy = j.at("rpy").get<int>();
  cr.title = optional_string(j.at("title"));
  cr.source = j.at("source").get<std::string>();
  cr.volume = optional_string(j.at("volume"));
  cr.page = optional_string(j.at("page"));
  cr.doi = optional_string(j.at("doi"));
  cr.n_cr = j.at("n_cr").get<Count>();
  for (const auto& entry : j.at("per_year")) {
    if (!cr.per_year.emplace(entry.at(0).get<int>(), entry.at(1).get<Count>()).second) {
      throw Error(ErrorCode::IntegrityError, "duplicate citing year in CR '" + cr.id + "'");
    }
  }
  return cr;
}

json encode_crs(const std::vector<CitedReference>& crs) {
  json out = json::array();
  for (const auto& cr : crs) out.push_back(encode(cr));
  return out;
}

std::vector<CitedReference> decode_crs(const json& j) {
  std::vector<CitedReference> out;
  for (const auto& item : j) out.push_back(decode_cr(item));
  return out;
}

json encode(const Mutation& m) {
  json out;
  if (m.kind == Mutation::Kind::Delete) {
    out["kind"] = "delete";
    out["deleted"] = encode_crs(m.deleted);
  } else {
    out["kind"] = "merge";
    json merges = json::array();
    for (const auto& step : m.merges) {
      merges.push_back({{"representative_before", encode(step.representative_before)},
                        {"absorbed", encode_crs(step.absorbed)}});
    }
    out["merges"] = merges;
  }
  return out;
}

Mutation decode_mutation(const json& j) {
  Mutation m;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "delete") {
    m.kind = Mutation::Kind::Delete;
    m.deleted = decode_crs(j.at("deleted"));
  } else if (kind == "merge") {
    m.kind = Mutation::Kind::Merge;
    for (const auto& step : j.at("merges")) {
      m.merges.push_back({decode_cr(step.at("representative_before")), decode_crs(step.at("absorbed"))});
    }
  } else {
    throw Error(ErrorCode::IntegrityError, "unknown mutation kind '" + kind + "'");
  }
  return m;
}

json range(const YearRange& r) { return json::array({r.first, r.last}); }

YearRange decode_range(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

// FNV-1a over the compact dump; json objects keep keys sorted, so the dump
// is canonical.
std::uint64_t checksum(const json& body) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : body.dump(-1, ' ', false, json::error_handler_t::replace)) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

std::string save_project(const Dataset& dataset) {
  json body;
  body["format"] = kFormatName;
  body["meta"] = {{"schema_version", kProjectSchemaVersion},
                  {"citing_years", range(dataset.citing_years)},
                  {"rpy_range", range(dataset.rpy_range)}};
  json pubs = json::array();
  for (const auto& pub : dataset.pubs) pubs.push_back({{"id", pub.id}, {"year", pub.pub_year}, {"refs", pub.raw_refs}});
  body["pubs"] = pubs;
  body["crs"] = encode_crs(dataset.crs);
  json history = json::array();
  for (const auto& m : dataset.history) history.push_back(encode(m));
  body["history"] = history;
  body["checksum"] = checksum(body);
  return body.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

Dataset load_project(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::IntegrityError, "project file is not a complete document");
  }
  try {
    if (doc.value("format", "") != kFormatName) throw Error(ErrorCode::IntegrityError, "not a project file");
    const auto version = doc.at("meta").at("schema_version").get<int>();
    if (version != kProjectSchemaVersion) {
      throw Error(ErrorCode::VersionError, "unsupported project schema version " + std::to_string(version));
    }
    const auto stored = doc.at("checksum").get<std::uint64_t>();
    doc.erase("checksum");
    if (checksum(doc) != stored) throw Error(ErrorCode::IntegrityError, "project checksum mismatch");

    Dataset ds;
    ds.citing_years = decode_range(doc.at("meta").at("citing_years"));
    ds.rpy_range = decode_range(doc.at("meta").at("rpy_range"));
    for (const auto& pub : doc.at("pubs")) {
      ds.pubs.push_back({pub.at("id").get<std::string>(), pub.at("year").get<int>(),
                         pub.at("refs").get<std::vector<std::string>>()});
    }
    ds.crs = decode_crs(doc.at("crs"));
    for (const auto& m : doc.at("history")) ds.history.push_back(decode_mutation(m));
    ds.validate();
    return ds;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IntegrityError, std::string("malformed project file: ") + e.what());
  }
}

}  // namespace crx
