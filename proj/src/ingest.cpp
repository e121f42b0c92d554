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

#include "crx/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <ctime>
#include <map>
#include <regex>
#include <tuple>

#include "crx/csv.hpp"
#include "crx/error.hpp"

namespace crx {

std::string sanitize_utf8(std::string_view text) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t length = 0;
    if (lead < 0x80) length = 1;
    else if (lead >= 0xC2 && lead <= 0xDF) length = 2;
    else if (lead >= 0xE0 && lead <= 0xEF) length = 3;
    else if (lead >= 0xF0 && lead <= 0xF4) length = 4;
    bool valid = length > 0 && i + length <= text.size();
    for (std::size_t k = 1; valid && k < length; ++k) {
      valid = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
    }
    if (valid && length >= 3) {
      const auto second = static_cast<unsigned char>(text[i + 1]);
      // Overlong forms, surrogates and code points above U+10FFFF.
      if ((lead == 0xE0 && second < 0xA0) || (lead == 0xED && second > 0x9F) ||
          (lead == 0xF0 && second < 0x90) || (lead == 0xF4 && second > 0x8F)) {
        valid = false;
      }
    }
    if (valid) {
      out.append(text.substr(i, length));
      i += length;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

bool plausible_year(int year) {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  return year >= 1000 && year <= utc.tm_year + 1900 + 1;
}

namespace {

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::optional<int> parse_year(std::string_view text) {
  text = trim(text);
  if (text.size() != 4) return std::nullopt;
  auto year = parse_int(text);
  if (!year || !plausible_year(*year)) return std::nullopt;
  return year;
}

bool all_of(std::string_view text, int (*pred)(int)) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [pred](char c) {
    return pred(static_cast<unsigned char>(c)) != 0;
  });
}

// "LOTKA AJ" -> {LOTKA, AJ}; "VAN RAAN AFJ" -> {VAN RAAN, AFJ}.
Author split_author(std::string_view text) {
  text = trim(text);
  const auto space = text.rfind(' ');
  if (space != std::string_view::npos) {
    const auto tail = text.substr(space + 1);
    if (tail.size() <= 4 && all_of(tail, std::isupper)) {
      return {std::string(trim(text.substr(0, space))), std::string(tail)};
    }
  }
  return {std::string(text), {}};
}

std::vector<std::string_view> split_tokens(std::string_view text, std::string_view separator) {
  std::vector<std::string_view> tokens;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '"') {
      quoted = !quoted;
      ++i;
    } else if (!quoted && text.substr(i, separator.size()) == separator) {
      tokens.push_back(trim(text.substr(start, i - start)));
      i += separator.size();
      start = i;
    } else {
      ++i;
    }
  }
  tokens.push_back(trim(text.substr(start)));
  return tokens;
}

bool is_quoted(std::string_view token) {
  return token.size() >= 2 && token.front() == '"' && token.back() == '"';
}

std::optional<ParsedReference> parse_tagged_reference(std::string_view text) {
  const auto tokens = split_tokens(text, ", ");
  ParsedReference ref;
  std::size_t next = 0;
  if (auto leading = parse_year(tokens[0])) {
    ref.year = *leading;
    next = 1;
  } else {
    if (tokens.size() < 2) return std::nullopt;
    auto year = parse_year(tokens[1]);
    if (!year) return std::nullopt;
    if (!tokens[0].empty()) ref.authors.push_back(split_author(tokens[0]));
    ref.year = *year;
    next = 2;
  }
  bool in_source = true;
  for (; next < tokens.size(); ++next) {
    const std::string_view token = tokens[next];
    if (token.empty()) continue;
    if (is_quoted(token) && !ref.title) {
      ref.title = std::string(trim(token.substr(1, token.size() - 2)));
    } else if (token.size() > 1 && token[0] == 'V' && !ref.volume && all_of(token.substr(1), std::isalnum)) {
      ref.volume = std::string(token.substr(1));
      in_source = false;
    } else if (token.size() > 1 && token[0] == 'P' && !ref.page && all_of(token.substr(1), std::isalnum)) {
      ref.page = std::string(token.substr(1));
      in_source = false;
    } else if (token.size() > 4 && token.substr(0, 4) == "DOI ") {
      ref.doi = std::string(trim(token.substr(4)));
      in_source = false;
    } else if (in_source) {
      if (!ref.source.empty()) ref.source += ", ";
      ref.source += token;
    }
  }
  return ref;
}

// Regexes only see short tokens; libstdc++ matching recurses per character.
constexpr std::size_t kShortToken = 64;

// Scopus layout: "Lotka, A.J., The frequency distribution (1926) J. Wash. Acad. Sci., 16 (12), pp. 317-323".
std::optional<ParsedReference> parse_scopus_reference(std::string_view text) {
  static const std::regex year_re(R"(\((\d{4})\))");
  std::cmatch match;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const char* search = begin;
  std::optional<std::cmatch> last;
  while (std::regex_search(search, end, match, year_re)) {
    last = match;
    search = match[0].second;
  }
  if (!last) return std::nullopt;
  auto year = parse_year(std::string_view((*last)[1].first, static_cast<std::size_t>((*last)[1].length())));
  if (!year) return std::nullopt;

  ParsedReference ref;
  ref.year = *year;
  const std::string_view head(begin, static_cast<std::size_t>((*last)[0].first - begin));
  const std::string_view tail((*last)[0].second, static_cast<std::size_t>(end - (*last)[0].second));

  static const std::regex initials_re(R"(^([A-Z]\.-?)+$)");
  const auto head_tokens = split_tokens(trim(head), ", ");
  std::size_t k = 0;
  while (k + 1 < head_tokens.size() && head_tokens[k + 1].size() < kShortToken &&
         std::regex_match(head_tokens[k + 1].begin(), head_tokens[k + 1].end(), initials_re)) {
    std::string initials;
    for (char c : head_tokens[k + 1]) {
      if (std::isupper(static_cast<unsigned char>(c))) initials.push_back(c);
    }
    std::string last_name;
    for (char c : head_tokens[k]) last_name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    ref.authors.push_back({std::move(last_name), std::move(initials)});
    k += 2;
  }
  std::string title;
  for (; k < head_tokens.size(); ++k) {
    if (!title.empty()) title += ", ";
    title += head_tokens[k];
  }
  if (!title.empty()) ref.title = title;

  const auto tail_tokens = split_tokens(trim(tail), ", ");
  static const std::regex pages_re(R"(^pp?\.\s*([0-9A-Za-z]+)(-[0-9A-Za-z]+)?\.?$)");
  static const std::regex volume_re(R"(^([0-9A-Za-z]+)(\s*\(.*\))?$)");
  std::cmatch part;
  for (std::size_t t = 0; t < tail_tokens.size(); ++t) {
    const std::string_view token = tail_tokens[t];
    if (token.empty()) continue;
    if (t == 0) {
      ref.source = std::string(token);
    } else if (token.size() >= kShortToken) {
      continue;
    } else if (std::regex_match(token.begin(), token.end(), part, pages_re)) {
      ref.page = part[1].str();
    } else if (!ref.volume && std::regex_match(token.begin(), token.end(), part, volume_re)) {
      ref.volume = part[1].str();
    }
  }
  if (!ref.source.empty() && ref.source.back() == '.') ref.source.pop_back();
  return ref;
}

void add_reference(ParseResult& result, const std::string& pub_id, std::string_view raw) {
  RawReference ref{pub_id, std::string(raw), std::nullopt};
  ref.parsed = parse_reference(raw);
  ++result.report.references;
  if (ref.parsed) {
    ++result.report.parsed;
  } else {
    result.report.warnings.push_back("publication " + pub_id + ": unparseable reference '" + ref.raw_text + "'");
  }
  result.references.push_back(std::move(ref));
}

std::string pub_id(std::size_t index) {
  std::string digits = std::to_string(index);
  return "P" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

void finish(ParseResult& result) {
  result.dataset.citing_years = citing_year_span(result.dataset.pubs);
  std::vector<std::string> ids;
  for (const auto& pub : result.dataset.pubs) ids.push_back(pub.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(ErrorCode::FormatError, "duplicate citing publication id");
  }
}

}  // namespace

std::optional<ParsedReference> parse_reference(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (auto ref = parse_tagged_reference(text)) return ref;
  return parse_scopus_reference(text);
}

ParseResult parse_tagged(std::string_view input) {
  const std::string text = sanitize_utf8(input);
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (!lines.empty() && lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);
  if (std::none_of(lines.begin(), lines.end(), [](std::string_view l) { return trim(l) == "ER"; })) {
    throw Error(ErrorCode::FormatError, "no record delimiter 'ER' found; not a tagged-field export");
  }

  ParseResult result;
  std::multimap<std::string, std::string> fields;
  std::string current_tag;
  std::size_t line_no = 0;

  auto close_record = [&] {
    ++result.report.records;
    const std::size_t record = result.report.records;
    CitingPublication pub;
    auto ut = fields.find("UT");
    pub.id = ut != fields.end() && !ut->second.empty() ? ut->second : pub_id(record);
    auto py = fields.find("PY");
    std::optional<int> year = py != fields.end() ? parse_year(py->second) : std::nullopt;
    if (!year) {
      result.report.warnings.push_back("record " + std::to_string(record) + ": missing or invalid PY, skipped");
      fields.clear();
      return;
    }
    pub.pub_year = *year;
    auto [lo, hi] = fields.equal_range("CR");
    for (auto it = lo; it != hi; ++it) {
      if (trim(it->second).empty()) continue;
      pub.raw_refs.push_back(it->second);
      add_reference(result, pub.id, it->second);
    }
    result.dataset.pubs.push_back(std::move(pub));
    fields.clear();
  };

  for (std::string_view line : lines) {
    ++line_no;
    if (trim(line) == "ER") {
      close_record();
      current_tag.clear();
      continue;
    }
    if (trim(line).empty()) continue;
    if (line.substr(0, 3) == "   ") {
      if (current_tag.empty()) {
        result.report.warnings.push_back("line " + std::to_string(line_no) + ": continuation without a field");
      } else if (current_tag == "CR") {
        fields.emplace("CR", std::string(trim(line)));
      } else {
        auto it = fields.find(current_tag);
        if (it != fields.end()) it->second += " " + std::string(trim(line));
      }
      continue;
    }
    const bool tagged = line.size() >= 2 && std::isalnum(static_cast<unsigned char>(line[0])) &&
                        std::isalnum(static_cast<unsigned char>(line[1])) && (line.size() == 2 || line[2] == ' ');
    if (!tagged) {
      result.report.warnings.push_back("line " + std::to_string(line_no) + ": not a tagged field");
      continue;
    }
    current_tag = std::string(line.substr(0, 2));
    if (current_tag == "FN" || current_tag == "VR" || current_tag == "EF") {
      current_tag.clear();
      continue;
    }
    fields.emplace(current_tag, std::string(trim(line.substr(2))));
  }
  if (!fields.empty()) {
    result.report.warnings.push_back("trailing record without 'ER' ignored");
  }
  finish(result);
  return result;
}

ParseResult parse_refcsv(std::string_view input) {
  const std::string text = sanitize_utf8(input);
  std::string_view body = text;
  if (body.substr(0, 3) == "\xEF\xBB\xBF") body.remove_prefix(3);
  const auto rows = parse_csv(body);
  if (rows.empty()) throw Error(ErrorCode::FormatError, "empty CSV input");

  auto column = [&header = rows[0]](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < header.size(); ++k) {
      const auto cell = trim(header[k]);
      if (cell.size() == name.size() &&
          std::equal(cell.begin(), cell.end(), name.begin(), [](char a, char b) {
            return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
          })) {
        return k;
      }
    }
    return std::nullopt;
  };
  const auto year_col = column("Year");
  const auto refs_col = column("References");
  if (!year_col || !refs_col) {
    throw Error(ErrorCode::FormatError, "CSV header must contain 'Year' and 'References' columns");
  }
  const auto id_col = column("EID");

  ParseResult result;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++result.report.records;
    auto cell = [&row](std::size_t k) -> std::string_view { return k < row.size() ? std::string_view(row[k]) : ""; };
    CitingPublication pub;
    pub.id = id_col && !trim(cell(*id_col)).empty() ? std::string(trim(cell(*id_col))) : pub_id(r);
    auto year = parse_year(cell(*year_col));
    if (!year) {
      result.report.warnings.push_back("row " + std::to_string(r) + ": missing or invalid Year, skipped");
      continue;
    }
    pub.pub_year = *year;
    for (auto& ref : split_outside_quotes(cell(*refs_col), "; ")) {
      add_reference(result, pub.id, ref);
      pub.raw_refs.push_back(std::move(ref));
    }
    result.dataset.pubs.push_back(std::move(pub));
  }
  finish(result);
  return result;
}

namespace {

std::string fold(std::string_view text) {
  std::string out;
  bool space = false;
  for (unsigned char c : trim(text)) {
    if (std::isspace(c)) {
      space = true;
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::string author_key(const std::vector<Author>& authors) {
  std::string out;
  for (const auto& a : authors) {
    if (!out.empty()) out += "; ";
    out += a.last_name + " " + a.initials;
  }
  return fold(out);
}

}  // namespace

AggregateResult aggregate(const ParseResult& parsed, std::optional<YearRange> rpy_filter) {
  using Key = std::tuple<int, std::string, std::string, std::string, std::string>;
  std::map<Key, CitedReference> groups;
  std::map<std::string, int> pub_years;
  for (const auto& pub : parsed.dataset.pubs) pub_years.emplace(pub.id, pub.pub_year);

  AggregateResult out;
  for (const auto& raw : parsed.references) {
    if (!raw.parsed) {
      ++out.unparsed;
      continue;
    }
    const ParsedReference& ref = *raw.parsed;
    if (rpy_filter && !rpy_filter->contains(ref.year)) {
      ++out.filtered_out;
      continue;
    }
    auto year = pub_years.find(raw.source_pub_id);
    if (year == pub_years.end()) continue;
    Key key{ref.year, author_key(ref.authors), fold(ref.source), fold(ref.volume.value_or("")),
            fold(ref.page.value_or(""))};
    auto [it, fresh] = groups.try_emplace(std::move(key));
    CitedReference& cr = it->second;
    if (fresh) {
      cr.authors = ref.authors;
      cr.rpy = ref.year;
      cr.source = ref.source;
      cr.volume = ref.volume;
      cr.page = ref.page;
    }
    if (!cr.title && ref.title) cr.title = ref.title;
    if (!cr.doi && ref.doi) cr.doi = ref.doi;
    ++cr.n_cr;
    ++cr.per_year[year->second];
  }

  Dataset& ds = out.dataset;
  ds.pubs = parsed.dataset.pubs;
  ds.citing_years = parsed.dataset.citing_years;
  const std::size_t width = std::max<std::size_t>(6, std::to_string(groups.size()).size());
  std::size_t index = 0;
  int lo = 0, hi = -1;
  for (auto& [key, cr] : groups) {
    const std::string digits = std::to_string(++index);
    cr.id = "CR" + std::string(width - digits.size(), '0') + digits;
    if (index == 1) lo = hi = cr.rpy;
    lo = std::min(lo, cr.rpy);
    hi = std::max(hi, cr.rpy);
    ds.crs.push_back(std::move(cr));
  }
  ds.rpy_range = rpy_filter ? *rpy_filter : YearRange{lo, hi};
  return out;
}

std::size_t filter_rpy(Dataset& dataset, YearRange range) {
  const auto before = dataset.crs.size();
  std::erase_if(dataset.crs, [&range](const CitedReference& cr) { return !range.contains(cr.rpy); });
  dataset.rpy_range = range;
  return before - dataset.crs.size();
}

}  // namespace crx
