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

#ifndef CRX_CSV_HPP
#define CRX_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace crx {

/// Quotes the field when it contains a comma, quote, or line break.
std::string csv_escape(std::string_view field);

/// RFC-4180 records. Throws FormatError on an unterminated quoted field.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Splits on `separator` wherever it occurs outside double quotes. Pieces are
/// trimmed; empty pieces are dropped.
std::vector<std::string> split_outside_quotes(std::string_view text, std::string_view separator);

std::string_view trim(std::string_view text);

}  // namespace crx

#endif  // CRX_CSV_HPP
