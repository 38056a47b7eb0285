// Copyright 2026 The GEMRank Authors.
//
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

#ifndef GEMRANK_TEXT_IO_HPP_
#define GEMRANK_TEXT_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gemrank/matrix.hpp"

namespace gemrank {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// Splits on a single delimiter character; empty fields are kept.
std::vector<std::string_view> split_fields(std::string_view line, char delim);

// Splits on runs of spaces/tabs.
std::vector<std::string_view> split_whitespace(std::string_view line);

// Removes a trailing '\r' left over from CRLF line endings.
std::string_view strip_cr(std::string_view line);

bool parse_int(std::string_view text, long long& out);
bool parse_double(std::string_view text, double& out);

// Vector table dump: header "rows cols", then "index v_0 ... v_{cols-1}".
void write_vectors(std::ostream& out, const Matrix& vectors);
Matrix read_vectors(std::istream& in);
void write_vectors_file(const std::filesystem::path& path,
                        const Matrix& vectors);
Matrix read_vectors_file(const std::filesystem::path& path);

}  // namespace gemrank

#endif  // GEMRANK_TEXT_IO_HPP_
