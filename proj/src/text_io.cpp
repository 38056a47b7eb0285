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

#include "gemrank/text_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "gemrank/error.hpp"

namespace gemrank {

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool parse_int(std::string_view text, long long& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto result = std::from_chars(first, text.data() + text.size(), out);
  return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto result = std::from_chars(text.data(), text.data() + text.size(), out);
  return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

void write_vectors(std::ostream& out, const Matrix& vectors) {
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    out << r;
    for (double v : vectors.row(r)) out << ' ' << format_double(v);
    out << '\n';
  }
}

Matrix read_vectors(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing header");
  auto header = split_whitespace(strip_cr(line));
  long long rows = 0, cols = 0;
  if (header.size() != 2 || !parse_int(header[0], rows) ||
      !parse_int(header[1], cols) || rows < 0 || cols < 0) {
    throw ParseError(line_no, "expected header 'rows cols'");
  }
  Matrix vectors(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (long long r = 0; r < rows; ++r) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(line_no, "truncated table");
    auto fields = split_whitespace(strip_cr(line));
    long long index = 0;
    if (fields.size() != static_cast<std::size_t>(cols) + 1 ||
        !parse_int(fields[0], index) || index != r) {
      throw ParseError(line_no, "malformed vector row");
    }
    auto row = vectors.row(static_cast<std::size_t>(r));
    for (long long c = 0; c < cols; ++c) {
      if (!parse_double(fields[c + 1], row[c])) {
        throw ParseError(line_no, "non-numeric vector entry");
      }
    }
  }
  return vectors;
}

void write_vectors_file(const std::filesystem::path& path,
                        const Matrix& vectors) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_vectors(out, vectors);
}

Matrix read_vectors_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_vectors(in);
}

}  // namespace gemrank
