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

#include "gemrank/pco.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "gemrank/error.hpp"
#include "gemrank/parallel.hpp"
#include "gemrank/text_io.hpp"

namespace gemrank {

std::string_view to_string(Basis basis) {
  return basis == Basis::ItemBased ? "item" : "user";
}

Basis parse_basis(std::string_view text) {
  if (text == "item" || text == "item-based") return Basis::ItemBased;
  if (text == "user" || text == "user-based") return Basis::UserBased;
  throw ConfigError("unknown basis '" + std::string(text) +
                    "' (expected item or user)");
}

std::size_t basic_entity_count(const Dataset& dataset, Basis basis) {
  return basis == Basis::ItemBased ? dataset.num_items : dataset.num_users;
}

PcoMatrix::PcoMatrix(Basis basis, std::vector<std::vector<Neighbor>> rows)
    : basis_(basis) {
  offsets_.reserve(rows.size() + 1);
  offsets_.push_back(0);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  neighbors_.reserve(total);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.index < b.index;
    });
    neighbors_.insert(neighbors_.end(), r.begin(), r.end());
    offsets_.push_back(neighbors_.size());
  }
}

std::uint32_t PcoMatrix::count(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) return 0;
  auto r = row(i);
  auto it = std::lower_bound(
      r.begin(), r.end(), j,
      [](const Neighbor& nb, std::size_t key) { return nb.index < key; });
  return (it != r.end() && it->index == j) ? it->count : 0;
}

PcoMatrix build_pco(const Dataset& dataset, Basis basis, unsigned threads) {
  // For basic entity i, walk every profile containing i (its transpose
  // profile) and count the other members of that profile.
  const bool items = basis == Basis::ItemBased;
  const auto& own = items ? dataset.item_profiles : dataset.user_profiles;
  const auto& contexts = items ? dataset.user_profiles : dataset.item_profiles;
  const std::size_t n = own.size();

  std::vector<std::vector<PcoMatrix::Neighbor>> rows(n);
  const unsigned workers = std::max(1u, threads);
  std::vector<std::vector<std::uint32_t>> scratch(
      workers, std::vector<std::uint32_t>(n, 0));
  std::vector<std::vector<std::uint32_t>> touched(workers);

  parallel_for(workers, workers, [&](std::size_t w) {
    auto& counts = scratch[w];
    auto& seen = touched[w];
    for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) {
      seen.clear();
      for (const ProfileEntry& ctx : own[i]) {
        for (const ProfileEntry& other : contexts[ctx.index]) {
          if (other.index == i) continue;
          if (counts[other.index]++ == 0) seen.push_back(other.index);
        }
      }
      auto& row = rows[i];
      row.reserve(seen.size());
      for (std::uint32_t j : seen) {
        row.push_back({j, counts[j]});
        counts[j] = 0;
      }
    }
  });
  return PcoMatrix(basis, std::move(rows));
}

double smooth(double x, LogBase base) {
  if (x > 1.0) return base == LogBase::Natural ? std::log(x) : std::log2(x);
  return x;
}

void write_pco(std::ostream& out, const PcoMatrix& pco) {
  for (std::size_t i = 0; i < pco.size(); ++i) {
    for (const auto& nb : pco.row(i)) {
      if (nb.index > i) out << i << '\t' << nb.index << '\t' << nb.count << '\n';
    }
  }
}

void write_pco_file(const std::filesystem::path& path, const PcoMatrix& pco) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_pco(out, pco);
}

PcoMatrix read_pco(std::istream& in, std::size_t n, Basis basis) {
  std::vector<std::vector<PcoMatrix::Neighbor>> rows(n);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = strip_cr(line);
    if (view.empty()) continue;
    auto fields = split_fields(view, '\t');
    long long i = 0, j = 0, c = 0;
    if (fields.size() != 3 || !parse_int(fields[0], i) ||
        !parse_int(fields[1], j) || !parse_int(fields[2], c)) {
      throw ParseError(line_no, "expected 'i<TAB>j<TAB>count'");
    }
    if (i < 0 || j < 0 || i >= j || static_cast<std::size_t>(j) >= n || c < 1) {
      throw ParseError(line_no, "pco entry out of range or not i < j");
    }
    auto count = static_cast<std::uint32_t>(c);
    rows[i].push_back({static_cast<std::uint32_t>(j), count});
    rows[j].push_back({static_cast<std::uint32_t>(i), count});
  }
  return PcoMatrix(basis, std::move(rows));
}

PcoMatrix read_pco_file(const std::filesystem::path& path, std::size_t n,
                        Basis basis) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_pco(in, n, basis);
}

}  // namespace gemrank
