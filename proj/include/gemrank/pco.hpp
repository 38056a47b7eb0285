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

#ifndef GEMRANK_PCO_HPP_
#define GEMRANK_PCO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "gemrank/dataset.hpp"

namespace gemrank {

enum class Basis { ItemBased, UserBased };

std::string_view to_string(Basis basis);
Basis parse_basis(std::string_view text);

// Number of basic entities of `dataset` under `basis`.
std::size_t basic_entity_count(const Dataset& dataset, Basis basis);

// Sparse symmetric profile co-occurrence counts, stored in CSR form with both
// orientations present. The diagonal is never stored and every stored count
// is at least 1.
class PcoMatrix {
 public:
  struct Neighbor {
    std::uint32_t index;
    std::uint32_t count;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
  };

  PcoMatrix() = default;
  // `rows[i]` lists (j, count) for j != i. Caller guarantees symmetry;
  // neighbours are sorted here.
  PcoMatrix(Basis basis, std::vector<std::vector<Neighbor>> rows);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  Basis basis() const { return basis_; }

  // Stored (i, j) entries, counting both orientations.
  std::size_t stored_entries() const { return neighbors_.size(); }
  bool empty() const { return neighbors_.empty(); }

  std::span<const Neighbor> row(std::size_t i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  // P_ij, 0 when absent or i == j.
  std::uint32_t count(std::size_t i, std::size_t j) const;

  friend bool operator==(const PcoMatrix&, const PcoMatrix&) = default;

 private:
  Basis basis_ = Basis::ItemBased;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> neighbors_;
};

// ItemBased: P_ij = number of users whose profile holds both items i and j.
// UserBased: P_ij = number of items rated by both users i and j.
// Rows are counted independently, so `threads` never changes the result.
PcoMatrix build_pco(const Dataset& dataset, Basis basis, unsigned threads = 1);

enum class LogBase { Natural, Two };

// ln(x) for x > 1, x otherwise.
double smooth(double x, LogBase base = LogBase::Natural);

// Canonical dump: "i<TAB>j<TAB>count" for i < j, lexicographic order.
void write_pco(std::ostream& out, const PcoMatrix& pco);
void write_pco_file(const std::filesystem::path& path, const PcoMatrix& pco);
PcoMatrix read_pco(std::istream& in, std::size_t n, Basis basis);
PcoMatrix read_pco_file(const std::filesystem::path& path, std::size_t n,
                        Basis basis);

}  // namespace gemrank

#endif  // GEMRANK_PCO_HPP_
