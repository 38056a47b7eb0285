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

#ifndef GEMRANK_DATASET_HPP_
#define GEMRANK_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gemrank {

struct RatingRecord {
  std::string user_id;
  std::string item_id;
  int rating = 0;
  std::int64_t timestamp = 0;  // parsed, never used downstream

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

struct ParseOptions {
  char delimiter = '\t';
  int r_max = 5;
};

// One entry of a profile: the other entity's index and the rating.
struct ProfileEntry {
  std::uint32_t index = 0;
  int rating = 0;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

struct Rating {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  int rating = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

using Profile = std::vector<ProfileEntry>;

// Indexed rating log. user_profiles and item_profiles are transposes of each
// other and both follow the order of `ratings`.
struct Dataset {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  int r_max = 5;
  std::vector<Rating> ratings;
  std::vector<Profile> user_profiles;
  std::vector<Profile> item_profiles;
  // External identifiers by dense index.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  // Builds both profile tables from `ratings`. Throws gemrank::Error on an
  // out-of-range index or a duplicate (user, item) pair.
  static Dataset from_ratings(std::vector<std::string> user_ids,
                              std::vector<std::string> item_ids,
                              std::vector<Rating> ratings, int r_max);
};

// Reads delimiter-separated `user item rating [timestamp]` lines. Blank lines
// are skipped; a repeated (user, item) pair keeps the last rating at the
// position of its first occurrence. Throws ParseError with the line number.
std::vector<RatingRecord> parse_ratings(std::istream& in,
                                        const ParseOptions& options = {});
std::vector<RatingRecord> parse_ratings_file(const std::filesystem::path& path,
                                             const ParseOptions& options = {});

// Dense 0-based indices in order of first appearance.
Dataset index_dataset(const std::vector<RatingRecord>& records, int r_max = 5);

struct SplitConfig {
  std::size_t upl = 10;
  std::size_t min_test_items = 10;
  std::uint64_t seed = 0;
};

struct TrainTestSplit {
  // Shares the index spaces of the source dataset; only included users have
  // train ratings.
  Dataset train;
  std::vector<Profile> test;  // by user index, empty for excluded users
  std::vector<std::uint32_t> included_users;
};

// Users with fewer than upl + min_test_items ratings are dropped. Each kept
// user contributes exactly upl ratings, drawn uniformly without replacement,
// to train; the rest go to test. Throws SplitError if nobody qualifies.
TrainTestSplit split_upl(const Dataset& dataset, const SplitConfig& config);

// Split directory layout: train.tsv, test.tsv (user item rating, external
// ids), users.tsv and items.tsv (index<TAB>external id).
void write_split(const std::filesystem::path& dir, const TrainTestSplit& split);
TrainTestSplit read_split(const std::filesystem::path& dir, int r_max = 5);

}  // namespace gemrank

#endif  // GEMRANK_DATASET_HPP_
