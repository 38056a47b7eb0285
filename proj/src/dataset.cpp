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

#include "gemrank/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "gemrank/error.hpp"
#include "gemrank/rng.hpp"
#include "gemrank/text_io.hpp"

namespace gemrank {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint32_t intern(const std::string& id,
                     std::unordered_map<std::string, std::uint32_t>& lookup,
                     std::vector<std::string>& ids) {
  auto [it, inserted] =
      lookup.try_emplace(id, static_cast<std::uint32_t>(ids.size()));
  if (inserted) ids.push_back(id);
  return it->second;
}

}  // namespace

Dataset Dataset::from_ratings(std::vector<std::string> user_ids,
                              std::vector<std::string> item_ids,
                              std::vector<Rating> ratings, int r_max) {
  Dataset d;
  d.num_users = user_ids.size();
  d.num_items = item_ids.size();
  d.r_max = r_max;
  d.user_ids = std::move(user_ids);
  d.item_ids = std::move(item_ids);
  d.user_profiles.resize(d.num_users);
  d.item_profiles.resize(d.num_items);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(ratings.size());
  for (const Rating& r : ratings) {
    if (r.user >= d.num_users || r.item >= d.num_items) {
      throw Error("rating refers to an unknown user or item index");
    }
    if (!seen.insert(pair_key(r.user, r.item)).second) {
      throw Error("duplicate (user, item) pair in dataset");
    }
    d.user_profiles[r.user].push_back({r.item, r.rating});
    d.item_profiles[r.item].push_back({r.user, r.rating});
  }
  d.ratings = std::move(ratings);
  return d;
}

std::vector<RatingRecord> parse_ratings(std::istream& in,
                                        const ParseOptions& options) {
  std::vector<RatingRecord> records;
  std::unordered_map<std::string, std::size_t> position;  // "user\0item"
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = strip_cr(line);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto fields = split_fields(view, options.delimiter);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(line_no, "expected 3 or 4 fields, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_no, "empty user or item id");
    }
    long long rating = 0;
    if (!parse_int(fields[2], rating)) {
      throw ParseError(line_no, "non-numeric rating '" +
                                    std::string(fields[2]) + "'");
    }
    if (rating < 1 || rating > options.r_max) {
      throw ParseError(line_no, "rating " + std::to_string(rating) +
                                    " outside [1, " +
                                    std::to_string(options.r_max) + "]");
    }
    long long timestamp = 0;
    if (fields.size() == 4 && !parse_int(fields[3], timestamp)) {
      throw ParseError(line_no, "non-numeric timestamp");
    }
    RatingRecord record{std::string(fields[0]), std::string(fields[1]),
                        static_cast<int>(rating), timestamp};
    std::string key = record.user_id + '\0' + record.item_id;
    auto [it, inserted] = position.try_emplace(std::move(key), records.size());
    if (inserted) {
      records.push_back(std::move(record));
    } else {
      records[it->second] = std::move(record);
    }
  }
  return records;
}

std::vector<RatingRecord> parse_ratings_file(const std::filesystem::path& path,
                                             const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ratings file " + path.string());
  return parse_ratings(in, options);
}

Dataset index_dataset(const std::vector<RatingRecord>& records, int r_max) {
  if (records.empty()) throw Error("cannot index an empty rating log");
  std::unordered_map<std::string, std::uint32_t> user_lookup, item_lookup;
  std::vector<std::string> user_ids, item_ids;
  std::vector<Rating> ratings;
  ratings.reserve(records.size());
  for (const RatingRecord& rec : records) {
    std::uint32_t u = intern(rec.user_id, user_lookup, user_ids);
    std::uint32_t i = intern(rec.item_id, item_lookup, item_ids);
    ratings.push_back({u, i, rec.rating});
  }
  return Dataset::from_ratings(std::move(user_ids), std::move(item_ids),
                               std::move(ratings), r_max);
}

TrainTestSplit split_upl(const Dataset& dataset, const SplitConfig& config) {
  if (config.upl < 1 || config.min_test_items < 1) {
    throw SplitError("upl and min_test_items must both be at least 1");
  }
  Rng rng(config.seed);
  TrainTestSplit split;
  split.test.resize(dataset.num_users);
  std::vector<Rating> train;
  for (std::uint32_t u = 0; u < dataset.num_users; ++u) {
    const Profile& profile = dataset.user_profiles[u];
    if (profile.size() < config.upl + config.min_test_items) continue;
    Profile shuffled = profile;
    rng.shuffle(shuffled);
    // Keep each half in original profile order so downstream sums do not
    // depend on the draw order.
    Profile chosen(shuffled.begin(), shuffled.begin() + config.upl);
    Profile rest(shuffled.begin() + config.upl, shuffled.end());
    auto by_item = [](const ProfileEntry& a, const ProfileEntry& b) {
      return a.index < b.index;
    };
    std::sort(chosen.begin(), chosen.end(), by_item);
    std::sort(rest.begin(), rest.end(), by_item);
    for (const ProfileEntry& e : chosen) train.push_back({u, e.index, e.rating});
    split.test[u] = std::move(rest);
    split.included_users.push_back(u);
  }
  if (split.included_users.empty()) {
    throw SplitError("no user has at least " +
                     std::to_string(config.upl + config.min_test_items) +
                     " ratings");
  }
  split.train = Dataset::from_ratings(dataset.user_ids, dataset.item_ids,
                                      std::move(train), dataset.r_max);
  return split;
}

namespace {

void write_ids(const std::filesystem::path& path,
               const std::vector<std::string>& ids) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < ids.size(); ++i) out << i << '\t' << ids[i] << '\n';
}

std::vector<std::string> read_ids(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(strip_cr(line), '\t');
    long long index = 0;
    if (fields.size() != 2 || !parse_int(fields[0], index) ||
        index != static_cast<long long>(ids.size())) {
      throw ParseError(line_no, "malformed index map in " + path.string());
    }
    ids.emplace_back(fields[1]);
  }
  return ids;
}

std::unordered_map<std::string, std::uint32_t> invert(
    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::uint32_t> lookup;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    lookup.emplace(ids[i], static_cast<std::uint32_t>(i));
  }
  return lookup;
}

}  // namespace

void write_split(const std::filesystem::path& dir, const TrainTestSplit& split) {
  std::filesystem::create_directories(dir);
  const Dataset& d = split.train;
  write_ids(dir / "users.tsv", d.user_ids);
  write_ids(dir / "items.tsv", d.item_ids);
  std::ofstream train(dir / "train.tsv");
  for (const Rating& r : d.ratings) {
    train << d.user_ids[r.user] << '\t' << d.item_ids[r.item] << '\t'
          << r.rating << '\n';
  }
  std::ofstream test(dir / "test.tsv");
  for (std::uint32_t u : split.included_users) {
    for (const ProfileEntry& e : split.test[u]) {
      test << d.user_ids[u] << '\t' << d.item_ids[e.index] << '\t' << e.rating
           << '\n';
    }
  }
  if (!train || !test) throw Error("failed writing split to " + dir.string());
}

TrainTestSplit read_split(const std::filesystem::path& dir, int r_max) {
  std::vector<std::string> user_ids = read_ids(dir / "users.tsv");
  std::vector<std::string> item_ids = read_ids(dir / "items.tsv");
  auto users = invert(user_ids);
  auto items = invert(item_ids);
  auto resolve = [&](const RatingRecord& rec) {
    auto u = users.find(rec.user_id);
    auto i = items.find(rec.item_id);
    if (u == users.end() || i == items.end()) {
      throw Error("split file refers to an id missing from the index maps");
    }
    return Rating{u->second, i->second, rec.rating};
  };
  ParseOptions options{'\t', r_max};
  std::vector<Rating> train;
  for (const auto& rec : parse_ratings_file(dir / "train.tsv", options)) {
    train.push_back(resolve(rec));
  }
  TrainTestSplit split;
  split.train = Dataset::from_ratings(std::move(user_ids), std::move(item_ids),
                                      std::move(train), r_max);
  split.test.resize(split.train.num_users);
  for (const auto& rec : parse_ratings_file(dir / "test.tsv", options)) {
    Rating r = resolve(rec);
    split.test[r.user].push_back({r.item, r.rating});
  }
  for (std::uint32_t u = 0; u < split.train.num_users; ++u) {
    if (!split.train.user_profiles[u].empty()) split.included_users.push_back(u);
  }
  return split;
}

}  // namespace gemrank
