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

#ifndef GEMRANK_CONFIG_HPP_
#define GEMRANK_CONFIG_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "gemrank/dataset.hpp"
#include "gemrank/pipeline.hpp"

namespace gemrank {

struct RunConfig {
  std::filesystem::path dataset_path;
  ParseOptions parse;
  PipelineConfig pipeline;
  std::filesystem::path out_dir = "gemrank-out";
};

using ConfigValues = std::map<std::string, std::string>;

// Flat "section.key = value" lines; '#' starts a comment. Throws ParseError
// on a line without '='.
ConfigValues parse_config_text(std::istream& in);
ConfigValues parse_config_file(const std::filesystem::path& path);

// Applies every value onto `config`. Unknown keys and bad values throw
// ConfigError naming the key.
void apply_config(const ConfigValues& values, RunConfig& config);

// Every key with its effective value, in a fixed order; parsing the output
// reproduces `config`.
void write_config(std::ostream& out, const RunConfig& config);

// dataset_path if set, else $GEMRANK_DATA_DIR/u.data.
std::filesystem::path resolve_dataset_path(const RunConfig& config);

}  // namespace gemrank

#endif  // GEMRANK_CONFIG_HPP_
