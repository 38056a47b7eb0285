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

#include "gemrank/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "gemrank/error.hpp"
#include "gemrank/text_io.hpp"

namespace gemrank {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t to_size(const std::string& key, const std::string& value) {
  long long v = 0;
  if (!parse_int(value, v) || v < 0) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value +
                      "'");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
  }
  return v;
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_double(value, v)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::size_t> to_sizes(const std::string& key,
                                  const std::string& value) {
  std::vector<std::size_t> out;
  for (auto field : split_fields(value, ',')) out.push_back(to_size(key, trim(field)));
  return out;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(values[k]);
  }
  return s;
}

char to_delimiter(const std::string& key, const std::string& value) {
  if (value == "tab" || value == "\\t") return '\t';
  if (value == "comma") return ',';
  if (value == "space") return ' ';
  if (value == "pipe") return '|';
  if (value.size() == 1) return value[0];
  throw ConfigError(key + ": unsupported delimiter '" + value + "'");
}

std::string delimiter_name(char c) {
  switch (c) {
    case '\t':
      return "tab";
    case ',':
      return "comma";
    case ' ':
      return "space";
    case '|':
      return "pipe";
    default:
      return std::string(1, c);
  }
}

template <typename Parse>
auto wrap(const std::string& key, const std::string& value, Parse parse) {
  try {
    return parse(value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset.path", [](RunConfig& c, auto&, auto& v) { c.dataset_path = v; }},
      {"dataset.delimiter",
       [](RunConfig& c, auto& k, auto& v) { c.parse.delimiter = to_delimiter(k, v); }},
      {"dataset.r_max",
       [](RunConfig& c, auto& k, auto& v) {
         c.parse.r_max = static_cast<int>(to_size(k, v));
       }},
      {"split.upl", [](RunConfig& c, auto& k, auto& v) { c.pipeline.split.upl = to_size(k, v); }},
      {"split.min_test_items",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.split.min_test_items = to_size(k, v);
       }},
      {"pipeline.basis",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.basis = wrap(k, v, [](auto& s) { return parse_basis(s); });
       }},
      {"pipeline.variant",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.variant = wrap(k, v, [](auto& s) { return parse_variant(s); });
       }},
      {"pipeline.aggregation",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.aggregation =
             wrap(k, v, [](auto& s) { return parse_aggregation(s); });
       }},
      {"pipeline.l2_normalize",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.l2_normalize = to_bool(k, v); }},
      {"embedding.dim",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.embedding.dim = to_size(k, v); }},
      {"embedding.learning_rate",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.embedding.learning_rate = to_double(k, v);
       }},
      {"embedding.lr_decay",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.embedding.lr_decay = to_double(k, v);
       }},
      {"embedding.epochs",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.embedding.epochs = to_size(k, v); }},
      {"embedding.init_scale",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.embedding.init_scale = to_double(k, v);
       }},
      {"embedding.zero_pair_samples",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.embedding.zero_pair_samples_per_entity = to_size(k, v);
       }},
      {"embedding.representation",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.embedding.representation =
             wrap(k, v, [](auto& s) { return parse_representation(s); });
       }},
      {"embedding.log_base",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "natural" || v == "e") {
           c.pipeline.embedding.log_base = LogBase::Natural;
         } else if (v == "2") {
           c.pipeline.embedding.log_base = LogBase::Two;
         } else {
           throw ConfigError(k + ": expected natural or 2, got '" + v + "'");
         }
       }},
      {"mlp.hidden_candidates",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.mlp.hidden_candidates = to_sizes(k, v);
       }},
      {"mlp.dropout",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.mlp.dropout_rate = to_double(k, v); }},
      {"mlp.learning_rate",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.mlp.learning_rate = to_double(k, v);
       }},
      {"mlp.epochs",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.mlp.epochs = to_size(k, v); }},
      {"mlp.batch_size",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.mlp.batch_size = to_size(k, v); }},
      {"mlp.validation_fraction",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.mlp.validation_fraction = to_double(k, v);
       }},
      {"mlp.loss",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.mlp.loss = wrap(k, v, [](auto& s) { return parse_loss(s); });
       }},
      {"mlp.standardize_inputs",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.mlp.standardize_inputs = to_bool(k, v);
       }},
      {"eval.n_values",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.n_values = to_sizes(k, v); }},
      {"eval.repetitions",
       [](RunConfig& c, auto& k, auto& v) { c.pipeline.repetitions = to_size(k, v); }},
      {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.pipeline.seed = to_u64(k, v); }},
      {"run.out", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
      {"run.threads",
       [](RunConfig& c, auto& k, auto& v) {
         c.pipeline.threads = static_cast<unsigned>(std::max<std::size_t>(1, to_size(k, v)));
       }},
  };
  return table;
}

}  // namespace

ConfigValues parse_config_text(std::istream& in) {
  ConfigValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    std::string body = trim(view);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    values[key] = value;
  }
  return values;
}

ConfigValues parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config_text(in);
}

void apply_config(const ConfigValues& values, RunConfig& config) {
  const auto& table = setters();
  for (const auto& [key, value] : values) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(config, key, value);
  }
}

void write_config(std::ostream& out, const RunConfig& c) {
  const PipelineConfig& p = c.pipeline;
  const EmbeddingConfig& e = p.embedding;
  const MlpConfig& m = p.mlp;
  out << "dataset.path = " << c.dataset_path.string() << '\n'
      << "dataset.delimiter = " << delimiter_name(c.parse.delimiter) << '\n'
      << "dataset.r_max = " << c.parse.r_max << '\n'
      << "split.upl = " << p.split.upl << '\n'
      << "split.min_test_items = " << p.split.min_test_items << '\n'
      << "pipeline.basis = " << to_string(p.basis) << '\n'
      << "pipeline.variant = " << to_string(p.variant) << '\n'
      << "pipeline.aggregation = " << to_string(p.aggregation) << '\n'
      << "pipeline.l2_normalize = " << (p.l2_normalize ? "true" : "false") << '\n'
      << "embedding.dim = " << e.dim << '\n'
      << "embedding.learning_rate = " << format_double(e.learning_rate) << '\n'
      << "embedding.lr_decay = " << format_double(e.lr_decay) << '\n'
      << "embedding.epochs = " << e.epochs << '\n'
      << "embedding.init_scale = " << format_double(e.init_scale) << '\n'
      << "embedding.zero_pair_samples = " << e.zero_pair_samples_per_entity << '\n'
      << "embedding.representation = " << to_string(e.representation) << '\n'
      << "embedding.log_base = "
      << (e.log_base == LogBase::Natural ? "natural" : "2") << '\n'
      << "mlp.hidden_candidates = " << join(m.hidden_candidates) << '\n'
      << "mlp.dropout = " << format_double(m.dropout_rate) << '\n'
      << "mlp.learning_rate = " << format_double(m.learning_rate) << '\n'
      << "mlp.epochs = " << m.epochs << '\n'
      << "mlp.batch_size = " << m.batch_size << '\n'
      << "mlp.validation_fraction = " << format_double(m.validation_fraction) << '\n'
      << "mlp.loss = " << to_string(m.loss) << '\n'
      << "mlp.standardize_inputs = " << (m.standardize_inputs ? "true" : "false")
      << '\n'
      << "eval.n_values = " << join(p.n_values) << '\n'
      << "eval.repetitions = " << p.repetitions << '\n'
      << "run.seed = " << p.seed << '\n'
      << "run.out = " << c.out_dir.string() << '\n'
      << "run.threads = " << p.threads << '\n';
}

std::filesystem::path resolve_dataset_path(const RunConfig& config) {
  if (!config.dataset_path.empty()) return config.dataset_path;
  if (const char* dir = std::getenv("GEMRANK_DATA_DIR"); dir && *dir) {
    return std::filesystem::path(dir) / "u.data";
  }
  throw ConfigError(
      "no dataset path: set dataset.path, pass --data, or export "
      "GEMRANK_DATA_DIR");
}

}  // namespace gemrank
