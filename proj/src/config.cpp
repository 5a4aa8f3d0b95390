// Copyright 2026 The ELEC Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "elec/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "elec/error.hpp"

namespace elec {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("config '" + std::string(key) + "': expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigError("config '" + std::string(key) + "': expected a number, got '" + s + "'");
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::filesystem::path RunConfig::adapter_path() const {
  return adapter_checkpoint.empty() ? output_dir / "adapter.ckpt" : adapter_checkpoint;
}

FieldSchema parse_schema(std::string_view text) {
  FieldSchema schema;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view entry = trim(text.substr(0, comma));
    if (!entry.empty()) {
      const auto c1 = entry.find(':');
      if (c1 == std::string_view::npos) throw ConfigError("schema entry '" + std::string(entry) + "' lacks a kind");
      FieldSpec f;
      f.name = std::string(trim(entry.substr(0, c1)));
      const std::string_view rest = entry.substr(c1 + 1);
      const auto c2 = rest.find(':');
      const std::string_view kind = trim(rest.substr(0, c2));
      if (kind == "text") {
        f.kind = FieldKind::text;
        if (c2 != std::string_view::npos) throw ConfigError("schema: text field '" + f.name + "' takes no capacity");
      } else if (kind == "cat") {
        if (c2 == std::string_view::npos) throw ConfigError("schema: field '" + f.name + "' needs a capacity");
        const auto cap = to_u64("schema", trim(rest.substr(c2 + 1)));
        if (cap == 0 || cap > 0xffffffffULL) throw ConfigError("schema: field '" + f.name + "' capacity out of range");
        f.vocab_capacity = static_cast<std::uint32_t>(cap);
      } else {
        throw ConfigError("schema: unknown kind '" + std::string(kind) + "' (expected cat or text)");
      }
      schema.push_back(std::move(f));
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return schema;
}

std::string format_schema(const FieldSchema& schema) {
  std::string s;
  for (const auto& f : schema) {
    if (!s.empty()) s += ",";
    s += f.name;
    s += f.kind == FieldKind::text ? ":text" : ":cat:" + std::to_string(f.vocab_capacity);
  }
  return s;
}

void set_config_value(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  const std::string k(trim(key));
  if (k == "data.path") c.data_path = std::string(v);
  else if (k == "schema") c.schema = parse_schema(v);
  else if (k == "split.ratios") {
    const std::string s(v);
    double a = 0, b = 0, d = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf , %lf , %lf %c", &a, &b, &d, &tail) != 3) {
      throw ConfigError("config 'split.ratios': expected three comma-separated fractions");
    }
    c.split = {a, b, d};
  }
  else if (k == "split.seed") c.split_seed = to_u64(k, v);
  else if (k == "collab.variant") c.collab.variant = parse_variant(v);
  else if (k == "collab.embedding_dim") c.collab.embedding_dim = to_u64(k, v);
  else if (k == "collab.deep_dims") c.collab.deep_dims = parse_sizes(v);
  else if (k == "collab.cross_layers") c.collab.cross_layers = to_u64(k, v);
  else if (k == "adapter.dims") c.adapter_dims = parse_sizes(v);
  else if (k == "adapter.checkpoint") c.adapter_checkpoint = std::string(v);
  else if (k == "store.mode") {
    if (v == "file") c.store_mode = StoreMode::file;
    else if (v == "hash") c.store_mode = StoreMode::hash;
    else throw ConfigError("config 'store.mode': expected file or hash");
  }
  else if (k == "store.path") c.store_path = std::string(v);
  else if (k == "store.hash_dim") c.hash_dim = to_u64(k, v);
  else if (k == "store.hash_seed") c.hash_seed = to_u64(k, v);
  else if (k == "mllm.epochs") c.mllm.epochs = to_u64(k, v);
  else if (k == "mllm.batch_size") c.mllm.batch_size = to_u64(k, v);
  else if (k == "mllm.lr") c.mllm.adam.lr = to_double(k, v);
  else if (k == "mllm.seed") {
    c.mllm.init_seed = to_u64(k, v);
    c.mllm.shuffle_seed = c.mllm.init_seed + 1;
  }
  else if (k == "train.alpha") c.train.alpha = to_double(k, v);
  else if (k == "train.lr") c.train.adam.lr = to_double(k, v);
  else if (k == "train.batch_size") c.train.batch_size = to_u64(k, v);
  else if (k == "train.epochs") c.train.epochs = to_u64(k, v);
  else if (k == "train.seed") {
    c.train.init_seed = to_u64(k, v);
    c.train.shuffle_seed = c.train.init_seed + 1;
  }
  else if (k == "train.prob_eps") c.train.prob_eps = c.mllm.prob_eps = to_double(k, v);
  else if (k == "output.dir") c.output_dir = std::string(v);
  else if (k == "prepare.rating_column") c.rating_column = std::string(v);
  else if (k == "prepare.rating_threshold") c.rating_threshold = to_double(k, v);
  else if (k == "prepare.max_bad_fraction") c.max_bad_fraction = to_double(k, v);
  else if (k == "bench.repetitions") c.bench_repetitions = to_u64(k, v);
  else if (k == "bench.samples") c.bench_samples = to_u64(k, v);
  else throw ConfigError("unknown config key '" + k + "'");
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    ++lineno;
    if (!line.empty() && line.front() != '#') {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    }
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  apply_config_text(c, ss.str());
  return c;
}

std::map<std::string, std::string> config_to_map(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["data.path"] = c.data_path.string();
  m["schema"] = format_schema(c.schema);
  m["split.ratios"] = num(c.split.train) + "," + num(c.split.val) + "," + num(c.split.test);
  m["split.seed"] = std::to_string(c.split_seed);
  m["collab.variant"] = std::string(variant_name(c.collab.variant));
  m["collab.embedding_dim"] = std::to_string(c.collab.embedding_dim);
  m["collab.deep_dims"] = join_sizes(c.collab.deep_dims);
  m["collab.cross_layers"] = std::to_string(c.collab.cross_layers);
  m["adapter.dims"] = join_sizes(c.adapter_dims);
  m["adapter.checkpoint"] = c.adapter_path().string();
  m["store.mode"] = c.store_mode == StoreMode::file ? "file" : "hash";
  m["store.path"] = c.store_path.string();
  m["store.hash_dim"] = std::to_string(c.hash_dim);
  m["store.hash_seed"] = std::to_string(c.hash_seed);
  m["mllm.epochs"] = std::to_string(c.mllm.epochs);
  m["mllm.batch_size"] = std::to_string(c.mllm.batch_size);
  m["mllm.lr"] = num(c.mllm.adam.lr);
  m["mllm.seed"] = std::to_string(c.mllm.init_seed);
  m["train.alpha"] = num(c.train.alpha);
  m["train.lr"] = num(c.train.adam.lr);
  m["train.batch_size"] = std::to_string(c.train.batch_size);
  m["train.epochs"] = std::to_string(c.train.epochs);
  m["train.seed"] = std::to_string(c.train.init_seed);
  m["train.prob_eps"] = num(c.train.prob_eps);
  m["output.dir"] = c.output_dir.string();
  m["prepare.rating_column"] = c.rating_column;
  m["prepare.rating_threshold"] = num(c.rating_threshold);
  m["prepare.max_bad_fraction"] = num(c.max_bad_fraction);
  m["bench.repetitions"] = std::to_string(c.bench_repetitions);
  m["bench.samples"] = std::to_string(c.bench_samples);
  return m;
}

std::string config_to_text(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : config_to_map(c)) s += k + " = " + v + "\n";
  return s;
}

}  // namespace elec
