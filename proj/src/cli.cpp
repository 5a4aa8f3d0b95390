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

#include "elec/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include "elec/bench.hpp"
#include "elec/checkpoint.hpp"
#include "elec/mllm.hpp"
#include "elec/siamese.hpp"
#include "elec/synthetic.hpp"
#include "elec/textualize.hpp"

namespace elec {

namespace fs = std::filesystem;

int exit_code_for(Error::Category category) {
  switch (category) {
    case Error::Category::config: return kExitConfig;
    case Error::Category::data: return kExitData;
    case Error::Category::io: return kExitIo;
    case Error::Category::internal: return kExitOther;
  }
  return kExitOther;
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  return f;
}

void echo_config(const RunConfig& c, std::string_view command) {
  ensure_dir(c.output_dir);
  open_out(c.output_dir / (std::string(command) + ".config")) << config_to_text(c);
}

void require_schema(const RunConfig& c) {
  if (c.schema.empty()) throw ConfigError("config 'schema' is not set");
  validate_schema(c.schema);
}

struct Loaded {
  Dataset full;
  Splits parts;
};

Loaded load_data(const RunConfig& c) {
  require_schema(c);
  if (!fs::exists(c.data_path)) throw IoError("data file '" + c.data_path.string() + "' does not exist");
  Loaded d;
  d.full = load_dataset(c.data_path, c.schema);
  d.parts = split(d.full, c.split, c.split_seed);
  return d;
}

TextEmbeddingStore open_store(const RunConfig& c, const Dataset& full) {
  TextEmbeddingStore store;
  if (c.store_mode == StoreMode::hash) {
    if (c.hash_dim == 0) throw ConfigError("config 'store.hash_dim' must be >= 1");
    store = build_hash_store(full, c.hash_dim, c.hash_seed);
  } else {
    if (!fs::exists(c.store_path)) {
      throw BindingError("embedding store '" + c.store_path.string() + "' does not exist");
    }
    store = TextEmbeddingStore::load(c.store_path);
  }
  store.check_covers(full);
  return store;
}

MllmAdapter load_adapter(const RunConfig& c) {
  const fs::path p = c.adapter_path();
  if (!fs::exists(p)) throw IoError("adapter checkpoint '" + p.string() + "' does not exist (run train-mllm)");
  auto adapter = MllmAdapter::from_checkpoint(read_checkpoint(p));
  adapter.set_frozen(true);
  return adapter;
}

const Dataset& pick_split(const Loaded& d, std::string_view split) {
  if (split == "train") return d.parts.train;
  if (split == "val") return d.parts.val;
  if (split == "test") return d.parts.test;
  if (split == "all") return d.full;
  throw ConfigError("unknown split '" + std::string(split) + "' (expected train, val, test or all)");
}

void write_manifest(const fs::path& path, const Dataset& part) {
  auto f = open_out(path);
  for (const auto& s : part.samples) f << s.key << '\n';
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

bool parse_rating(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string fmt_double(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

PrepareSummary cmd_prepare(const fs::path& raw, const RunConfig& c, std::ostream& log) {
  require_schema(c);
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw IoError("cannot open raw file '" + raw.string() + "'");
  ensure_dir(c.output_dir);
  echo_config(c, "prepare");

  // Output columns follow the schema, then label.
  std::vector<std::string> out_cols;
  for (const auto& f : c.schema) out_cols.push_back(f.name);

  PrepareSummary sum;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  if (read_csv_record(in, header)) {
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) column.emplace(header[i], i);
    auto require = [&](const std::string& name) {
      auto it = column.find(name);
      if (it == column.end()) throw SchemaError("raw file: missing column '" + name + "'");
      return it->second;
    };
    std::vector<std::size_t> src;
    for (const auto& name : out_cols) src.push_back(require(name));
    const std::size_t rating_col = require(c.rating_column);

    std::vector<std::string> rec;
    while (read_csv_record(in, rec)) {
      if (rec.size() == 1 && rec[0].empty()) continue;
      ++sum.rows;
      double rating = 0.0;
      if (rec.size() != header.size() || !parse_rating(rec[rating_col], rating)) {
        ++sum.malformed;
        continue;
      }
      std::vector<std::string> row;
      row.reserve(src.size() + 1);
      for (std::size_t i : src) row.push_back(rec[i]);
      const bool pos = rating > c.rating_threshold;
      row.push_back(pos ? "1" : "0");
      sum.positives += pos ? 1 : 0;
      rows.push_back(std::move(row));
    }
  }
  sum.written = rows.size();
  log << "prepare: rows=" << sum.rows << " written=" << sum.written << " malformed=" << sum.malformed
      << " positives=" << sum.positives << '\n';
  if (sum.rows > 0 &&
      static_cast<double>(sum.malformed) > c.max_bad_fraction * static_cast<double>(sum.rows)) {
    throw ParseError("prepare: " + std::to_string(sum.malformed) + " of " + std::to_string(sum.rows) +
                     " rows malformed, above prepare.max_bad_fraction=" + fmt_double("%g", c.max_bad_fraction));
  }

  const fs::path data_out = c.output_dir / "data.csv";
  {
    auto f = open_out(data_out);
    for (const auto& name : out_cols) f << csv_escape(name) << ',';
    f << kLabelColumn << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << csv_escape(row[i]);
      f << '\n';
    }
    if (!f) throw IoError("write failed for '" + data_out.string() + "'");
  }
  const Dataset full = load_dataset(data_out, c.schema);
  const Splits parts = split(full, c.split, c.split_seed);
  write_manifest(c.output_dir / "split_train.txt", parts.train);
  write_manifest(c.output_dir / "split_val.txt", parts.val);
  write_manifest(c.output_dir / "split_test.txt", parts.test);
  return sum;
}

std::size_t cmd_textualize(const RunConfig& c) {
  const Loaded d = load_data(c);
  echo_config(c, "textualize");
  return textualize_dataset(d.full, c.output_dir / "text.tsv");
}

void cmd_train_mllm(const RunConfig& c, std::ostream& log) {
  const Loaded d = load_data(c);
  const TextEmbeddingStore store = open_store(c, d.full);
  echo_config(c, "train-mllm");
  MllmConfig mc;
  mc.input_dim = store.dim();
  mc.dims = c.adapter_dims;
  auto res = train_mllm(d.parts.train, store, mc, c.mllm);
  const fs::path ckpt = c.adapter_path();
  if (ckpt.has_parent_path()) ensure_dir(ckpt.parent_path());
  write_checkpoint(res.adapter.to_checkpoint(), ckpt);
  auto f = open_out(c.output_dir / "mllm_loss.log");
  for (std::size_t e = 0; e < res.epoch_loss.size(); ++e) {
    const std::string line = "epoch=" + std::to_string(e + 1) + " loss=" + fmt_double("%.6f", res.epoch_loss[e]);
    f << line << '\n';
    log << line << '\n';
  }
}

void cmd_train(const RunConfig& c, std::ostream& log) {
  const Loaded d = load_data(c);
  MllmAdapter adapter = load_adapter(c);
  const TextEmbeddingStore store = open_store(c, d.full);
  echo_config(c, "train");
  auto res = train_joint(d.parts.train, d.parts.val, store, adapter, c.collab, c.train);
  write_checkpoint(res.gain.to_checkpoint(), c.output_dir / "gain.ckpt");
  write_checkpoint(res.vanilla.to_checkpoint(), c.output_dir / "vanilla.ckpt");
  auto f = open_out(c.output_dir / "metrics.log");
  for (const auto& m : res.trace) {
    const std::string line = format_metrics_line(m);
    f << line << '\n';
    log << line << '\n';
  }
  log << "best_gain_epoch=" << res.best_gain_epoch << " best_vanilla_epoch=" << res.best_vanilla_epoch << '\n';
}

EvalReport cmd_eval(const RunConfig& c, const fs::path& checkpoint, std::string_view split_name) {
  const Loaded d = load_data(c);
  const Dataset& part = pick_split(d, split_name);
  const Checkpoint ckpt = read_checkpoint(checkpoint);
  std::vector<double> scores;
  if (ckpt.tag == "vanilla") {
    scores = predict_vanilla(VanillaNetwork::from_checkpoint(ckpt), part);
  } else if (ckpt.tag == "gain") {
    const auto net = GainNetwork::from_checkpoint(ckpt);
    const MllmAdapter adapter = load_adapter(c);
    const TextEmbeddingStore store = open_store(c, d.full);
    scores = predict_gain(net, LiveRepresentations(store, adapter), part);
  } else if (ckpt.tag == "adapter") {
    const auto adapter = MllmAdapter::from_checkpoint(ckpt);
    const TextEmbeddingStore store = open_store(c, d.full);
    scores = mllm_predict(adapter, store, part);
  } else {
    throw FormatError("checkpoint tag '" + ckpt.tag + "' is not evaluable");
  }
  std::vector<std::uint8_t> labels;
  labels.reserve(part.size());
  for (const auto& s : part.samples) labels.push_back(s.label);
  EvalReport r = evaluate(labels, scores);
  r.model = ckpt.tag;
  r.split = std::string(split_name);
  ensure_dir(c.output_dir);
  open_out(c.output_dir / ("eval_" + ckpt.tag + "_" + r.split + ".txt")) << format_report_line(r) << '\n';
  return r;
}

EvalReport cmd_bench(const RunConfig& c, const fs::path& checkpoint) {
  const Loaded d = load_data(c);
  const Checkpoint ckpt = read_checkpoint(checkpoint);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < std::min(c.bench_samples, d.parts.test.size()); ++i) idx.push_back(i);
  if (idx.empty()) throw ConfigError("bench: no test samples (check split.ratios and bench.samples)");
  const Dataset part = subset(d.parts.test, idx);
  const TabularBatch batch = gather_all(part);

  std::vector<double> scores;
  LatencyStats st;
  if (ckpt.tag == "vanilla") {
    const auto net = VanillaNetwork::from_checkpoint(ckpt);
    // The store is only opened to observe it; vanilla never needs one.
    std::optional<TextEmbeddingStore> observed;
    if (c.store_mode == StoreMode::hash || fs::exists(c.store_path)) observed = open_store(c, d.full);
    st = bench_inference(net, batch, c.bench_repetitions, observed ? &*observed : nullptr);
    scores = infer_vanilla(net, batch);
  } else if (ckpt.tag == "gain") {
    const auto net = GainNetwork::from_checkpoint(ckpt);
    const MllmAdapter adapter = load_adapter(c);
    const TextEmbeddingStore store = open_store(c, d.full);
    st = bench_inference(net, batch, store, adapter, c.bench_repetitions);
    scores = net.forward(batch, LiveRepresentations(store, adapter)).p;
  } else {
    throw FormatError("checkpoint tag '" + ckpt.tag + "' cannot be benchmarked");
  }
  std::vector<std::uint8_t> labels;
  for (const auto& s : part.samples) labels.push_back(s.label);
  EvalReport r = evaluate(labels, scores);
  r.model = ckpt.tag;
  r.split = "test";
  r.latency = st;
  ensure_dir(c.output_dir);
  open_out(c.output_dir / ("bench_" + ckpt.tag + ".txt")) << format_report(r);
  return r;
}

std::string cmd_synth(const fs::path& out_csv, std::uint64_t seed, std::size_t n_train, std::size_t n_val,
                      std::size_t n_test) {
  SyntheticConfig sc;
  sc.seed = seed;
  sc.n_train = n_train;
  sc.n_val = n_val;
  sc.n_test = n_test;
  const auto data = make_synthetic(sc);
  if (out_csv.has_parent_path()) ensure_dir(out_csv.parent_path());
  write_dataset(data.full, out_csv);
  return format_schema(data.full.schema);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"elec: CTR training and inference with a distilled text channel", "elec"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("-c,--config", config_path, "key = value config file");
  app.add_option("--set", sets, "override one key, e.g. --set train.epochs=2 (repeatable)");

  auto* prepare = app.add_subcommand("prepare", "rated raw CSV -> data.csv + split manifests");
  std::string raw_path;
  prepare->add_option("--input", raw_path, "raw CSV with a rating column")->required();

  app.add_subcommand("textualize", "data.csv -> text.tsv");
  app.add_subcommand("train-mllm", "stage 1: fit the adapter on the embedding store");
  app.add_subcommand("train", "stage 2: joint gain/vanilla training");

  auto* eval = app.add_subcommand("eval", "AUC / LogLoss of a checkpoint on a split");
  std::string ckpt_path;
  std::string split_name = "test";
  eval->add_option("--checkpoint", ckpt_path, "gain, vanilla or adapter checkpoint")->required();
  eval->add_option("--split", split_name, "train | val | test | all")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "per-sample inference latency and store reads");
  bench->add_option("--checkpoint", ckpt_path, "gain or vanilla checkpoint")->required();

  auto* synth = app.add_subcommand("synth", "write a generated dataset");
  std::string synth_out = "data.csv";
  std::uint64_t synth_seed = 1;
  std::size_t n_train = 50000, n_val = 5000, n_test = 10000;
  synth->add_option("--output", synth_out)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--train", n_train)->capture_default_str();
  synth->add_option("--val", n_val)->capture_default_str();
  synth->add_option("--test", n_test)->capture_default_str();

  app.add_subcommand("config", "print the resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) c = load_config(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      set_config_value(c, std::string_view(s).substr(0, eq), std::string_view(s).substr(eq + 1));
    }
    c.train.validate();

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "prepare") {
      cmd_prepare(raw_path, c, out);
    } else if (cmd == "textualize") {
      out << "textualize: lines=" << cmd_textualize(c) << '\n';
    } else if (cmd == "train-mllm") {
      cmd_train_mllm(c, out);
    } else if (cmd == "train") {
      cmd_train(c, out);
    } else if (cmd == "eval") {
      out << format_report(cmd_eval(c, ckpt_path, split_name));
    } else if (cmd == "bench") {
      out << format_report(cmd_bench(c, ckpt_path));
    } else if (cmd == "synth") {
      out << "schema = " << cmd_synth(synth_out, synth_seed, n_train, n_val, n_test) << '\n';
    } else if (cmd == "config") {
      out << config_to_text(c);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace elec
