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

#include "elec/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <unordered_map>

#include "elec/error.hpp"
#include "elec/hash.hpp"
#include "elec/rng.hpp"

namespace elec {

namespace {

// Salt for feature hashing so ids do not coincide with hash_embed buckets.
constexpr std::uint64_t kFeatureHashSeed = 0x656c65632d666561ULL;  // "elec-fea"

std::string normalize(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

bool operator==(const FieldSpec& a, const FieldSpec& b) {
  return a.name == b.name && a.kind == b.kind && a.vocab_capacity == b.vocab_capacity;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.schema == b.schema && a.samples == b.samples;
}

void validate_schema(const FieldSchema& schema) {
  std::set<std::string> seen;
  std::size_t text_fields = 0;
  for (const auto& f : schema) {
    if (f.name.empty()) throw SchemaError("schema: field with empty name");
    if (f.name == kLabelColumn) throw SchemaError("schema: 'label' is reserved");
    if (!seen.insert(f.name).second) throw SchemaError("schema: duplicate field '" + f.name + "'");
    if (f.kind == FieldKind::text) {
      ++text_fields;
    } else if (f.vocab_capacity < 1) {
      throw SchemaError("schema: field '" + f.name + "' has vocab_capacity 0");
    }
  }
  if (categorical_count(schema) == 0) throw SchemaError("schema: no categorical field");
  if (text_fields > 1) throw SchemaError("schema: at most one text field is allowed");
}

std::size_t categorical_count(const FieldSchema& schema) {
  return static_cast<std::size_t>(std::count_if(schema.begin(), schema.end(), [](const FieldSpec& f) {
    return f.kind == FieldKind::categorical;
  }));
}

std::uint32_t encode_feature(std::string_view raw, std::uint32_t capacity) {
  return static_cast<std::uint32_t>(stable_hash(normalize(raw), kFeatureHashSeed) % capacity);
}

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError("csv: unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(cur));
  return true;
}

std::string csv_escape(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Dataset load_dataset(std::istream& in, const FieldSchema& schema) {
  validate_schema(schema);
  std::vector<std::string> header;
  if (!read_csv_record(in, header)) throw ParseError("csv: missing header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!column.emplace(header[i], i).second) {
      throw SchemaError("csv: duplicate column '" + header[i] + "'");
    }
  }

  auto require = [&](const std::string& name) {
    auto it = column.find(name);
    if (it == column.end()) throw SchemaError("csv: missing column '" + name + "'");
    return it->second;
  };

  std::vector<std::size_t> cat_cols;
  std::vector<std::uint32_t> caps;
  std::optional<std::size_t> text_col;
  std::set<std::string> known{std::string(kLabelColumn)};
  for (const auto& f : schema) {
    known.insert(f.name);
    if (f.kind == FieldKind::categorical) {
      cat_cols.push_back(require(f.name));
      caps.push_back(f.vocab_capacity);
    } else {
      text_col = require(f.name);
    }
  }
  const std::size_t label_col = require(std::string(kLabelColumn));
  if (!text_col) {
    if (auto it = column.find(std::string(kExtraTextColumn)); it != column.end()) {
      text_col = it->second;
      known.insert(std::string(kExtraTextColumn));
    }
  }
  for (const auto& h : header) {
    if (!known.contains(h)) throw SchemaError("csv: unknown column '" + h + "'");
  }

  Dataset ds;
  ds.schema = schema;
  std::vector<std::string> rec;
  std::size_t row = 0;
  while (read_csv_record(in, rec)) {
    ++row;
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    if (rec.size() != header.size()) {
      throw ParseError("csv: row " + std::to_string(row) + " has " + std::to_string(rec.size()) +
                       " columns, expected " + std::to_string(header.size()));
    }
    Sample s;
    s.id = ds.samples.size();
    s.key = s.id;
    const std::string& lab = rec[label_col];
    if (lab == "0") {
      s.label = 0;
    } else if (lab == "1") {
      s.label = 1;
    } else {
      throw ParseError("csv: row " + std::to_string(row) + ": label must be 0 or 1, got '" + lab + "'");
    }
    s.features.reserve(cat_cols.size());
    s.raw.reserve(cat_cols.size());
    for (std::size_t f = 0; f < cat_cols.size(); ++f) {
      s.raw.push_back(rec[cat_cols[f]]);
      s.features.push_back(encode_feature(s.raw.back(), caps[f]));
    }
    if (text_col) s.extra_text = rec[*text_col];
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const FieldSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return load_dataset(in, schema);
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset '" + path.string() + "'");
  std::string text_name;
  for (const auto& f : dataset.schema) {
    if (f.kind == FieldKind::categorical) out << csv_escape(f.name) << ',';
    else text_name = f.name;
  }
  const bool has_text = std::any_of(dataset.samples.begin(), dataset.samples.end(),
                                    [](const Sample& s) { return s.extra_text.has_value(); });
  if (text_name.empty() && has_text) text_name = std::string(kExtraTextColumn);
  if (!text_name.empty()) out << csv_escape(text_name) << ',';
  out << kLabelColumn << '\n';
  for (const auto& s : dataset.samples) {
    for (const auto& v : s.raw) out << csv_escape(v) << ',';
    if (!text_name.empty()) out << csv_escape(s.extra_text.value_or("")) << ',';
    out << static_cast<int>(s.label) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::size_t> split_permutation(std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));
  return perm;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.schema = dataset.schema;
  out.samples.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= dataset.size()) throw IndexError("subset: index out of range");
    Sample s = dataset.samples[idx];
    s.id = out.samples.size();
    out.samples.push_back(std::move(s));
  }
  return out;
}

Splits split(const Dataset& dataset, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0) {
    throw ConfigError("split: ratios must be non-negative");
  }
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split: ratios must sum to 1");
  }
  const std::size_t m = dataset.size();
  const auto perm = split_permutation(m, seed);
  const auto cut1 = static_cast<std::size_t>(std::floor(static_cast<double>(m) * ratios.train));
  const auto cut2 = std::min(
      m, static_cast<std::size_t>(std::floor(static_cast<double>(m) * (ratios.train + ratios.val))));
  const auto c1 = std::min(cut1, cut2);
  Splits out;
  out.train = subset(dataset, {perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(c1)});
  out.val = subset(dataset, {perm.begin() + static_cast<std::ptrdiff_t>(c1),
                             perm.begin() + static_cast<std::ptrdiff_t>(cut2)});
  out.test = subset(dataset, {perm.begin() + static_cast<std::ptrdiff_t>(cut2), perm.end()});
  return out;
}

std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size,
                           std::optional<std::uint64_t> shuffle_seed) {
  if (batch_size < 1) throw ConfigError("batches: batch_size must be >= 1");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    rng.shuffle(std::span<std::size_t>(order));
  }
  std::vector<Batch> out;
  for (std::size_t b = 0; b < order.size(); b += batch_size) {
    const std::size_t e = std::min(order.size(), b + batch_size);
    out.push_back(Batch{{order.begin() + static_cast<std::ptrdiff_t>(b),
                         order.begin() + static_cast<std::ptrdiff_t>(e)}});
  }
  return out;
}

TabularBatch gather(const Dataset& dataset, const Batch& batch) {
  TabularBatch tb;
  tb.n = batch.size();
  tb.fields = categorical_count(dataset.schema);
  tb.ids.reserve(tb.n * tb.fields);
  tb.keys.reserve(tb.n);
  for (std::size_t idx : batch.indices) {
    if (idx >= dataset.size()) throw IndexError("batch index out of range");
    const Sample& s = dataset.samples[idx];
    tb.ids.insert(tb.ids.end(), s.features.begin(), s.features.end());
    tb.keys.push_back(s.key);
  }
  return tb;
}

TabularBatch gather_all(const Dataset& dataset) {
  Batch all;
  all.indices.resize(dataset.size());
  std::iota(all.indices.begin(), all.indices.end(), std::size_t{0});
  return gather(dataset, all);
}

std::vector<std::uint8_t> labels_of(const Dataset& dataset, const Batch& batch) {
  std::vector<std::uint8_t> y;
  y.reserve(batch.size());
  for (std::size_t idx : batch.indices) y.push_back(dataset.samples.at(idx).label);
  return y;
}

}  // namespace elec
