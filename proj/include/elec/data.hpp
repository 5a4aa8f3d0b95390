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

#pragma once

// Tabular CTR records: schema, CSV ingestion, seeded splitting, and
// mini-batch iteration.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elec {

enum class FieldKind { categorical, text };

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::categorical;
  std::uint32_t vocab_capacity = 1;  // hashing bucket count; unused for text
};

/// Ordered field list. A schema has at least one categorical field and at
/// most one text field; the text field's column feeds Sample::extra_text.
using FieldSchema = std::vector<FieldSpec>;

/// Throws SchemaError on empty/duplicate names, zero capacity, no
/// categorical field, or more than one text field.
void validate_schema(const FieldSchema& schema);

std::size_t categorical_count(const FieldSchema& schema);

/// Name of the column holding optional raw text when the schema declares no
/// text field.
inline constexpr std::string_view kExtraTextColumn = "extra_text";
inline constexpr std::string_view kLabelColumn = "label";

struct Sample {
  std::uint64_t id = 0;   // position within its dataset
  std::uint64_t key = 0;  // row in the originating file; indexes the embedding store
  std::vector<std::uint32_t> features;  // one id per categorical field
  std::vector<std::string> raw;         // raw values, same order as features
  std::optional<std::string> extra_text;
  std::uint8_t label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  FieldSchema schema;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

bool operator==(const FieldSpec& a, const FieldSpec& b);
bool operator==(const Dataset& a, const Dataset& b);

struct Batch {
  std::vector<std::size_t> indices;
  std::size_t size() const { return indices.size(); }
};

/// Lowercases and trims `raw`, then hashes it into [0, capacity).
std::uint32_t encode_feature(std::string_view raw, std::uint32_t capacity);

/// Parses one CSV record (RFC 4180 quoting). Returns false at end of input.
/// Quoted fields may span lines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

std::string csv_escape(std::string_view value);

Dataset load_dataset(std::istream& in, const FieldSchema& schema);
Dataset load_dataset(const std::filesystem::path& path, const FieldSchema& schema);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Seeded permutation followed by contiguous cuts at floor(M*r1) and
/// floor(M*(r1+r2)). Each part is renumbered 0..k-1 in permutation order;
/// Sample::key keeps the original row.
Splits split(const Dataset& dataset, SplitRatios ratios, std::uint64_t seed);

/// The permutation used by split(), exposed for manifests.
std::vector<std::size_t> split_permutation(std::size_t m, std::uint64_t seed);

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices);

std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size,
                           std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Row-major [n x fields] categorical ids for one batch; the only input the
/// tabular models see.
struct TabularBatch {
  std::size_t n = 0;
  std::size_t fields = 0;
  std::vector<std::uint32_t> ids;
  std::vector<std::uint64_t> keys;

  std::uint32_t at(std::size_t row, std::size_t field) const {
    return ids[row * fields + field];
  }
};

TabularBatch gather(const Dataset& dataset, const Batch& batch);
TabularBatch gather_all(const Dataset& dataset);

std::vector<std::uint8_t> labels_of(const Dataset& dataset, const Batch& batch);

}  // namespace elec
