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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elec/data.hpp"

namespace elec {

struct TextualizedSample {
  std::uint64_t id = 0;
  std::string text;                  // "<Name> is <value>." segments
  std::optional<std::string> extra;  // passthrough text appended to `text`

  /// `text`, plus " " + extra when extra is present.
  std::string full() const;
};

/// Renders "Gender is female. Occupation is college student." from the raw
/// categorical values in schema order.
TextualizedSample textualize_sample(const Sample& sample, const FieldSchema& schema);

/// Writes "<id>\t<full text>\n" per sample in id order. Tabs and line breaks
/// inside a rendered text are replaced by spaces so each record stays on one
/// line. Returns the number of lines written.
std::size_t textualize_dataset(const Dataset& dataset, const std::filesystem::path& out_path);

struct TextRecord {
  std::uint64_t id = 0;
  std::string text;
};

/// Parses the textualize output format. Throws ParseError on malformed lines.
std::vector<TextRecord> read_text_records(const std::filesystem::path& path);

}  // namespace elec
