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

#include "elec/textualize.hpp"

#include <cctype>
#include <charconv>
#include <fstream>

#include "elec/error.hpp"

namespace elec {

std::string TextualizedSample::full() const {
  if (!extra) return text;
  if (text.empty()) return *extra;
  return text + " " + *extra;
}

TextualizedSample textualize_sample(const Sample& sample, const FieldSchema& schema) {
  TextualizedSample out;
  out.id = sample.id;
  std::size_t f = 0;
  for (const auto& spec : schema) {
    if (spec.kind != FieldKind::categorical) continue;
    if (f >= sample.raw.size()) throw DimensionError("textualize: sample has fewer raw values than fields");
    std::string name = spec.name;
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (!out.text.empty()) out.text.push_back(' ');
    out.text += name;
    out.text += " is ";
    out.text += sample.raw[f];
    out.text.push_back('.');
    ++f;
  }
  out.extra = sample.extra_text;
  return out;
}

std::size_t textualize_dataset(const Dataset& dataset, const std::filesystem::path& out_path) {
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + out_path.string() + "'");
  for (const auto& s : dataset.samples) {
    std::string text = textualize_sample(s, dataset.schema).full();
    for (char& c : text) {
      if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    out << s.id << '\t' << text << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for '" + out_path.string() + "'");
  return dataset.size();
}

std::vector<TextRecord> read_text_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<TextRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("text file line " + std::to_string(lineno) + ": missing tab");
    }
    TextRecord r;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, r.id);
    if (ec != std::errc{} || ptr != line.data() + tab) {
      throw ParseError("text file line " + std::to_string(lineno) + ": bad id");
    }
    r.text = line.substr(tab + 1);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace elec
