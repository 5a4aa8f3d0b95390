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

#include "elec/checkpoint.hpp"

#include <fstream>

#include "elec/binio.hpp"
#include "elec/error.hpp"

namespace elec {

const TensorRecord& Checkpoint::find(const std::string& name) const {
  for (const auto& r : records) {
    if (r.name == name) return r;
  }
  throw FormatError("checkpoint '" + tag + "': no tensor named '" + name + "'");
}

const std::string& Checkpoint::meta_at(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw FormatError("checkpoint '" + tag + "': missing metadata '" + key + "'");
  return it->second;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(kCheckpointMagic, 4);
  binio::put_uint<std::uint32_t>(out, kCheckpointVersion);
  binio::put_string(out, ckpt.tag);
  binio::put_uint(out, static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    binio::put_string(out, k);
    binio::put_string(out, v);
  }
  binio::put_uint(out, static_cast<std::uint32_t>(ckpt.records.size()));
  for (const auto& r : ckpt.records) {
    binio::put_string(out, r.name);
    binio::put_uint(out, static_cast<std::uint32_t>(r.shape.size()));
    for (auto d : r.shape) binio::put_uint<std::uint64_t>(out, d);
    binio::put_uint<std::uint8_t>(out, r.frozen ? 1 : 0);
    for (float f : r.values) binio::put_f32(out, f);
  }
  out.flush();
  if (!out) throw IoError("write failed for checkpoint '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw FormatError("'" + path.string() + "' is not a checkpoint (bad magic)");
  }
  const auto version = binio::get_uint<std::uint32_t>(in, "checkpoint version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) + " is not supported");
  }
  Checkpoint ckpt;
  ckpt.tag = binio::get_string(in, "checkpoint tag");
  const auto nmeta = binio::get_uint<std::uint32_t>(in, "metadata count");
  for (std::uint32_t i = 0; i < nmeta; ++i) {
    auto k = binio::get_string(in, "metadata key");
    ckpt.meta[k] = binio::get_string(in, "metadata value");
  }
  const auto nrec = binio::get_uint<std::uint32_t>(in, "record count");
  for (std::uint32_t i = 0; i < nrec; ++i) {
    TensorRecord r;
    r.name = binio::get_string(in, "tensor name");
    const auto ndim = binio::get_uint<std::uint32_t>(in, "tensor rank");
    if (ndim > 8) throw CorruptionError("tensor '" + r.name + "': implausible rank");
    std::uint64_t count = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      r.shape.push_back(binio::get_uint<std::uint64_t>(in, "tensor dims"));
      count *= r.shape.back();
    }
    if (count > (std::uint64_t{1} << 34)) throw CorruptionError("tensor '" + r.name + "': implausible size");
    r.frozen = binio::get_uint<std::uint8_t>(in, "frozen flag") != 0;
    r.values.resize(count);
    for (auto& f : r.values) f = binio::get_f32(in, "tensor values");
    ckpt.records.push_back(std::move(r));
  }
  return ckpt;
}

void append_params(Checkpoint& ckpt, std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    TensorRecord r;
    r.name = p->name;
    r.shape.assign(p->shape.begin(), p->shape.end());
    r.frozen = p->frozen;
    r.values.reserve(p->size());
    for (double v : p->values) r.values.push_back(static_cast<float>(v));
    ckpt.records.push_back(std::move(r));
  }
}

void restore_params(const Checkpoint& ckpt, std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    const auto& r = ckpt.find(p->name);
    if (r.shape.size() != p->shape.size() || !std::equal(r.shape.begin(), r.shape.end(), p->shape.begin())) {
      throw FormatError("checkpoint tensor '" + p->name + "': shape mismatch");
    }
    for (std::size_t i = 0; i < p->size(); ++i) p->values[i] = static_cast<double>(r.values[i]);
    p->frozen = r.frozen;
    p->zero_grad();
  }
}

}  // namespace elec
