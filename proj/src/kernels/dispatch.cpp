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

#include <atomic>
#include <cstdlib>
#include <string>

#include "elec/error.hpp"
#include "elec/kernels.hpp"

namespace elec::kernels {
namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(ELEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(ELEC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& resolve() {
  const char* env = std::getenv("ELEC_KERNELS");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return table(Isa::scalar);
  if (want == "avx2") return table(Isa::avx2);
  if (want == "neon") return table(Isa::neon);
  if (want != "auto" && !want.empty()) {
    throw ConfigError("ELEC_KERNELS: unknown value '" + want + "'");
  }
  if (cpu_has(Isa::avx2)) return table(Isa::avx2);
  if (cpu_has(Isa::neon)) return table(Isa::neon);
  return scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) { return cpu_has(isa); }

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (supported(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& table(Isa isa) {
  if (!cpu_has(isa)) {
    throw ConfigError("kernel set '" + std::string(isa_name(isa)) +
                      "' is not available on this machine");
  }
  switch (isa) {
#if defined(ELEC_HAVE_AVX2)
    case Isa::avx2: return avx2_table();
#endif
#if defined(ELEC_HAVE_NEON)
    case Isa::neon: return neon_table();
#endif
    default: return scalar_table();
  }
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &resolve();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void select(Isa isa) { g_active.store(&table(isa), std::memory_order_release); }

}  // namespace elec::kernels
