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

// Double-precision inner loops used by every dense primitive.
//
// Each instruction set provides the same table of kernels. The scalar table
// is the reference; vector tables must agree with it to rounding (they use
// fused multiply-add and a different summation tree). The active table is
// chosen once per process from the CPU and the ELEC_KERNELS environment
// variable ("scalar", "avx2", "neon", or "auto"), so a given binary on a
// given machine always reduces in the same order.

#include <cstddef>
#include <string_view>
#include <vector>

namespace elec::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[r] = dot(x, w + r * ld) for r in [0, rows)
  void (*dot_rows)(const double* x, const double* w, std::size_t ld,
                   std::size_t rows, std::size_t n, double* out);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[i] += a[i] * b[i]
  void (*mul_acc)(const double* a, const double* b, double* y, std::size_t n);
};

std::string_view isa_name(Isa isa);

/// Compiled in and supported by the running CPU.
bool supported(Isa isa);

std::vector<Isa> supported_isas();

/// Throws ConfigError when `isa` is not supported.
const KernelTable& table(Isa isa);

/// The process-wide table. Resolved on first use.
const KernelTable& active();

/// Overrides the process-wide table. Intended for tests and benchmarks;
/// callers must not race it against running kernels.
void select(Isa isa);

// Per-ISA tables, defined in their own translation units.
const KernelTable& scalar_table();
#if defined(ELEC_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(ELEC_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace elec::kernels
