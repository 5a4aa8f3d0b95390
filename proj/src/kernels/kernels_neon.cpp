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

// AArch64 only; Advanced SIMD is architecturally guaranteed there.

#include "elec/kernels.hpp"

#include <arm_neon.h>

namespace elec::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  float64x2_t acc2 = vdupq_n_f64(0.0);
  float64x2_t acc3 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc2 = vfmaq_f64(acc2, vld1q_f64(a + i + 4), vld1q_f64(b + i + 4));
    acc3 = vfmaq_f64(acc3, vld1q_f64(a + i + 6), vld1q_f64(b + i + 6));
  }
  for (; i + 2 <= n; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(vaddq_f64(vaddq_f64(acc0, acc1), vaddq_f64(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void dot_rows(const double* x, const double* w, std::size_t ld,
              std::size_t rows, std::size_t n, double* out) {
  std::size_t r = 0;
  for (; r + 2 <= rows; r += 2) {
    const double* w0 = w + r * ld;
    const double* w1 = w0 + ld;
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const float64x2_t xv = vld1q_f64(x + i);
      a0 = vfmaq_f64(a0, xv, vld1q_f64(w0 + i));
      a1 = vfmaq_f64(a1, xv, vld1q_f64(w1 + i));
    }
    double s0 = vaddvq_f64(a0), s1 = vaddvq_f64(a1);
    for (; i < n; ++i) {
      s0 += x[i] * w0[i];
      s1 += x[i] * w1[i];
    }
    out[r] = s0;
    out[r + 1] = s1;
  }
  for (; r < rows; ++r) out[r] = dot(x, w + r * ld, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) y[i] += a[i] * b[i];
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{Isa::neon, &dot, &dot_rows, &axpy, &mul_acc};
  return t;
}

}  // namespace elec::kernels
