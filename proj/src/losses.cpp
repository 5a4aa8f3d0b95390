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

#include "elec/losses.hpp"

#include <cmath>
#include <string>

#include "elec/error.hpp"

namespace elec {

namespace {

bool inside(double p, double eps) { return p >= eps && p <= 1.0 - eps; }

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw DomainError("probability clamp eps must lie in (0, 0.5)");
}

}  // namespace

double clamp_prob(double p, double eps) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability " + std::to_string(p) + " outside [0, 1]");
  if (p < eps) return eps;
  if (p > 1.0 - eps) return 1.0 - eps;
  return p;
}

ListwiseDistribution listwise(std::span<const double> p, double eps) {
  check_eps(eps);
  if (p.empty()) throw DomainError("listwise: empty batch");
  ListwiseDistribution d;
  d.q.reserve(p.size());
  double sum = 0.0;
  for (double v : p) {
    d.q.push_back(clamp_prob(v, eps));
    sum += d.q.back();
  }
  for (double& q : d.q) q /= sum;
  return d;
}

double bce_loss(std::span<const double> p, std::span<const std::uint8_t> y, double eps,
                std::vector<double>* grad_p) {
  check_eps(eps);
  if (p.size() != y.size()) throw DimensionError("bce_loss: size mismatch");
  if (p.empty()) throw DomainError("bce_loss: empty batch");
  const double n = static_cast<double>(p.size());
  if (grad_p) grad_p->assign(p.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] > 1) throw DomainError("bce_loss: label must be 0 or 1");
    const double pc = clamp_prob(p[i], eps);
    if (y[i] == 1) {
      sum += std::log(pc);
      if (grad_p && inside(p[i], eps)) (*grad_p)[i] = -1.0 / (n * pc);
    } else {
      sum += std::log(1.0 - pc);
      if (grad_p && inside(p[i], eps)) (*grad_p)[i] = 1.0 / (n * (1.0 - pc));
    }
  }
  return -sum / n;
}

double clid_loss(std::span<const double> p_teacher, std::span<const double> p_student, double eps,
                 std::vector<double>* grad_student) {
  if (p_teacher.size() != p_student.size()) throw DimensionError("clid_loss: size mismatch");
  const auto qt = listwise(p_teacher, eps);
  const auto qs = listwise(p_student, eps);
  const std::size_t count = p_student.size();
  const double n = static_cast<double>(count);

  double sum_s = 0.0;
  for (double v : p_student) sum_s += clamp_prob(v, eps);

  double loss = 0.0;
  double qt_total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    loss += qt.q[i] * std::log(qs.q[i]);
    qt_total += qt.q[i];
  }
  if (grad_student) {
    // d/dp_k of -(1/N) sum_i Qt_i (log p_k - log S) = -(1/N) (Qt_k / p_k - sum(Qt) / S)
    grad_student->assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      if (!inside(p_student[k], eps)) continue;
      const double pk = clamp_prob(p_student[k], eps);
      (*grad_student)[k] = -(qt.q[k] / pk - qt_total / sum_s) / n;
    }
  }
  return -loss / n;
}

double clid_lower_bound(std::span<const double> p_teacher, double eps) {
  const auto qt = listwise(p_teacher, eps);
  double s = 0.0;
  for (double q : qt.q) s += q * std::log(q);
  return -s / static_cast<double>(qt.q.size());
}

double rep_loss(const Matrix& h_teacher, const Matrix& h_student, Matrix* grad_student) {
  if (h_teacher.rows != h_student.rows || h_teacher.cols != h_student.cols) {
    throw DimensionError("rep_loss: shape mismatch");
  }
  if (h_student.rows == 0) throw DomainError("rep_loss: empty batch");
  const double n = static_cast<double>(h_student.rows);
  if (grad_student) *grad_student = Matrix(h_student.rows, h_student.cols);
  double sum = 0.0;
  for (std::size_t i = 0; i < h_student.data.size(); ++i) {
    const double d = h_student.data[i] - h_teacher.data[i];
    sum += d * d;
    if (grad_student) grad_student->data[i] = 2.0 * d / n;
  }
  return sum / n;
}

}  // namespace elec
