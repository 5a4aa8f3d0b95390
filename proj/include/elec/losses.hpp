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

// Training objectives. Each loss optionally writes its gradient with respect
// to the student-side input; teacher inputs are treated as constants.
// Probabilities are clamped to [eps, 1 - eps] before any log, and the clamp
// passes zero gradient outside that interval.

#include <cstdint>
#include <span>
#include <vector>

#include "elec/nn.hpp"

namespace elec {

inline constexpr double kDefaultProbEps = 1e-7;

/// Throws DomainError unless 0 <= p <= 1.
double clamp_prob(double p, double eps = kDefaultProbEps);

/// Batch-normalized score distribution q_i = p_i / sum_j p_j (after clamping).
struct ListwiseDistribution {
  std::vector<double> q;
};

ListwiseDistribution listwise(std::span<const double> p, double eps = kDefaultProbEps);

/// -(1/N) sum (y log p + (1 - y) log(1 - p)). `grad_p` receives dL/dp.
double bce_loss(std::span<const double> p, std::span<const std::uint8_t> y,
                double eps = kDefaultProbEps, std::vector<double>* grad_p = nullptr);

/// -(1/N) sum_i Qt_i log Qs_i with Q = listwise(.). The teacher scores are
/// constants; `grad_student` receives dL/dp_student.
double clid_loss(std::span<const double> p_teacher, std::span<const double> p_student,
                 double eps = kDefaultProbEps, std::vector<double>* grad_student = nullptr);

/// -(1/N) sum_i Qt_i log Qt_i, the minimum of clid_loss over student scores.
double clid_lower_bound(std::span<const double> p_teacher, double eps = kDefaultProbEps);

/// (1/N) sum_i ||student_i - teacher_i||^2. `grad_student` receives
/// dL/dstudent.
double rep_loss(const Matrix& h_teacher, const Matrix& h_student, Matrix* grad_student = nullptr);

}  // namespace elec
