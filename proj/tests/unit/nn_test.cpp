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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "elec/error.hpp"
#include "elec/nn.hpp"
#include "test_util.hpp"

namespace elec {
namespace {

double weighted_sum(const Matrix& y, const Matrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * c.data[i];
  return s;
}

DenseLayer eye2(Activation act) {
  DenseLayer d("d", 2, 2, act);
  d.weight().values = {1, 0, 0, 1};
  d.bias().values = {0, 0};
  return d;
}

TEST(Dense, ZeroWeightsIdentityGivesZero) {
  DenseLayer d("d", 3, 2, Activation::identity);
  Matrix x(1, 3);
  x.data = {1, 2, 3};
  EXPECT_EQ(d.forward(x).data, (std::vector<double>{0, 0}));
}

TEST(Dense, IdentityWeightRelu) {
  Matrix x(1, 2);
  x.data = {-1, 2};
  EXPECT_EQ(eye2(Activation::relu).forward(x).data, (std::vector<double>{0, 2}));
}

TEST(Dense, SigmoidHandCase) {
  DenseLayer d("d", 2, 1, Activation::sigmoid);
  d.weight().values = {1, 1};
  d.bias().values = {0.5};
  Matrix x(1, 2);
  EXPECT_NEAR(d.forward(x)(0, 0), 1.0 / (1.0 + std::exp(-0.5)), 1e-15);
  EXPECT_NEAR(d.forward(x)(0, 0), 0.622459, 1e-6);
}

TEST(Dense, ZeroUpstreamGivesZeroGrads) {
  Rng rng(1);
  DenseLayer d("d", 3, 4, Activation::sigmoid);
  d.init(rng);
  const Matrix x = test::random_matrix(5, 3, rng);
  const Matrix y = d.forward(x);
  const Matrix dx = d.backward(x, y, Matrix(5, 4));
  for (double v : dx.data) EXPECT_EQ(v, 0.0);
  for (double v : d.weight().grad) EXPECT_EQ(v, 0.0);
  for (double v : d.bias().grad) EXPECT_EQ(v, 0.0);
}

TEST(Dense, IdentityEyePassesGradientThrough) {
  Rng rng(2);
  auto d = eye2(Activation::identity);
  const Matrix x = test::random_matrix(3, 2, rng);
  const Matrix dy = test::random_matrix(3, 2, rng);
  EXPECT_EQ(d.backward(x, d.forward(x), dy).data, dy.data);
}

TEST(Dense, DimensionMismatchThrows) {
  DenseLayer d("d", 3, 2, Activation::identity);
  EXPECT_THROW(d.forward(Matrix(1, 4)), DimensionError);
}

class DenseFd : public ::testing::TestWithParam<Activation> {};

TEST_P(DenseFd, MatchesFiniteDifferences) {
  Rng rng(3);
  DenseLayer d("d", 4, 3, GetParam());
  d.init(rng);
  test::randomize(d.params(), rng);
  Matrix x = test::random_matrix(5, 4, rng);
  const Matrix c = test::random_matrix(5, 3, rng);
  Matrix dx;
  auto loss = [&] { return weighted_sum(d.forward(x), c); };
  auto params = d.params();
  EXPECT_LT(test::fd_max_rel_error(params, loss, [&] { dx = d.backward(x, d.forward(x), c); }), 1e-6);

  // Input gradient, element by element.
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double o = x.data[i];
    x.data[i] = o + 1e-5;
    const double lp = loss();
    x.data[i] = o - 1e-5;
    const double lm = loss();
    x.data[i] = o;
    const double num = (lp - lm) / 2e-5;
    EXPECT_LT(std::abs(dx.data[i] - num) / std::max({std::abs(num), std::abs(dx.data[i]), 1e-4}), 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, DenseFd,
                         ::testing::Values(Activation::identity, Activation::relu, Activation::sigmoid));

TEST(Sigmoid, StaysStrictlyInsideUnitInterval) {
  for (double x : {-1e6, -800.0, -40.0, 0.0, 40.0, 800.0, 1e6}) {
    const double s = sigmoid(x);
    EXPECT_GT(s, 0.0) << x;
    EXPECT_LT(s, 1.0) << x;
  }
  EXPECT_EQ(sigmoid(0.0), 0.5);
}

TEST(Mlp, ShapesAndFiniteDifferences) {
  Rng rng(4);
  Mlp m("m", 5, {7, 4, 2}, Activation::relu, Activation::sigmoid);
  m.init(rng);
  EXPECT_EQ(m.in_dim(), 5u);
  EXPECT_EQ(m.out_dim(), 2u);
  EXPECT_EQ(m.depth(), 3u);
  const Matrix x = test::random_matrix(6, 5, rng);
  const Matrix c = test::random_matrix(6, 2, rng);
  auto params = m.params();
  auto loss = [&] { return weighted_sum(m.forward(x).output(), c); };
  EXPECT_LT(test::fd_max_rel_error(params, loss, [&] { m.backward(m.forward(x), c, false); }), 1e-6);
}

TEST(Embedding, LookupReturnsRows) {
  EmbeddingTable e("e", 4, 3);
  e.table().values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const std::uint32_t ids[] = {0, 2};
  const Matrix m = e.lookup(ids);
  EXPECT_EQ(m.data, (std::vector<double>{1, 2, 3, 7, 8, 9}));
  const std::uint32_t bad[] = {4};
  EXPECT_THROW(e.lookup(bad), IndexError);
}

TEST(Embedding, DuplicateIdsAccumulate) {
  EmbeddingTable e("e", 3, 2);
  const std::uint32_t ids[] = {1, 1, 0};
  Matrix dy(3, 2);
  dy.data = {1, 2, 10, 20, 5, 6};
  e.scatter_grad(ids, dy);
  EXPECT_EQ(e.table().grad, (std::vector<double>{5, 6, 11, 22, 0, 0}));
}

TEST(Embedding, FiniteDifferences) {
  Rng rng(5);
  EmbeddingTable e("e", 6, 3);
  e.init(rng);
  const std::uint32_t ids[] = {1, 4, 1, 0};
  const Matrix c = test::random_matrix(4, 3, rng);
  std::vector<Parameter*> params{&e.table()};
  auto loss = [&] {
    const Matrix m = e.lookup(ids);
    double s = 0;
    for (std::size_t i = 0; i < m.data.size(); ++i) s += std::sin(m.data[i]) * c.data[i];
    return s;
  };
  auto backward = [&] {
    const Matrix m = e.lookup(ids);
    Matrix dy(4, 3);
    for (std::size_t i = 0; i < m.data.size(); ++i) dy.data[i] = std::cos(m.data[i]) * c.data[i];
    e.scatter_grad(ids, dy);
  };
  EXPECT_LT(test::fd_max_rel_error(params, loss, backward), 1e-6);
}

TEST(AveragePool, Cases) {
  EXPECT_EQ(average_pool(std::vector<std::vector<double>>{{3, 4}}), (std::vector<double>{3, 4}));
  EXPECT_EQ(average_pool(std::vector<std::vector<double>>{{0, 0}, {2, 4}}), (std::vector<double>{1, 2}));
  Rng rng(6);
  std::vector<std::vector<double>> v(3, std::vector<double>(5));
  for (auto& r : v)
    for (double& x : r) x = rng.uniform(-3, 3);
  const auto p = average_pool(v);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(p[i], (v[0][i] + v[1][i] + v[2][i]) / 3.0, 1e-12);
  EXPECT_THROW(average_pool(std::vector<std::vector<double>>{}), DomainError);
  EXPECT_THROW(average_pool(std::vector<std::vector<double>>{{1, 2}, {3}}), DimensionError);
}

TEST(Adam, FirstStepHandCase) {
  Parameter p("theta", {1});
  p.values = {0.0};
  p.grad = {1.0};
  Adam opt({&p}, AdamConfig{1e-3, 0.9, 0.999, 1e-8});
  opt.step();
  // m_hat = 1, v_hat = 1 after bias correction: theta = -lr * 1 / (1 + eps).
  EXPECT_LT(std::abs(p.values[0] + 0.001), 1e-8);
  EXPECT_EQ(p.grad[0], 0.0);
  EXPECT_EQ(opt.t(), 1u);
}

TEST(Adam, ZeroGradsLeaveParametersUnchanged) {
  Rng rng(7);
  Parameter p("p", {4});
  for (double& v : p.values) v = rng.normal();
  const auto before = p.values;
  Adam opt({&p});
  for (int i = 0; i < 3; ++i) opt.step();
  EXPECT_TRUE(test::bitwise_equal(p.values, before));
}

TEST(Adam, FrozenParameterIsBitwiseUnchanged) {
  Rng rng(8);
  Parameter p("p", {5}), q("q", {5});
  for (double& v : p.values) v = rng.normal();
  p.frozen = true;
  const auto before = p.values;
  Adam opt({&p, &q});
  for (int i = 0; i < 10; ++i) {
    for (double& g : p.grad) g = rng.normal();
    for (double& g : q.grad) g = rng.normal();
    opt.step();
  }
  EXPECT_TRUE(test::bitwise_equal(p.values, before));
  for (double g : p.grad) EXPECT_EQ(g, 0.0);
}

TEST(Adam, TrainingIsBitwiseDeterministic) {
  auto run = [] {
    Rng rng(9);
    Mlp m("m", 3, {4, 1}, Activation::relu, Activation::sigmoid);
    m.init(rng);
    Adam opt(m.params());
    const Matrix x = test::random_matrix(8, 3, rng);
    for (int step = 0; step < 20; ++step) {
      const auto tr = m.forward(x);
      Matrix dy(8, 1);
      for (std::size_t i = 0; i < 8; ++i) dy(i, 0) = tr.output()(i, 0) - (i % 2 ? 1.0 : 0.0);
      m.backward(tr, dy, false);
      opt.step();
    }
    return test::snapshot(m.params());
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(test::bitwise_equal(a[i], b[i]));
}

TEST(Glorot, BoundsAndZeroBias) {
  Rng rng(10);
  DenseLayer d("d", 30, 20, Activation::relu);
  d.init(rng);
  const double lim = std::sqrt(6.0 / 50.0);
  for (double w : d.weight().values) {
    EXPECT_LE(std::abs(w), lim);
  }
  for (double b : d.bias().values) EXPECT_EQ(b, 0.0);
}

TEST(GradCheck, LinearFunctionIsExact) {
  Parameter p("p", {3});
  p.values = {0.3, -1.2, 2.0};
  const std::vector<double> c = {1.5, -2.0, 0.25};
  std::vector<Parameter*> params{&p};
  auto loss = [&] { return c[0] * p.values[0] + c[1] * p.values[1] + c[2] * p.values[2]; };
  auto backward = [&] { p.grad = c; };
  const auto r = grad_check(params, loss, backward);
  EXPECT_LT(r.max_rel_error, 1e-9);
  EXPECT_EQ(r.checked, 3u);
}

TEST(GradCheck, DetectsWrongGradient) {
  Parameter p("p", {2});
  p.values = {1.0, 2.0};
  std::vector<Parameter*> params{&p};
  auto loss = [&] { return p.values[0] * p.values[0] + p.values[1]; };
  auto backward = [&] { p.grad = {2.0 * p.values[0], 2.0}; };
  const auto r = grad_check(params, loss, backward);
  EXPECT_GT(r.max_rel_error, 0.4);
  EXPECT_EQ(r.worst_param, "p");
  EXPECT_EQ(r.worst_index, 1u);
}

TEST(GradCheck, SubsamplesCoordinates) {
  Parameter p("p", {100});
  std::vector<Parameter*> params{&p};
  auto loss = [&] {
    double s = 0;
    for (double v : p.values) s += v;
    return s;
  };
  auto backward = [&] { std::fill(p.grad.begin(), p.grad.end(), 1.0); };
  GradCheckOptions o;
  o.max_coords_per_param = 10;
  EXPECT_EQ(grad_check(params, loss, backward, o).checked, 10u);
}

}  // namespace
}  // namespace elec
