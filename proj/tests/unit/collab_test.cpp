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

#include <map>

#include "elec/collab.hpp"
#include "elec/error.hpp"
#include "test_util.hpp"

namespace elec {
namespace {

CollabConfig tiny(CollabVariant v = CollabVariant::dcnv2, std::size_t cross = 2) {
  CollabConfig c;
  c.embedding_dim = 3;
  c.deep_dims = {6, 4};
  c.cross_layers = cross;
  c.variant = v;
  return c;
}

TEST(CrossFormula, ZeroWeightsIsIdentity) {
  const std::vector<double> x0{1, -2, 3}, xl{0.5, 4, -1}, b(3, 0.0);
  EXPECT_EQ(cross_layer(x0, xl, Matrix(3, 3), b), xl);
}

TEST(CrossFormula, EyeHandCase) {
  Matrix w(2, 2);
  w(0, 0) = w(1, 1) = 1;
  const std::vector<double> x{1, 2}, b{0, 0};
  EXPECT_EQ(cross_layer(x, x, w, b), (std::vector<double>{2, 6}));
}

TEST(CrossLayer, BatchedMatchesVectorFormula) {
  Rng rng(1);
  CrossLayer c("c", 4);
  c.init(rng);
  test::randomize(c.linear().params(), rng);
  const Matrix x0 = test::random_matrix(3, 4, rng), xl = test::random_matrix(3, 4, rng);
  Matrix u;
  const Matrix out = c.forward(x0, xl, u);
  Matrix w(4, 4);
  w.data = c.linear().weight().values;
  for (std::size_t r = 0; r < 3; ++r) {
    const auto ref = cross_layer(x0.row(r), xl.row(r), w, c.linear().bias().values);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out(r, i), ref[i], 1e-14);
  }
}

TEST(CrossLayer, FiniteDifferencesForWeightsAndBothInputs) {
  Rng rng(2);
  CrossLayer c("c", 5);
  c.init(rng);
  test::randomize(c.linear().params(), rng);
  Matrix x0 = test::random_matrix(4, 5, rng), xl = test::random_matrix(4, 5, rng);
  const Matrix k = test::random_matrix(4, 5, rng);
  auto loss = [&] {
    Matrix u;
    const Matrix y = c.forward(x0, xl, u);
    double s = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * k.data[i];
    return s;
  };
  Matrix dx0, dxl;
  auto backward = [&] {
    Matrix u;
    c.forward(x0, xl, u);
    dx0 = Matrix(4, 5);
    dxl = c.backward(x0, xl, u, k, dx0);
  };
  auto params = c.linear().params();
  EXPECT_LT(test::fd_max_rel_error(params, loss, backward), 1e-6);
  for (Matrix* in : {&x0, &xl}) {
    const Matrix& g = in == &x0 ? dx0 : dxl;
    for (std::size_t i = 0; i < in->data.size(); ++i) {
      const double o = in->data[i];
      in->data[i] = o + 1e-5;
      const double lp = loss();
      in->data[i] = o - 1e-5;
      const double lm = loss();
      in->data[i] = o;
      const double n = (lp - lm) / 2e-5;
      EXPECT_LT(std::abs(g.data[i] - n) / std::max({std::abs(n), std::abs(g.data[i]), 1e-4}), 1e-6);
    }
  }
}

TEST(Collab, ZeroParametersPredictOneHalf) {
  const auto ds = test::random_dataset(5, 3, 7, 1);
  CollabModel m(vocab_of(ds.schema), tiny(), "m");
  const auto out = m.forward(gather_all(ds));
  for (double p : out.p) EXPECT_EQ(p, 0.5);
}

TEST(Collab, InputWidthIsFieldsTimesDim) {
  CollabConfig c;
  CollabModel m(std::vector<std::uint32_t>(8, 10), c, "m");
  EXPECT_EQ(m.input_width(), 256u);
  EXPECT_EQ(m.rep_dim(), 64u);
}

TEST(Collab, ForwardIsDeterministic) {
  Rng rng(3);
  const auto ds = test::random_dataset(2, 3, 7, 1);
  CollabModel m(vocab_of(ds.schema), tiny(), "m");
  m.init(rng);
  const auto b = gather_all(ds);
  const auto a1 = m.forward(b), a2 = m.forward(b);
  EXPECT_TRUE(test::bitwise_equal(a1.p, a2.p));
  EXPECT_TRUE(test::bitwise_equal(a1.h.data, a2.h.data));
}

TEST(Collab, OutputsInRangeAndRepWidthFixed) {
  Rng rng(4);
  const auto ds = test::random_dataset(40, 3, 7, 2);
  CollabModel m(vocab_of(ds.schema), tiny(), "m");
  m.init(rng);
  test::randomize(m.params(), rng, 2.0);
  for (std::size_t n : {1u, 7u, 40u}) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    const auto out = m.forward(gather(ds, Batch{idx}));
    EXPECT_EQ(out.h.rows, n);
    EXPECT_EQ(out.h.cols, 4u);
    for (double p : out.p) {
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
    }
  }
}

TEST(CollabProperty, ZeroCrossDcnEqualsDnn) {
  Rng rng(5);
  const auto ds = test::random_dataset(12, 3, 7, 3);
  CollabModel a(vocab_of(ds.schema), tiny(CollabVariant::dcnv2, 0), "m");
  CollabModel b(vocab_of(ds.schema), tiny(CollabVariant::dnn, 2), "m");
  a.init(rng);
  auto pa = a.params(), pb = b.params();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) pb[i]->values = pa[i]->values;
  const auto batch = gather_all(ds);
  const auto oa = a.forward(batch), ob = b.forward(batch);
  EXPECT_TRUE(test::bitwise_equal(oa.p, ob.p));
  EXPECT_TRUE(test::bitwise_equal(oa.h.data, ob.h.data));
}

TEST(CollabProperty, RowsAreIndependentOfBatchComposition) {
  Rng rng(6);
  const auto ds = test::random_dataset(16, 3, 7, 4);
  CollabModel m(vocab_of(ds.schema), tiny(), "m");
  m.init(rng);
  const auto full = m.forward(gather_all(ds));
  std::vector<std::size_t> perm(16);
  for (std::size_t i = 0; i < 16; ++i) perm[i] = (i * 5 + 3) % 16;
  const auto permuted = m.forward(gather(ds, Batch{perm}));
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(permuted.p[i], full.p[perm[i]]);
    const auto one = m.forward(gather(ds, Batch{{perm[i]}}));
    EXPECT_EQ(one.p[0], full.p[perm[i]]);
  }
}

class CollabFd : public ::testing::TestWithParam<CollabVariant> {};

TEST_P(CollabFd, FullModelMatchesFiniteDifferences) {
  Rng rng(7);
  const auto ds = test::random_dataset(6, 3, 5, 5);
  CollabModel m(vocab_of(ds.schema), tiny(GetParam()), "m");
  m.init(rng);
  test::randomize(m.params(), rng, 0.6);
  const auto batch = gather_all(ds);
  const Matrix kh = test::random_matrix(6, 4, rng);
  const Matrix kp = test::random_matrix(6, 1, rng);
  auto loss = [&] {
    const auto out = m.forward(batch);
    double s = 0;
    for (std::size_t i = 0; i < out.h.data.size(); ++i) s += out.h.data[i] * kh.data[i];
    for (std::size_t i = 0; i < 6; ++i) s += out.p[i] * kp.data[i];
    return s;
  };
  auto backward = [&] {
    CollabModel::Trace tr;
    const Matrix h = m.represent(batch, &tr);
    const Matrix p = m.head().forward(h);
    Matrix dh = m.head().backward(h, p, kp);
    for (std::size_t i = 0; i < dh.data.size(); ++i) dh.data[i] += kh.data[i];
    m.represent_backward(batch, tr, dh);
  };
  EXPECT_LT(test::fd_max_rel_error(m.params(), loss, backward), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Variants, CollabFd, ::testing::Values(CollabVariant::dnn, CollabVariant::dcnv2));

TEST(Collab, ConfigAndInputErrors) {
  CollabConfig c = tiny();
  c.deep_dims = {};
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny();
  c.embedding_dim = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_variant("wide"), ConfigError);
  EXPECT_EQ(parse_variant("dnn"), CollabVariant::dnn);
  EXPECT_EQ(variant_name(CollabVariant::dcnv2), "dcnv2");

  CollabModel headless(std::vector<std::uint32_t>{4, 4}, tiny(), "m", false);
  EXPECT_THROW(headless.head(), ConfigError);
  const auto ds = test::random_dataset(3, 3, 5, 1);
  EXPECT_THROW(headless.represent(gather_all(ds)), DimensionError);
}

TEST(Collab, MetaRoundTrip) {
  std::map<std::string, std::string> meta;
  const CollabConfig c = tiny(CollabVariant::dnn, 1);
  const std::vector<std::uint32_t> vocab{3, 9, 27};
  put_collab_meta(meta, c, vocab);
  const auto back = collab_config_from_meta(meta);
  EXPECT_EQ(back.embedding_dim, c.embedding_dim);
  EXPECT_EQ(back.deep_dims, c.deep_dims);
  EXPECT_EQ(back.cross_layers, c.cross_layers);
  EXPECT_EQ(back.variant, c.variant);
  EXPECT_EQ(vocab_from_meta(meta), vocab);
  EXPECT_EQ(parse_sizes(join_sizes({512, 256, 128})), (std::vector<std::size_t>{512, 256, 128}));
}

}  // namespace
}  // namespace elec
