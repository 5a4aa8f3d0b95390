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

#include "elec/error.hpp"
#include "elec/textualize.hpp"
#include "test_util.hpp"

namespace elec {
namespace {

Sample with_raw(std::vector<std::string> raw) {
  Sample s;
  s.raw = std::move(raw);
  s.features.assign(s.raw.size(), 0);
  return s;
}

TEST(Textualize, WorkedExample) {
  const FieldSchema schema = {{"gender", FieldKind::categorical, 4}, {"occupation", FieldKind::categorical, 4}};
  EXPECT_EQ(textualize_sample(with_raw({"female", "college student"}), schema).text,
            "Gender is female. Occupation is college student.");
}

TEST(Textualize, EmptySchemaRendersEmpty) { EXPECT_EQ(textualize_sample(with_raw({}), {}).text, ""); }

TEST(Textualize, SingleField) {
  EXPECT_EQ(textualize_sample(with_raw({"paris"}), {{"city", FieldKind::categorical, 4}}).text, "City is paris.");
}

TEST(Textualize, ValuesAreVerbatimAndOrderFollowsSchema) {
  const FieldSchema schema = {{"b", FieldKind::categorical, 4}, {"a", FieldKind::categorical, 4}};
  EXPECT_EQ(textualize_sample(with_raw({"X Y", "z"}), schema).text, "B is X Y. A is z.");
}

TEST(Textualize, ExtraTextIsAppended) {
  auto s = with_raw({"paris"});
  s.extra_text = "Loved it.";
  const auto t = textualize_sample(s, {{"city", FieldKind::categorical, 4}, {"review", FieldKind::text, 1}});
  EXPECT_EQ(t.text, "City is paris.");
  EXPECT_EQ(t.full(), "City is paris. Loved it.");
}

TEST(Textualize, EmptyDatasetWritesEmptyFile) {
  test::TempDir dir;
  Dataset ds;
  ds.schema = {{"a", FieldKind::categorical, 4}};
  EXPECT_EQ(textualize_dataset(ds, dir / "t.tsv"), 0u);
  EXPECT_EQ(test::slurp(dir / "t.tsv"), "");
  EXPECT_TRUE(read_text_records(dir / "t.tsv").empty());
}

TEST(Textualize, FileFormatIsIdTabTextLf) {
  test::TempDir dir;
  Dataset ds;
  ds.schema = {{"city", FieldKind::categorical, 4}};
  for (std::uint64_t i = 0; i < 2; ++i) {
    auto s = with_raw({i == 0 ? "paris" : "new\tyork\nstate"});
    s.id = s.key = i;
    ds.samples.push_back(s);
  }
  EXPECT_EQ(textualize_dataset(ds, dir / "t.tsv"), 2u);
  EXPECT_EQ(test::slurp(dir / "t.tsv"), "0\tCity is paris.\n1\tCity is new york state.\n");
}

TEST(Textualize, RoundTripMatchesSampleRendering) {
  test::TempDir dir;
  const auto ds = test::random_dataset(30, 3, 7, 4);
  textualize_dataset(ds, dir / "t.tsv");
  const auto recs = read_text_records(dir / "t.tsv");
  ASSERT_EQ(recs.size(), ds.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].id, i);
    EXPECT_EQ(recs[i].text, textualize_sample(ds.samples[i], ds.schema).full());
  }
}

TEST(Textualize, MalformedRecordsAreParseErrors) {
  test::TempDir dir;
  test::spit(dir / "bad.tsv", "0 no tab here\n");
  EXPECT_THROW(read_text_records(dir / "bad.tsv"), ParseError);
  test::spit(dir / "bad2.tsv", "x\ttext\n");
  EXPECT_THROW(read_text_records(dir / "bad2.tsv"), ParseError);
}

}  // namespace
}  // namespace elec
