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

#include <sstream>

#include "elec/checkpoint.hpp"
#include "elec/cli.hpp"
#include "elec/config.hpp"
#include "elec/mllm.hpp"
#include "elec/synthetic.hpp"
#include "elec/textualize.hpp"
#include "test_util.hpp"

namespace elec {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "elec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

TEST(Config, GrammarCommentsAndLastAssignmentWins) {
  RunConfig c;
  apply_config_text(c,
                    "# comment\n"
                    "\n"
                    "train.epochs = 4\r\n"
                    "  schema = a:cat:10, b:cat:20 ,t:text\n"
                    "train.epochs=7\n"
                    "split.ratios = 0.6, 0.2, 0.2\n"
                    "collab.deep_dims = 8,4\n"
                    "store.mode = file\n");
  EXPECT_EQ(c.train.epochs, 7u);
  ASSERT_EQ(c.schema.size(), 3u);
  EXPECT_EQ(c.schema[1].vocab_capacity, 20u);
  EXPECT_EQ(c.schema[2].kind, FieldKind::text);
  EXPECT_DOUBLE_EQ(c.split.val, 0.2);
  EXPECT_EQ(c.collab.deep_dims, (std::vector<std::size_t>{8, 4}));
  EXPECT_EQ(c.store_mode, StoreMode::file);
}

TEST(Config, Errors) {
  RunConfig c;
  EXPECT_THROW(apply_config_text(c, "nonsense\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "train.epoch = 3\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "train.epochs = -1\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "train.lr = fast\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "store.mode = cloud\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "split.ratios = 0.5,0.5\n"), ConfigError);
  EXPECT_THROW(parse_schema("a:cat"), ConfigError);
  EXPECT_THROW(parse_schema("a:text:3"), ConfigError);
  EXPECT_THROW(parse_schema("a:num:3"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(Config, EchoRoundTripsEveryKey) {
  RunConfig c;
  apply_config_text(c, "schema = u:cat:8,t:text\ntrain.alpha = 0.3\nmllm.lr = 0.002\nadapter.dims = 16,8\n");
  const std::string text = config_to_text(c);
  RunConfig d;
  apply_config_text(d, text);
  EXPECT_EQ(config_to_map(d), config_to_map(c));
  EXPECT_EQ(config_to_text(d), text);
}

TEST(Config, DefaultsAreDocumentedValues) {
  const auto m = config_to_map(RunConfig{});
  EXPECT_EQ(m.at("train.alpha"), "1");
  EXPECT_EQ(m.at("train.lr"), "0.001");
  EXPECT_EQ(m.at("collab.deep_dims"), "256,128,64");
  EXPECT_EQ(m.at("collab.embedding_dim"), "32");
  EXPECT_EQ(m.at("collab.cross_layers"), "2");
  EXPECT_EQ(m.at("adapter.dims"), "512,256,128");
  EXPECT_EQ(m.at("train.prob_eps"), "1e-07");
  EXPECT_EQ(m.at("prepare.rating_threshold"), "3");
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::string schema = cmd_synth(dir / "data.csv", 3, 300, 60, 100);
    test::spit(dir / "run.cfg", "data.path = " + (dir / "data.csv").string() + "\nschema = " + schema +
                                    "\nsplit.ratios = 0.7,0.15,0.15\ncollab.embedding_dim = 4\n"
                                    "collab.deep_dims = 8,4\nadapter.dims = 8,4\nstore.hash_dim = 16\n"
                                    "mllm.epochs = 1\ntrain.epochs = 2\ntrain.batch_size = 64\n"
                                    "bench.samples = 10\nbench.repetitions = 2\n");
  }
  std::vector<std::string> base(const std::string& out) {
    return {"-c", (dir / "run.cfg").string(), "--set", "output.dir=" + (dir / out).string()};
  }
  CliResult go(const std::string& out, std::vector<std::string> extra) {
    auto a = base(out);
    a.insert(a.end(), extra.begin(), extra.end());
    return cli(a);
  }
  test::TempDir dir;
};

TEST_F(CliRun, TrainIsByteReproducible) {
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(go(out, {"train-mllm"}).code, 0);
    const auto r = go(out, {"train"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"adapter.ckpt", "gain.ckpt", "vanilla.ckpt", "metrics.log", "mllm_loss.log"}) {
    const auto a = test::slurp(dir / "a" / f), b = test::slurp(dir / "b" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, b) << f;
  }
  EXPECT_EQ(read_checkpoint(dir / "a" / "gain.ckpt").tag, "gain");
  const auto log = test::slurp(dir / "a" / "metrics.log");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);
  EXPECT_EQ(log.rfind("epoch=1 l_gain=", 0), 0u);
  EXPECT_NE(test::slurp(dir / "a" / "train.config").find("train.epochs = 2"), std::string::npos);
}

TEST_F(CliRun, ZeroEpochAdapterIsInitialization) {
  ASSERT_EQ(go("z", {"--set", "mllm.epochs=0", "train-mllm"}).code, 0);
  const auto a = MllmAdapter::from_checkpoint(read_checkpoint(dir / "z" / "adapter.ckpt"));
  MllmConfig mc;
  mc.input_dim = 16;
  mc.dims = {8, 4};
  MllmAdapter ref(mc);
  Rng rng(MllmTrainConfig{}.init_seed);
  ref.init(rng);
  EXPECT_EQ(a.to_checkpoint(), ref.to_checkpoint());
  EXPECT_EQ(test::slurp(dir / "z" / "mllm_loss.log"), "");
}

TEST_F(CliRun, EvalBenchAndStoreModes) {
  ASSERT_EQ(go("o", {"train-mllm"}).code, 0);
  ASSERT_EQ(go("o", {"train"}).code, 0);
  const auto e1 = go("o", {"eval", "--checkpoint", (dir / "o" / "vanilla.ckpt").string(), "--split", "test"});
  const auto e2 = go("o", {"eval", "--checkpoint", (dir / "o" / "vanilla.ckpt").string(), "--split", "test"});
  ASSERT_EQ(e1.code, 0) << e1.err;
  EXPECT_EQ(e1.out, e2.out);
  EXPECT_NE(e1.out.find("auc: "), std::string::npos);
  EXPECT_EQ(test::slurp(dir / "o" / "eval_vanilla_test.txt").rfind("model=vanilla split=test auc=", 0), 0u);
  EXPECT_EQ(go("o", {"eval", "--checkpoint", (dir / "o" / "gain.ckpt").string(), "--split", "val"}).code, 0);
  EXPECT_EQ(go("o", {"eval", "--checkpoint", (dir / "o" / "adapter.ckpt").string()}).code, 0);
  EXPECT_EQ(go("o", {"eval", "--checkpoint", (dir / "o" / "vanilla.ckpt").string(), "--split", "dev"}).code,
            kExitConfig);

  const auto bv = go("o", {"bench", "--checkpoint", (dir / "o" / "vanilla.ckpt").string()});
  ASSERT_EQ(bv.code, 0) << bv.err;
  EXPECT_NE(bv.out.find("store_reads_per_repetition: 0\n"), std::string::npos);
  const auto bg = go("o", {"bench", "--checkpoint", (dir / "o" / "gain.ckpt").string()});
  EXPECT_NE(bg.out.find("store_reads_per_repetition: 10\n"), std::string::npos);

  // Vanilla evaluation with a file-mode store that does not exist.
  const auto nv = go("o", {"--set", "store.mode=file", "--set", "store.path=" + (dir / "none.bin").string(), "bench",
                           "--checkpoint", (dir / "o" / "vanilla.ckpt").string()});
  EXPECT_EQ(nv.code, 0) << nv.err;
  EXPECT_NE(nv.out.find("store_reads_per_repetition: 0\n"), std::string::npos);
  // Gain needs it.
  const auto ng = go("o", {"--set", "store.mode=file", "--set", "store.path=" + (dir / "none.bin").string(), "eval",
                           "--checkpoint", (dir / "o" / "gain.ckpt").string()});
  EXPECT_EQ(ng.code, kExitData);
}

TEST_F(CliRun, FileStoreMatchesHashFallback) {
  RunConfig c = load_config(dir / "run.cfg");
  const Dataset full = load_dataset(c.data_path, c.schema);
  build_hash_store(full, 16, 0).save(dir / "store.bin");
  ASSERT_EQ(go("h", {"train-mllm"}).code, 0);
  ASSERT_EQ(go("f", {"--set", "store.mode=file", "--set", "store.path=" + (dir / "store.bin").string(), "train-mllm"})
                .code,
            0);
  EXPECT_EQ(test::slurp(dir / "h" / "adapter.ckpt"), test::slurp(dir / "f" / "adapter.ckpt"));
}

TEST_F(CliRun, TextualizeWritesOneLinePerRow) {
  const auto r = go("t", {"textualize"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text_records(dir / "t" / "text.tsv").size(), 460u);
}

TEST(Cli, ExitCodes) {
  test::TempDir dir;
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(cli({"--set", "nope=1", "config"}).code, kExitConfig);
  EXPECT_EQ(cli({"--set", "schema=a:cat:4", "--set", "data.path=" + (dir / "x.csv").string(), "textualize"}).code,
            kExitIo);
  test::spit(dir / "bad.csv", "a,label\nv,7\n");
  EXPECT_EQ(cli({"--set", "schema=a:cat:4", "--set", "data.path=" + (dir / "bad.csv").string(), "--set",
                 "output.dir=" + (dir / "o").string(), "textualize"})
                .code,
            kExitData);
  EXPECT_EQ(cli({"--set", "schema=a:cat:4", "--set", "data.path=" + (dir / "bad.csv").string(), "--set",
                 "output.dir=" + (dir / "o").string(), "train"})
                .code,
            kExitData);
  const auto cfg = cli({"--set", "train.epochs=9", "config"});
  EXPECT_EQ(cfg.code, 0);
  EXPECT_NE(cfg.out.find("train.epochs = 9\n"), std::string::npos);
}

TEST(Prepare, RatingThresholdAndMalformedRows) {
  test::TempDir dir;
  test::spit(dir / "raw.csv", "user,item,rating,ts\nu1,i1,4,1\nu2,i2,3,2\nu3,i3,bad,3\nu4,i4,5.0,4\nu5,i5\n");
  RunConfig c;
  c.schema = parse_schema("user:cat:8,item:cat:8");
  c.output_dir = dir / "p";
  c.split = {0.5, 0.25, 0.25};
  c.max_bad_fraction = 0.5;
  std::ostringstream log;
  const auto s = cmd_prepare(dir / "raw.csv", c, log);
  EXPECT_EQ(s.rows, 5u);
  EXPECT_EQ(s.malformed, 2u);
  EXPECT_EQ(s.written, 3u);
  EXPECT_EQ(test::slurp(dir / "p" / "data.csv"), "user,item,label\nu1,i1,1\nu2,i2,0\nu4,i4,1\n");
  EXPECT_NE(log.str().find("malformed=2"), std::string::npos);
  std::size_t lines = 0;
  for (const char* m : {"split_train.txt", "split_val.txt", "split_test.txt"}) {
    const auto t = test::slurp(dir / "p" / m);
    lines += static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n'));
  }
  EXPECT_EQ(lines, 3u);

  c.max_bad_fraction = 0.1;
  EXPECT_THROW(cmd_prepare(dir / "raw.csv", c, log), ParseError);
}

TEST(Prepare, EmptyInputGivesEmptyOutputs) {
  test::TempDir dir;
  test::spit(dir / "raw.csv", "");
  RunConfig c;
  c.schema = parse_schema("user:cat:8");
  c.output_dir = dir / "p";
  std::ostringstream log;
  const auto s = cmd_prepare(dir / "raw.csv", c, log);
  EXPECT_EQ(s.written, 0u);
  EXPECT_EQ(test::slurp(dir / "p" / "data.csv"), "user,label\n");
  EXPECT_EQ(test::slurp(dir / "p" / "split_train.txt"), "");
  EXPECT_EQ(test::slurp(dir / "p" / "split_test.txt"), "");
}

TEST(Prepare, MissingRatingColumnIsSchemaError) {
  test::TempDir dir;
  test::spit(dir / "raw.csv", "user,stars\nu1,4\n");
  RunConfig c;
  c.schema = parse_schema("user:cat:8");
  c.output_dir = dir / "p";
  std::ostringstream log;
  EXPECT_THROW(cmd_prepare(dir / "raw.csv", c, log), SchemaError);
}

TEST(Synthetic, DeterministicShapesAndTextChannel) {
  SyntheticConfig sc;
  sc.n_train = 200;
  sc.n_val = 50;
  sc.n_test = 70;
  sc.seed = 4;
  const auto a = make_synthetic(sc), b = make_synthetic(sc);
  EXPECT_EQ(a.full, b.full);
  EXPECT_EQ(a.full.size(), 320u);
  EXPECT_EQ(a.train.size(), 200u);
  EXPECT_EQ(a.val.size(), 50u);
  EXPECT_EQ(a.test.size(), 70u);
  EXPECT_EQ(categorical_count(a.full.schema), 6u);
  EXPECT_EQ(a.test.samples[0].key, 250u);
  for (const auto& s : a.full.samples) {
    ASSERT_TRUE(s.extra_text.has_value());
    EXPECT_EQ(s.extra_text->rfind("Quality is ", 0), 0u);
  }
  sc.seed = 5;
  EXPECT_NE(make_synthetic(sc).full, a.full);
}

}  // namespace
}  // namespace elec
