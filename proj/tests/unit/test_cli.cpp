#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "advalstm/checkpoint.hpp"
#include "advalstm/cli/commands.hpp"
#include "advalstm/cli/config.hpp"
#include "advalstm/error.hpp"
#include "advalstm/market_data.hpp"
#include "fixtures.hpp"

using namespace advalstm;
using namespace advalstm::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "advalstm");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Three random-walk stocks of `days` business days and a config beside them.
fs::path make_project(const std::string& name, std::size_t days, const std::string& extra = "") {
  const auto dir = fx::scratch_dir(name);
  const market::Date start = std::chrono::year{2014} / 1 / 1;
  for (int s = 0; s < 3; ++s) {
    const std::string id = "STK" + std::to_string(s);
    fx::write_csv(dir / (id + ".csv"), id, fx::random_walk(start, days, 100 + s));
  }
  std::ofstream cfg(dir / "run.cfg");
  cfg << "data = STK0.csv, STK1.csv, STK2.csv\n"
         "train_end = 2014-04-15\nval_end = 2014-05-15\ntest_end = 2014-12-31\n"
         "out = out\nlag = 5\nepochs = 3\nbatch_size = 64\nseeds = 0,1\n"
      << extra;
  return dir;
}

}  // namespace

// ---------------------------------------------------------------------------
// config

TEST(Config, ParsesAndResolvesRelativePaths) {
  std::istringstream in("# comment\ndata = a.csv, /abs/b.csv\nlag = 7  # trailing\nmode = normal\n"
                        "grid.hidden = 4,8\nattack_epsilon = 0.02\n");
  const auto c = parse_config(in, "cfg", "/base");
  ASSERT_EQ(c.data.size(), 2u);
  EXPECT_EQ(c.data[0], fs::path("/base/a.csv"));
  EXPECT_EQ(c.data[1], fs::path("/abs/b.csv"));
  EXPECT_EQ(c.split.lag, 7u);
  EXPECT_EQ(c.model_dims().lag, 7u);
  EXPECT_EQ(c.train.mode, train::TrainMode::kNormal);
  EXPECT_EQ(c.grid.hidden, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(c.effective_attack_epsilon(), 0.02);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"nonsense\n", "unknown_key = 1\n", "lag = -3\n", "lag = 2\nlag = 3\n",
                           "mode = fgsm\n", "use_attention = maybe\n"}) {
    std::istringstream in(text);
    try {
      parse_config(in, "cfg");
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kParse) << text;
      EXPECT_NE(std::string(e.what()).find("cfg:"), std::string::npos);
    }
  }
}

TEST(Config, ValidationCatchesDownstreamViolations) {
  RunConfig c;
  c.train.alpha = -1;
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.split.pos_threshold = -0.1;
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.indicators.mr_window = 1;
  EXPECT_THROW(c.validate(), Error);
  c = RunConfig{};
  c.grid.epsilon.clear();
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, CanonicalTextRoundTrips) {
  std::istringstream in("epsilon = 0.1\nalpha = 3e-05\nseeds = 4,2\ndata = x.csv\n");
  const auto c = parse_config(in, "cfg");
  const auto text = to_text(c);
  std::istringstream again(text);
  EXPECT_EQ(to_text(parse_config(again, "cfg2")), text);
  auto moved = c;
  moved.out = "elsewhere";
  EXPECT_EQ(config_hash(moved), config_hash(c));
  moved.train.beta = 0.5;
  EXPECT_NE(config_hash(moved), config_hash(c));
}

// ---------------------------------------------------------------------------
// commands

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(exit_code(ErrorKind::kIo), 2);
  EXPECT_EQ(exit_code(ErrorKind::kParse), 2);
  EXPECT_EQ(exit_code(ErrorKind::kNumeric), 3);
  EXPECT_EQ(exit_code(ErrorKind::kMismatch), 4);
  EXPECT_EQ(exit_code(ErrorKind::kShape), 4);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"train"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"build", "--config", "/nonexistent/run.cfg"}).code, 2);
}

TEST(Cli, MissingInputFile) {
  const auto dir = make_project("cli_missing", 40);
  fs::remove(dir / "STK1.csv");
  const auto r = invoke({"build", "--config", (dir / "run.cfg").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("STK1.csv"), std::string::npos) << r.err;
}

TEST(Cli, MalformedInputReportsLine) {
  const auto dir = make_project("cli_malformed", 40);
  std::ofstream(dir / "STK2.csv", std::ios::app) << "STK2,2015-01-01,1,1,1\n";
  const auto r = invoke({"build", "--config", (dir / "run.cfg").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("STK2.csv:42"), std::string::npos) << r.err;
}

TEST(Cli, BuildCountsMatchIndependentCount) {
  const auto dir = make_project("cli_count", 60);
  const auto cfg = (dir / "run.cfg").string();
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  // Recount from the raw CSV rows: anchor index >= 29 + 5 - 1 with a next day.
  const market::Date train_end = std::chrono::year{2014} / 4 / 15;
  const market::Date val_end = std::chrono::year{2014} / 5 / 15;
  std::size_t expected[3] = {0, 0, 0};
  for (int s = 0; s < 3; ++s) {
    const auto rows = fx::random_walk(std::chrono::year{2014} / 1 / 1, 60, 100 + s);
    for (std::size_t d = 33; d + 1 < rows.size(); ++d) {
      const double move = 100 * (rows[d + 1].adj_close / rows[d].adj_close - 1);
      if (move < 0.55 && move > -0.5) continue;
      ++expected[rows[d].date < train_end ? 0 : rows[d].date < val_end ? 1 : 2];
    }
  }
  const auto ds = market::load_dataset(dir / "out" / "dataset.advds");
  const auto ex = ds.examples();
  EXPECT_EQ(ex.train.size(), expected[0]);
  EXPECT_EQ(ex.validation.size(), expected[1]);
  EXPECT_EQ(ex.test.size(), expected[2]);
  // Rebuilding is byte-identical.
  const auto first = slurp(dir / "out" / "dataset.advds");
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  EXPECT_EQ(slurp(dir / "out" / "dataset.advds"), first);
}

TEST(Cli, TrainEvalAttackArtifacts) {
  const auto dir = make_project("cli_pipeline", 160);
  const auto cfg = (dir / "run.cfg").string();
  const auto out = dir / "out";
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  const auto t = invoke({"train", "--config", cfg});
  ASSERT_EQ(t.code, 0) << t.err;
  for (const char* f : {"checkpoint.bin", "loss_curve.csv", "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_EQ(slurp(out / "loss_curve.csv").substr(0, 34), "epoch,train_loss,val_loss,val_acc\n");
  const auto ck = nn::load_checkpoint(out / "checkpoint.bin");
  EXPECT_EQ(ck.metadata.at("mode"), "adversarial");
  const auto manifest = slurp(out / "manifest.txt");
  EXPECT_NE(manifest.find("dataset_hash = " + ck.metadata.at("dataset_hash")), std::string::npos);

  const auto e = invoke({"eval", "--config", cfg});
  ASSERT_EQ(e.code, 0) << e.err;
  for (const char* f : {"predictions.csv", "metrics.csv", "comparison.csv", "histogram.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto metrics = slurp(out / "metrics.csv");
  EXPECT_NE(metrics.find("\nMOM,"), std::string::npos);
  EXPECT_NE(metrics.find("\nMR,"), std::string::npos);
  EXPECT_NE(metrics.find("\nAdv-ALSTM,"), std::string::npos);
  EXPECT_NE(slurp(out / "comparison.csv").find("\nRI,"), std::string::npos);

  // Same checkpoint twice: identical reports.
  const auto first = slurp(out / "metrics.csv") + slurp(out / "predictions.csv");
  ASSERT_EQ(invoke({"eval", "--config", cfg}).code, 0);
  EXPECT_EQ(slurp(out / "metrics.csv") + slurp(out / "predictions.csv"), first);

  const auto a = invoke({"attack", "--config", cfg, "--epsilon", "0"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto attack = slurp(out / "attack.csv");
  EXPECT_NE(attack.find("\nacc,"), std::string::npos);
  std::istringstream lines(attack);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("acc,", 0) == 0) EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
  }
}

TEST(Cli, MismatchedDatasetExitsFour) {
  const auto dir = make_project("cli_mismatch", 120);
  const auto cfg = (dir / "run.cfg").string();
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", cfg}).code, 0);
  // A second dataset with another lag.
  ASSERT_EQ(invoke({"build", "--config", cfg, "--out", (dir / "other").string()}).code, 0);
  {
    std::ofstream extra(dir / "run.cfg", std::ios::app);
    extra << "pos_threshold = 1\n";
  }
  ASSERT_EQ(invoke({"build", "--config", cfg, "--out", (dir / "other").string()}).code, 0);
  const auto r = invoke({"eval", "--config", cfg, "--dataset", (dir / "other" / "dataset.advds").string(),
                      "--checkpoint", (dir / "out" / "checkpoint.bin").string()});
  EXPECT_EQ(r.code, 4) << r.err;
  const auto a = invoke({"attack", "--config", cfg, "--dataset", (dir / "other" / "dataset.advds").string(),
                      "--checkpoint", (dir / "out" / "checkpoint.bin").string()});
  EXPECT_EQ(a.code, 4);
}

TEST(Cli, DivergenceExitsThree) {
  const auto dir = make_project("cli_diverge", 120, "learning_rate = 1e200\nalpha = 1\n");
  const auto cfg = (dir / "run.cfg").string();
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  EXPECT_EQ(invoke({"train", "--config", cfg}).code, 3);
}

TEST(Cli, BetaZeroCurvesMatchNormal) {
  const auto dir = make_project("cli_beta0", 120, "beta = 0\n");
  const auto cfg = (dir / "run.cfg").string();
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", cfg}).code, 0);
  const auto adv_curve = slurp(dir / "out" / "loss_curve.csv");
  {
    std::ofstream extra(dir / "run.cfg", std::ios::app);
    extra << "mode = normal\n";
  }
  ASSERT_EQ(invoke({"train", "--config", cfg}).code, 0);
  EXPECT_EQ(slurp(dir / "out" / "loss_curve.csv"), adv_curve);
}

TEST(Cli, SeedOverrideChangesTraining) {
  const auto dir = make_project("cli_seed", 120);
  const auto cfg = (dir / "run.cfg").string();
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  ASSERT_EQ(invoke({"train", "--config", cfg, "--seed", "7"}).code, 0);
  const auto a = slurp(dir / "out" / "checkpoint.bin");
  ASSERT_EQ(invoke({"train", "--config", cfg, "--seed", "7"}).code, 0);
  EXPECT_EQ(slurp(dir / "out" / "checkpoint.bin"), a);
  ASSERT_EQ(invoke({"train", "--config", cfg, "--seed", "8"}).code, 0);
  EXPECT_NE(slurp(dir / "out" / "checkpoint.bin"), a);
}

TEST(Cli, GridAndReport) {
  const auto dir = make_project("cli_grid", 120,
                                "grid.hidden = 4\ngrid.lag = 2,3\ngrid.lambda = 0.01\n"
                                "grid.beta = 0.1\ngrid.epsilon = 0.01,0.05\n");
  const auto cfg = (dir / "run.cfg").string();
  ASSERT_EQ(invoke({"build", "--config", cfg}).code, 0);
  const auto g = invoke({"grid", "--config", cfg});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto grid = slurp(dir / "out" / "grid.csv");
  EXPECT_EQ(std::count(grid.begin(), grid.end(), '\n'), 5);
  std::ifstream best(dir / "out" / "best_config.txt");
  const auto best_config = parse_config(best, "best");
  EXPECT_EQ(best_config.train.mode, train::TrainMode::kAdversarial);

  const auto r = invoke({"report", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "seed_0" / "checkpoint.bin"));
  EXPECT_TRUE(fs::exists(dir / "out" / "seed_1" / "metrics.csv"));
  const auto report = slurp(dir / "out" / "report.csv");
  EXPECT_NE(report.find("\nAdv-ALSTM,2,"), std::string::npos) << report;
  EXPECT_NE(r.out.find("±"), std::string::npos);
}
