#include "advalstm/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "advalstm/baselines.hpp"
#include "advalstm/checkpoint.hpp"
#include "advalstm/cli/config.hpp"
#include "advalstm/evaluation.hpp"
#include "advalstm/grid_search.hpp"
#include "advalstm/market_data.hpp"
#include "advalstm/text.hpp"
#include "advalstm/trainer.hpp"

namespace advalstm::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDatasetFile = "dataset.advds";
constexpr const char* kCheckpointFile = "checkpoint.bin";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

std::string fixed(double v, int precision) { return text::format_fixed(v, precision); }
std::string num(double v) { return text::format_double(v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string model_name(const nn::ModelDims& dims, train::TrainMode mode) {
  switch (mode) {
    case train::TrainMode::kAdversarial: return dims.use_attention ? "Adv-ALSTM" : "Adv-LSTM";
    case train::TrainMode::kRandomPerturbation: return dims.use_attention ? "Rand-ALSTM" : "Rand-LSTM";
    case train::TrainMode::kNormal: break;
  }
  return dims.use_attention ? "ALSTM" : "LSTM";
}

struct LoadedDataset {
  market::Dataset dataset;
  std::string hash;
};

LoadedDataset load_dataset_file(const fs::path& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  return {market::read_dataset(in, path.string()), text::git_blob_hash(content)};
}

void print_split_summary(std::ostream& out, const market::SplitDataset& data) {
  for (auto split : {market::Split::kTrain, market::Split::kValidation, market::Split::kTest}) {
    const auto& examples = data[split];
    const auto up = std::count_if(examples.begin(), examples.end(),
                                  [](const market::Example& e) { return e.label > 0; });
    out << "  " << market::to_string(split) << ": " << examples.size() << " examples, " << up
        << " up / " << (examples.size() - static_cast<std::size_t>(up)) << " down\n";
  }
}

// ---------------------------------------------------------------------------
// build

void cmd_build(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.data.empty()) fail(ErrorKind::kIo, "config lists no data files");
  for (const auto& p : config.data) {
    if (!fs::exists(p)) fail(ErrorKind::kIo, "input file not found: " + p.string());
  }
  auto ingest = market::ingest_eod(std::span<const fs::path>(config.data));
  for (const auto& w : ingest.warnings) err << "warning: " << w << '\n';
  auto coverage = market::filter_by_coverage(ingest.series, config.min_coverage);
  for (const auto& s : coverage.dropped) err << "warning: dropped " << s << " (low coverage)\n";
  const auto aligned = market::align_trading_days(coverage.kept);

  market::Dataset dataset{config.split, market::build_feature_table(aligned), coverage.dropped};
  const auto examples = dataset.examples();
  for (const auto& w : examples.warnings) err << "warning: " << w << '\n';

  std::ostringstream buffer;
  market::write_dataset(buffer, dataset);
  const std::string content = buffer.str();
  const fs::path path = config.out / kDatasetFile;
  write_file(path, [&](std::ostream& o) { o << content; });

  out << "dataset " << path.string() << " (" << text::git_blob_hash(content) << ")\n";
  out << "  stocks: " << dataset.table.size() << ", aligned days: " << aligned.calendar.size()
      << ", lag: " << config.split.lag << '\n';
  print_split_summary(out, examples);
}

// ---------------------------------------------------------------------------
// train

void write_manifest(const fs::path& path, const RunConfig& config, const std::string& dataset_hash,
                    std::size_t best_epoch) {
  write_file(path, [&](std::ostream& o) {
    o << "advalstm-manifest v1\n";
    o << "seed = " << config.train.seed << '\n';
    o << "dataset_hash = " << dataset_hash << '\n';
    o << "config_hash = " << config_hash(config) << '\n';
    o << "best_epoch = " << best_epoch << '\n';
    o << "[config]\n" << experiment_text(config);
  });
}

void train_run(const RunConfig& config, const LoadedDataset& loaded, std::ostream& out) {
  const nn::ModelDims dims = config.model_dims();
  const auto data = loaded.dataset.examples(dims.lag);
  out << "training " << model_name(dims, config.train.mode) << " (seed " << config.train.seed
      << ") on " << data.train.size() << " examples\n";

  const auto result = train::train(data.train, data.validation, dims, config.train);

  nn::Checkpoint checkpoint{dims, config.train.seed, result.params, {}};
  checkpoint.metadata["dataset_hash"] = loaded.hash;
  checkpoint.metadata["config_hash"] = config_hash(config);
  checkpoint.metadata["mode"] = std::string(train::to_string(config.train.mode));
  checkpoint.metadata["best_epoch"] = std::to_string(result.best_epoch);
  fs::create_directories(config.out);
  nn::save_checkpoint(config.out / kCheckpointFile, checkpoint);

  write_file(config.out / "loss_curve.csv", [&](std::ostream& o) {
    o << "epoch,train_loss,val_loss,val_acc\n";
    for (const auto& r : result.curve) {
      o << r.epoch << ',' << num(r.train_loss) << ',' << num(r.val_loss) << ',' << num(r.val_acc)
        << '\n';
    }
  });
  write_manifest(config.out / "manifest.txt", config, loaded.hash, result.best_epoch);

  const auto& first = result.curve.front();
  const auto& last = result.curve.back();
  out << "  epochs run: " << last.epoch << (result.stopped_early ? " (early stop)" : "")
      << ", best epoch: " << result.best_epoch << '\n';
  out << "  train loss " << fixed(first.train_loss, 4) << " -> " << fixed(last.train_loss, 4)
      << '\n';
}

// ---------------------------------------------------------------------------
// eval / attack

struct Loaded {
  nn::Checkpoint checkpoint;
  market::SplitDataset data;
  market::FeatureTable table;
};

Loaded load_pair(const fs::path& checkpoint_path, const fs::path& dataset_path) {
  nn::Checkpoint checkpoint = nn::load_checkpoint(checkpoint_path);
  LoadedDataset loaded = load_dataset_file(dataset_path);
  const auto it = checkpoint.metadata.find("dataset_hash");
  if (it == checkpoint.metadata.end() || it->second != loaded.hash) {
    fail(ErrorKind::kMismatch, "checkpoint " + checkpoint_path.string() +
                                   " was trained on a different dataset than " +
                                   dataset_path.string());
  }
  if (checkpoint.dims.features != market::kFeatureCount) {
    fail(ErrorKind::kMismatch, "checkpoint expects " + std::to_string(checkpoint.dims.features) +
                                   " features, dataset has " +
                                   std::to_string(market::kFeatureCount));
  }
  auto data = loaded.dataset.examples(checkpoint.dims.lag);
  return {std::move(checkpoint), std::move(data), std::move(loaded.dataset.table)};
}

struct EvalOutcome {
  eval::MetricsReport model;
  eval::MetricsReport mom;
  eval::MetricsReport mr;
};

void write_metrics_row(std::ostream& o, std::string_view method, const eval::MetricsReport& m) {
  o << method << ',' << num(m.acc) << ',' << num(m.mcc) << ',' << m.n << ',' << m.counts.tp << ','
    << m.counts.tn << ',' << m.counts.fp << ',' << m.counts.fn << '\n';
}

EvalOutcome eval_run(const RunConfig& config, const Loaded& loaded, std::ostream& out) {
  const auto& test = loaded.data.test;
  const auto records = eval::predict(test, loaded.checkpoint.params);
  const auto baselines = baselines::predict_baselines(loaded.table, test, config.indicators);
  EvalOutcome result{eval::evaluate(records), eval::evaluate(baselines.mom),
                     eval::evaluate(baselines.mr)};

  const auto mode_it = loaded.checkpoint.metadata.find("mode");
  const auto mode = mode_it == loaded.checkpoint.metadata.end()
                        ? std::nullopt
                        : train::parse_train_mode(mode_it->second);
  const std::string name =
      model_name(loaded.checkpoint.dims, mode.value_or(train::TrainMode::kNormal));

  const double best_acc = std::max(result.mom.acc, result.mr.acc);
  const double best_mcc = std::max(result.mom.mcc, result.mr.mcc);
  const auto ri_acc = eval::relative_improvement(result.model.acc, best_acc);
  const auto ri_mcc = eval::relative_improvement(result.model.mcc, best_mcc);

  write_file(config.out / "predictions.csv",
             [&](std::ostream& o) { eval::write_predictions_csv(o, records); });
  write_file(config.out / "metrics.csv", [&](std::ostream& o) {
    o << "method,acc,mcc,n,tp,tn,fp,fn\n";
    write_metrics_row(o, "MOM", result.mom);
    write_metrics_row(o, "MR", result.mr);
    write_metrics_row(o, name, result.model);
  });
  write_file(config.out / "comparison.csv", [&](std::ostream& o) {
    o << "method,acc,mcc\n";
    o << "MOM," << num(result.mom.acc) << ',' << num(result.mom.mcc) << '\n';
    o << "MR," << num(result.mr.acc) << ',' << num(result.mr.mcc) << '\n';
    o << name << ',' << num(result.model.acc) << ',' << num(result.model.mcc) << '\n';
    o << "RI," << num(ri_acc) << ',' << num(ri_mcc) << '\n';
  });
  const auto histogram = eval::confidence_histogram(records, config.histogram_bins);
  write_file(config.out / "histogram.csv",
             [&](std::ostream& o) { eval::write_histogram_csv(o, histogram); });

  auto pct = [&](const std::optional<double>& v) { return v ? fixed(*v, 2) + "%" : "n/a"; };
  out << "test split: " << result.model.n << " examples\n";
  out << "  MOM        acc " << fixed(result.mom.acc, 2) << "  mcc " << fixed(result.mom.mcc, 4) << '\n';
  out << "  MR         acc " << fixed(result.mr.acc, 2) << "  mcc " << fixed(result.mr.mcc, 4) << '\n';
  out << "  " << name << std::string(11 - std::min<std::size_t>(10, name.size()), ' ') << "acc "
      << fixed(result.model.acc, 2) << "  mcc " << fixed(result.model.mcc, 4) << '\n';
  out << "  RI         acc " << pct(ri_acc) << "  mcc " << pct(ri_mcc) << '\n';
  out << "  mean |confidence| " << fixed(histogram.mean_abs, 4) << '\n';
  return result;
}

struct AttackOutcome {
  eval::MetricsReport clean;
  eval::MetricsReport attacked;
  eval::RelativeDecrease rpd;
};

AttackOutcome attack_run(const RunConfig& config, const Loaded& loaded, double epsilon,
                         std::ostream& out) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::kContract, "attack epsilon must be non-negative");
  const auto& test = loaded.data.test;
  const auto clean_records = eval::predict(test, loaded.checkpoint.params);
  const auto attacked_records = eval::predict_attacked(test, loaded.checkpoint.params, epsilon);
  AttackOutcome result{eval::evaluate(clean_records), eval::evaluate(attacked_records), {}};
  result.rpd = eval::rpd(result.clean, result.attacked);

  write_file(config.out / "attacked_predictions.csv",
             [&](std::ostream& o) { eval::write_predictions_csv(o, attacked_records); });
  write_file(config.out / "attack.csv", [&](std::ostream& o) {
    o << "epsilon," << num(epsilon) << '\n';
    o << "metric,clean,attacked,rpd\n";
    o << "acc," << num(result.clean.acc) << ',' << num(result.attacked.acc) << ','
      << num(result.rpd.acc) << '\n';
    o << "mcc," << num(result.clean.mcc) << ',' << num(result.attacked.mcc) << ','
      << num(result.rpd.mcc) << '\n';
  });

  auto show = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("n/a"); };
  out << "attack epsilon " << num(epsilon) << " on " << result.clean.n << " test examples\n";
  out << "  acc " << fixed(result.clean.acc, 2) << " -> " << fixed(result.attacked.acc, 2)
      << "  rpd " << show(result.rpd.acc) << '\n';
  out << "  mcc " << fixed(result.clean.mcc, 4) << " -> " << fixed(result.attacked.mcc, 4)
      << "  rpd " << show(result.rpd.mcc) << '\n';
  return result;
}

// ---------------------------------------------------------------------------
// grid

void cmd_grid(const RunConfig& config, const fs::path& dataset_path, std::ostream& out) {
  const LoadedDataset loaded = load_dataset_file(dataset_path);
  out << "grid search over " << config.grid.cell_count() << " cells\n";
  const auto result = train::grid_search(
      config.grid, [&](std::size_t lag) { return loaded.dataset.examples(lag); },
      config.model_dims(), config.train);

  write_file(config.out / "grid.csv",
             [&](std::ostream& o) { train::write_grid_csv(o, result); });

  RunConfig best = config;
  best.dims.hidden = result.best.hidden;
  best.split.lag = result.best.lag;
  best.train.alpha = result.best.lambda;
  best.train.beta = result.best.beta;
  best.train.epsilon = result.best.epsilon;
  best.train.mode = train::TrainMode::kAdversarial;
  write_file(config.out / "best_config.txt", [&](std::ostream& o) { o << to_text(best); });

  const auto& s1 = result.best_stage1;
  out << "  stage 1: U=" << s1.hidden << " T=" << s1.lag << " lambda=" << num(s1.lambda)
      << " val acc " << fixed(s1.val_acc, 2) << '\n';
  out << "  stage 2: beta=" << num(result.best.beta) << " epsilon=" << num(result.best.epsilon)
      << " val acc " << fixed(result.best.val_acc, 2) << '\n';
}

// ---------------------------------------------------------------------------
// report

void cmd_report(const RunConfig& config, const fs::path& dataset_path, std::ostream& out) {
  const LoadedDataset loaded = load_dataset_file(dataset_path);
  std::vector<eval::MetricsReport> model, mom, mr, attacked;
  std::vector<double> rpd_acc, rpd_mcc;
  std::ostringstream quiet;
  for (auto seed : config.seeds) {
    RunConfig run = config;
    run.train.seed = seed;
    run.out = config.out / ("seed_" + std::to_string(seed));
    train_run(run, loaded, out);
    const Loaded pair = load_pair(run.out / kCheckpointFile, dataset_path);
    const EvalOutcome e = eval_run(run, pair, quiet);
    const AttackOutcome a = attack_run(run, pair, run.effective_attack_epsilon(), quiet);
    model.push_back(e.model);
    mom.push_back(e.mom);
    mr.push_back(e.mr);
    attacked.push_back(a.attacked);
    if (a.rpd.acc) rpd_acc.push_back(*a.rpd.acc);
    if (a.rpd.mcc) rpd_mcc.push_back(*a.rpd.mcc);
  }

  const std::string name = model_name(config.model_dims(), config.train.mode);
  struct Row {
    std::string method;
    eval::MultiRunSummary summary;
  };
  const std::vector<Row> rows{{"MOM", eval::multi_run_report(mom)},
                              {"MR", eval::multi_run_report(mr)},
                              {name, eval::multi_run_report(model)},
                              {name + " attacked", eval::multi_run_report(attacked)}};
  // RPD is undefined for runs whose clean metric is zero; those runs are skipped.
  auto summarize = [](const std::vector<double>& v) -> std::optional<eval::MeanStd> {
    if (v.empty()) return std::nullopt;
    return eval::mean_std(v);
  };
  const auto ra = summarize(rpd_acc);
  const auto rm = summarize(rpd_mcc);
  auto mean_of = [](const std::optional<eval::MeanStd>& m) {
    return m ? std::optional<double>(m->mean) : std::nullopt;
  };
  auto std_of = [](const std::optional<eval::MeanStd>& m) {
    return m ? std::optional<double>(m->std) : std::nullopt;
  };
  auto show = [](const std::optional<eval::MeanStd>& m) {
    return m ? eval::format_mean_std(*m, 4) : std::string("n/a");
  };

  write_file(config.out / "report.csv", [&](std::ostream& o) {
    o << "method,runs,acc_mean,acc_std,mcc_mean,mcc_std\n";
    for (const auto& r : rows) {
      o << r.method << ',' << r.summary.runs << ',' << num(r.summary.acc.mean) << ','
        << num(r.summary.acc.std) << ',' << num(r.summary.mcc.mean) << ','
        << num(r.summary.mcc.std) << '\n';
    }
    o << "RPD," << config.seeds.size() << ',' << num(mean_of(ra)) << ',' << num(std_of(ra)) << ','
      << num(mean_of(rm)) << ',' << num(std_of(rm)) << '\n';
  });

  out << "summary over " << config.seeds.size() << " runs (test split)\n";
  for (const auto& r : rows) {
    out << "  " << r.method << ": acc " << eval::format_mean_std(r.summary.acc, 2) << "  mcc "
        << eval::format_mean_std(r.summary.mcc, 4) << '\n';
  }
  out << "  RPD: acc " << show(ra) << "  mcc " << show(rm) << '\n';
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNumeric: return kExitDivergence;
    case ErrorKind::kShape:
    case ErrorKind::kMismatch: return kExitMismatch;
    case ErrorKind::kParse:
    case ErrorKind::kData:
    case ErrorKind::kAlignment:
    case ErrorKind::kWindow:
    case ErrorKind::kContract:
    case ErrorKind::kIo: return kExitInput;
  }
  return kExitFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial attentive LSTM for stock movement prediction", "advalstm"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string dataset_path;
  std::string checkpoint_path;
  std::optional<double> epsilon;
  app.add_option("--config", config_path, "Run config file (key = value lines)")->required();
  app.add_option("--seed", seed, "Override the training seed");
  app.add_option("--out", out_dir, "Override the output directory");

  auto* build = app.add_subcommand("build", "Ingest, align, featurize and split into a dataset file");
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  auto* grid = app.add_subcommand("grid", "Two-stage hyper-parameter search on validation");
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint and the indicator baselines");
  auto* attack = app.add_subcommand("attack", "Evaluate a checkpoint under adversarial examples");
  auto* report = app.add_subcommand("report", "Train and evaluate once per configured seed");
  for (auto* sub : {train_cmd, grid, eval_cmd, attack, report}) {
    sub->add_option("--dataset", dataset_path, "Dataset file (default <out>/dataset.advds)");
  }
  for (auto* sub : {eval_cmd, attack}) {
    sub->add_option("--checkpoint", checkpoint_path, "Checkpoint (default <out>/checkpoint.bin)");
  }
  attack->add_option("--epsilon", epsilon, "Attack radius (default attack_epsilon or epsilon)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    RunConfig config = load_config(config_path);
    if (seed) {
      config.train.seed = *seed;
      config.seeds = {*seed};
    }
    if (!out_dir.empty()) config.out = out_dir;
    config.validate();

    const fs::path dataset = dataset_path.empty() ? config.out / kDatasetFile : fs::path(dataset_path);
    const fs::path checkpoint =
        checkpoint_path.empty() ? config.out / kCheckpointFile : fs::path(checkpoint_path);

    if (build->parsed()) {
      cmd_build(config, out, err);
    } else if (train_cmd->parsed()) {
      train_run(config, load_dataset_file(dataset), out);
    } else if (grid->parsed()) {
      cmd_grid(config, dataset, out);
    } else if (eval_cmd->parsed()) {
      eval_run(config, load_pair(checkpoint, dataset), out);
    } else if (attack->parsed()) {
      attack_run(config, load_pair(checkpoint, dataset),
                 epsilon.value_or(config.effective_attack_epsilon()), out);
    } else if (report->parsed()) {
      cmd_report(config, dataset, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace advalstm::cli
