#include "advalstm/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include "advalstm/error.hpp"
#include "advalstm/text.hpp"

namespace advalstm::cli {

namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  std::string_view name;
  Setter set;
  Getter get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  fail(ErrorKind::kParse, "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  auto v = text::parse_double(value);
  if (!v) bad_value(key, value);
  return *v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  auto v = text::parse_uint(value);
  if (!v) bad_value(key, value);
  return *v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

market::Date to_date(std::string_view key, std::string_view value) {
  auto d = market::parse_date(value);
  if (!d) bad_value(key, value);
  return *d;
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view key, std::string_view value, Parse parse) {
  std::vector<T> out;
  for (auto item : text::split(value, ',')) {
    item = text::trim(item);
    if (item.empty()) bad_value(key, value);
    out.push_back(static_cast<T>(parse(key, item)));
  }
  return out;
}

template <typename T, typename Format>
std::string join(const std::vector<T>& values, Format format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format(values[i]);
  }
  return out;
}

std::string num(double v) { return text::format_double(v); }
std::string integer(std::uint64_t v) { return std::to_string(v); }

const std::vector<Key>& keys() {
  static const std::vector<Key> kKeys = {
      {"data",
       [](RunConfig& c, std::string_view v) {
         c.data.clear();
         for (auto p : text::split(v, ',')) {
           p = text::trim(p);
           if (!p.empty()) c.data.emplace_back(std::string(p));
         }
       },
       [](const RunConfig& c) {
         return join(c.data, [](const std::filesystem::path& p) { return p.generic_string(); });
       }},
      {"train_end", [](RunConfig& c, std::string_view v) { c.split.train_end = to_date("train_end", v); },
       [](const RunConfig& c) { return market::format_date(c.split.train_end); }},
      {"val_end", [](RunConfig& c, std::string_view v) { c.split.val_end = to_date("val_end", v); },
       [](const RunConfig& c) { return market::format_date(c.split.val_end); }},
      {"test_end", [](RunConfig& c, std::string_view v) { c.split.test_end = to_date("test_end", v); },
       [](const RunConfig& c) { return market::format_date(c.split.test_end); }},
      {"lag", [](RunConfig& c, std::string_view v) { c.split.lag = to_uint("lag", v); },
       [](const RunConfig& c) { return integer(c.split.lag); }},
      {"pos_threshold",
       [](RunConfig& c, std::string_view v) { c.split.pos_threshold = to_double("pos_threshold", v); },
       [](const RunConfig& c) { return num(c.split.pos_threshold); }},
      {"neg_threshold",
       [](RunConfig& c, std::string_view v) { c.split.neg_threshold = to_double("neg_threshold", v); },
       [](const RunConfig& c) { return num(c.split.neg_threshold); }},
      {"min_coverage",
       [](RunConfig& c, std::string_view v) { c.min_coverage = to_double("min_coverage", v); },
       [](const RunConfig& c) { return num(c.min_coverage); }},
      {"mapping_size", [](RunConfig& c, std::string_view v) { c.dims.mapping = to_uint("mapping_size", v); },
       [](const RunConfig& c) { return integer(c.dims.mapping); }},
      {"hidden_size", [](RunConfig& c, std::string_view v) { c.dims.hidden = to_uint("hidden_size", v); },
       [](const RunConfig& c) { return integer(c.dims.hidden); }},
      {"attention_size",
       [](RunConfig& c, std::string_view v) { c.dims.attention = to_uint("attention_size", v); },
       [](const RunConfig& c) { return integer(c.dims.attention); }},
      {"use_attention",
       [](RunConfig& c, std::string_view v) { c.dims.use_attention = to_bool("use_attention", v); },
       [](const RunConfig& c) { return std::string(c.dims.use_attention ? "true" : "false"); }},
      {"mode",
       [](RunConfig& c, std::string_view v) {
         auto m = train::parse_train_mode(v);
         if (!m) bad_value("mode", v);
         c.train.mode = *m;
       },
       [](const RunConfig& c) { return std::string(train::to_string(c.train.mode)); }},
      {"alpha", [](RunConfig& c, std::string_view v) { c.train.alpha = to_double("alpha", v); },
       [](const RunConfig& c) { return num(c.train.alpha); }},
      {"beta", [](RunConfig& c, std::string_view v) { c.train.beta = to_double("beta", v); },
       [](const RunConfig& c) { return num(c.train.beta); }},
      {"epsilon", [](RunConfig& c, std::string_view v) { c.train.epsilon = to_double("epsilon", v); },
       [](const RunConfig& c) { return num(c.train.epsilon); }},
      {"learning_rate",
       [](RunConfig& c, std::string_view v) { c.train.adam.learning_rate = to_double("learning_rate", v); },
       [](const RunConfig& c) { return num(c.train.adam.learning_rate); }},
      {"adam_beta1", [](RunConfig& c, std::string_view v) { c.train.adam.beta1 = to_double("adam_beta1", v); },
       [](const RunConfig& c) { return num(c.train.adam.beta1); }},
      {"adam_beta2", [](RunConfig& c, std::string_view v) { c.train.adam.beta2 = to_double("adam_beta2", v); },
       [](const RunConfig& c) { return num(c.train.adam.beta2); }},
      {"adam_epsilon",
       [](RunConfig& c, std::string_view v) { c.train.adam.epsilon = to_double("adam_epsilon", v); },
       [](const RunConfig& c) { return num(c.train.adam.epsilon); }},
      {"batch_size", [](RunConfig& c, std::string_view v) { c.train.batch_size = to_uint("batch_size", v); },
       [](const RunConfig& c) { return integer(c.train.batch_size); }},
      {"epochs", [](RunConfig& c, std::string_view v) { c.train.epochs = to_uint("epochs", v); },
       [](const RunConfig& c) { return integer(c.train.epochs); }},
      {"patience", [](RunConfig& c, std::string_view v) { c.train.patience = to_uint("patience", v); },
       [](const RunConfig& c) { return integer(c.train.patience); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.train.seed = to_uint("seed", v); },
       [](const RunConfig& c) { return integer(c.train.seed); }},
      {"seeds", [](RunConfig& c, std::string_view v) { c.seeds = to_list<std::uint64_t>("seeds", v, to_uint); },
       [](const RunConfig& c) { return join(c.seeds, integer); }},
      {"attack_epsilon",
       [](RunConfig& c, std::string_view v) {
         if (v.empty()) {
           c.attack_epsilon.reset();
         } else {
           c.attack_epsilon = to_double("attack_epsilon", v);
         }
       },
       [](const RunConfig& c) { return c.attack_epsilon ? num(*c.attack_epsilon) : std::string(); }},
      {"mom_window",
       [](RunConfig& c, std::string_view v) { c.indicators.mom_window = to_uint("mom_window", v); },
       [](const RunConfig& c) { return integer(c.indicators.mom_window); }},
      {"mr_window", [](RunConfig& c, std::string_view v) { c.indicators.mr_window = to_uint("mr_window", v); },
       [](const RunConfig& c) { return integer(c.indicators.mr_window); }},
      {"histogram_bins",
       [](RunConfig& c, std::string_view v) { c.histogram_bins = to_uint("histogram_bins", v); },
       [](const RunConfig& c) { return integer(c.histogram_bins); }},
      {"out", [](RunConfig& c, std::string_view v) { c.out = std::string(v); },
       [](const RunConfig& c) { return c.out.generic_string(); }},
      {"grid.hidden",
       [](RunConfig& c, std::string_view v) { c.grid.hidden = to_list<std::size_t>("grid.hidden", v, to_uint); },
       [](const RunConfig& c) { return join(c.grid.hidden, integer); }},
      {"grid.lag",
       [](RunConfig& c, std::string_view v) { c.grid.lag = to_list<std::size_t>("grid.lag", v, to_uint); },
       [](const RunConfig& c) { return join(c.grid.lag, integer); }},
      {"grid.lambda",
       [](RunConfig& c, std::string_view v) { c.grid.lambda = to_list<double>("grid.lambda", v, to_double); },
       [](const RunConfig& c) { return join(c.grid.lambda, num); }},
      {"grid.beta",
       [](RunConfig& c, std::string_view v) { c.grid.beta = to_list<double>("grid.beta", v, to_double); },
       [](const RunConfig& c) { return join(c.grid.beta, num); }},
      {"grid.epsilon",
       [](RunConfig& c, std::string_view v) { c.grid.epsilon = to_list<double>("grid.epsilon", v, to_double); },
       [](const RunConfig& c) { return join(c.grid.epsilon, num); }},
  };
  return kKeys;
}

}  // namespace

RunConfig::RunConfig() {
  using namespace std::chrono;
  split.train_end = year{2015} / August / 1;
  split.val_end = year{2015} / October / 1;
  split.test_end = year{2016} / January / 1;
}

nn::ModelDims RunConfig::model_dims() const {
  nn::ModelDims d = dims;
  d.lag = split.lag;
  return d;
}

void RunConfig::validate() const {
  split.validate();
  model_dims().validate();
  train.validate();
  indicators.validate();
  grid.validate();
  if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) {
    fail(ErrorKind::kContract, "min_coverage must lie in [0, 1]");
  }
  if (attack_epsilon && !(*attack_epsilon >= 0.0)) {
    fail(ErrorKind::kContract, "attack_epsilon must be non-negative");
  }
  if (histogram_bins < 2) fail(ErrorKind::kContract, "histogram_bins must be at least 2");
  if (seeds.empty()) fail(ErrorKind::kContract, "seeds must list at least one seed");
}

RunConfig parse_config(std::istream& in, std::string_view source,
                       const std::filesystem::path& base_dir) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = line;
    if (const auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
    row = text::trim(row);
    if (row.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = row.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::kParse, where + ": expected 'key = value'");
    const auto key = text::trim(row.substr(0, eq));
    const auto value = text::trim(row.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) fail(ErrorKind::kParse, where + ": unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      fail(ErrorKind::kParse, where + ": duplicate key '" + std::string(key) + "'");
    }
    try {
      it->set(config, value);
    } catch (const Error& e) {
      fail(ErrorKind::kParse, where + ": " + e.what());
    }
  }
  if (!base_dir.empty()) {
    for (auto& p : config.data) {
      if (p.is_relative()) p = base_dir / p;
    }
    if (seen.contains("out") && config.out.is_relative()) config.out = base_dir / config.out;
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  return parse_config(in, path.string(), std::filesystem::absolute(path).parent_path().lexically_normal());
}

namespace {

std::string render(const RunConfig& config, bool with_out) {
  std::string out;
  for (const auto& k : keys()) {
    if (!with_out && k.name == "out") continue;
    out += std::string(k.name) + " = " + k.get(config) + '\n';
  }
  return out;
}

}  // namespace

std::string to_text(const RunConfig& config) { return render(config, true); }

std::string experiment_text(const RunConfig& config) { return render(config, false); }

std::string config_hash(const RunConfig& config) {
  return text::git_blob_hash(experiment_text(config));
}

}  // namespace advalstm::cli
