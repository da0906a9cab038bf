#include "mixest/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "mixest/svg.hpp"
#include "mixest/toml_lite.hpp"

namespace mixest {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kMetricNames = {
    "kl_vs_target", "kl_vs_best_in_class", "l2_vs_best_in_class"};

// Derived-seed lanes, disjoint from the trial indices 0..trials-1.
constexpr std::uint64_t kReferenceSeedLane = 1000003;
constexpr std::uint64_t kNuProbeSeedLane = 999983;
constexpr std::uint64_t kRegimeSeedLane = 1 << 20;

constexpr int kHeatmapSide = 100;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double pmf_kl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  double kl = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p(j) <= 0.0) continue;
    kl += p(j) * std::log(p(j) / std::max(q(j), 1e-300));
  }
  return std::max(kl, 0.0);
}

std::string sanitize_name(const std::string& s) {
  std::string out;
  for (const char c : s) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return out.empty() ? std::string("unnamed") : out;
}

// ---- config parsing -------------------------------------------------------

void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string req_string(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (!v || !v->is_string()) {
    throw ConfigError(where + ": missing or non-string key '" + std::string(key) + "'");
  }
  return v->get<std::string>();
}

double opt_number(const json& obj, const char* key, double fallback,
                  const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) {
    throw ConfigError(where + ": key '" + std::string(key) + "' must be a number");
  }
  return v->get<double>();
}

std::int64_t opt_integer(const json& obj, const char* key, std::int64_t fallback,
                         const std::string& where) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) {
    throw ConfigError(where + ": key '" + std::string(key) + "' must be an integer");
  }
  return v->get<std::int64_t>();
}

std::int64_t req_integer(const json& obj, const char* key, const std::string& where) {
  if (!find(obj, key)) {
    throw ConfigError(where + ": missing key '" + std::string(key) + "'");
  }
  return opt_integer(obj, key, 0, where);
}

TargetSpec parse_target(const json& j) {
  TargetSpec spec;
  spec.kind = req_string(j, "kind", "[target]");
  if (spec.kind == "four_mode") {
    expect_keys(j, {"kind"}, "[target] four_mode");
  } else if (spec.kind == "wide_spikes") {
    expect_keys(j, {"kind", "wide_sigma", "spikes"}, "[target] wide_spikes");
    spec.wide_sigma = opt_number(j, "wide_sigma", 2.0, "[target]");
    if (const json* sp = find(j, "spikes")) {
      if (!sp->is_array()) throw ConfigError("[target]: spikes must be an array");
      for (const json& s : *sp) {
        expect_keys(s, {"x", "y", "sigma"}, "[target] spike");
        SpikeSpec spike;
        spike.x = opt_number(s, "x", 0.0, "spike");
        spike.y = opt_number(s, "y", 0.0, "spike");
        spike.sigma = opt_number(s, "sigma", 0.1, "spike");
        spec.spikes.push_back(spike);
      }
    }
  } else if (spec.kind == "sparse_categorical") {
    expect_keys(j, {"kind", "alphabet", "support", "decay", "perm_seed"},
                "[target] sparse_categorical");
    spec.alphabet = req_integer(j, "alphabet", "[target]");
    spec.support = req_integer(j, "support", "[target]");
    const std::string decay = find(j, "decay")
                                  ? req_string(j, "decay", "[target]")
                                  : std::string("zipf");
    if (decay == "zipf") {
      spec.decay = CategoricalDecay::Zipf;
    } else if (decay == "uniform") {
      spec.decay = CategoricalDecay::Uniform;
    } else {
      throw ConfigError("[target]: decay must be 'zipf' or 'uniform'");
    }
    spec.perm_seed =
        static_cast<std::uint64_t>(opt_integer(j, "perm_seed", 1234, "[target]"));
  } else {
    throw ConfigError("[target]: unknown kind '" + spec.kind + "'");
  }
  return spec;
}

DictionarySpec parse_dictionary(const json& j) {
  DictionarySpec spec;
  spec.kind = req_string(j, "kind", "[dictionary]");
  if (spec.kind == "gaussian_grid") {
    expect_keys(j, {"kind", "layers"}, "[dictionary] gaussian_grid");
    const json* layers = find(j, "layers");
    if (!layers || !layers->is_array() || layers->empty()) {
      throw ConfigError("[dictionary]: gaussian_grid needs a nonempty layers array");
    }
    for (const json& l : *layers) {
      expect_keys(l, {"grid_side", "sigma"}, "[dictionary] layer");
      GridLayer layer;
      layer.grid_side = static_cast<int>(req_integer(l, "grid_side", "layer"));
      layer.sigma = opt_number(l, "sigma", 0.0, "layer");
      if (!find(l, "sigma")) throw ConfigError("layer: missing key 'sigma'");
      spec.layers.push_back(layer);
    }
  } else if (spec.kind == "categorical") {
    expect_keys(j, {"kind", "alphabet", "epsilon"}, "[dictionary] categorical");
    spec.alphabet = req_integer(j, "alphabet", "[dictionary]");
    spec.epsilon = opt_number(j, "epsilon", 0.0, "[dictionary]");
    if (!find(j, "epsilon")) throw ConfigError("[dictionary]: missing key 'epsilon'");
  } else {
    throw ConfigError("[dictionary]: unknown kind '" + spec.kind + "'");
  }
  return spec;
}

ScheduleSpec parse_schedule(const json& j, const std::string& where) {
  ScheduleSpec spec;
  expect_keys(j, {"kind", "gamma0", "decay", "nu"}, where);
  spec.kind = find(j, "kind") ? req_string(j, "kind", where) : std::string("power");
  spec.gamma0 = opt_number(j, "gamma0", 0.1, where);
  spec.decay = opt_number(j, "decay", 0.35, where);
  spec.nu = opt_number(j, "nu", 0.0, where);
  return spec;
}

EstimatorSpec parse_estimator(const json& j, std::size_t index) {
  const std::string where = "[[estimators]] #" + std::to_string(index + 1);
  expect_keys(j, {"name", "kind", "mirror", "output", "sign", "schedule"}, where);
  EstimatorSpec spec;
  spec.name = find(j, "name") ? req_string(j, "name", where)
                              : "estimator_" + std::to_string(index + 1);
  spec.kind = find(j, "kind") ? req_string(j, "kind", where) : std::string("smd");
  if (spec.kind != "smd" && spec.kind != "softmax_sgd") {
    throw ConfigError(where + ": kind must be 'smd' or 'softmax_sgd'");
  }
  const std::string mirror =
      find(j, "mirror") ? req_string(j, "mirror", where) : std::string("entropy");
  if (mirror == "euclidean") {
    spec.mirror = MirrorKind::Euclidean;
  } else if (mirror == "entropy") {
    spec.mirror = MirrorKind::NegativeEntropy;
  } else {
    throw ConfigError(where + ": mirror must be 'euclidean' or 'entropy'");
  }
  const std::string output =
      find(j, "output") ? req_string(j, "output", where) : std::string("last");
  if (output == "last") {
    spec.output = OutputMode::LastIterate;
  } else if (output == "cesaro") {
    spec.output = OutputMode::Cesaro;
  } else {
    throw ConfigError(where + ": output must be 'last' or 'cesaro'");
  }
  const std::string sign =
      find(j, "sign") ? req_string(j, "sign", where) : std::string("descent");
  if (sign == "descent") {
    spec.sign = SignConvention::Descent;
  } else if (sign == "literal") {
    spec.sign = SignConvention::Literal;
  } else {
    throw ConfigError(where + ": sign must be 'descent' or 'literal'");
  }
  if (const json* sched = find(j, "schedule")) {
    spec.schedule = parse_schedule(*sched, where + ".schedule");
  }
  return spec;
}

BaselineSpec parse_baseline(const json& j, std::size_t index) {
  const std::string where = "[[baselines]] #" + std::to_string(index + 1);
  expect_keys(j, {"name", "kind", "fit_samples", "k", "c"}, where);
  BaselineSpec spec;
  spec.kind = req_string(j, "kind", where);
  spec.name = find(j, "name") ? req_string(j, "name", where) : spec.kind;
  spec.fit_samples = opt_integer(j, "fit_samples", 0, where);
  spec.k = static_cast<int>(opt_integer(j, "k", 0, where));
  spec.c = opt_number(j, "c", 1.0, where);
  return spec;
}

json schedule_to_json(const ScheduleSpec& s) {
  json j{{"kind", s.kind}};
  if (s.kind == "power") {
    j["gamma0"] = s.gamma0;
    j["decay"] = s.decay;
  } else if (s.kind == "strongly_convex" && s.nu > 0.0) {
    j["nu"] = s.nu;
  }
  return j;
}

}  // namespace

// ---- spec builders --------------------------------------------------------

Target TargetSpec::build() const {
  if (kind == "four_mode") return Target::four_mode();
  if (kind == "wide_spikes") {
    return spikes.empty() ? Target::wide_plus_spikes()
                          : Target::wide_plus_spikes(wide_sigma, spikes);
  }
  if (kind == "sparse_categorical") {
    return Target::sparse_categorical(alphabet, support, decay, perm_seed);
  }
  throw ConfigError("[target]: unknown kind '" + kind + "'");
}

Dictionary DictionarySpec::build(const DomainBox& box) const {
  if (kind == "gaussian_grid") return Dictionary::multiscale_gaussian(box, layers);
  if (kind == "categorical") return Dictionary::categorical(alphabet, epsilon);
  throw ConfigError("[dictionary]: unknown kind '" + kind + "'");
}

// ---- ExperimentConfig -----------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a table");
  expect_keys(j, {"target", "dictionary", "estimators", "baselines", "run"},
              "config root");
  ExperimentConfig cfg;
  if (!find(j, "target")) throw ConfigError("config: missing [target]");
  if (!find(j, "dictionary")) throw ConfigError("config: missing [dictionary]");
  cfg.target = parse_target(j.at("target"));
  cfg.dictionary = parse_dictionary(j.at("dictionary"));
  if (const json* ests = find(j, "estimators")) {
    if (!ests->is_array()) throw ConfigError("config: estimators must be an array");
    for (std::size_t i = 0; i < ests->size(); ++i) {
      cfg.estimators.push_back(parse_estimator((*ests)[i], i));
    }
  }
  if (const json* bases = find(j, "baselines")) {
    if (!bases->is_array()) throw ConfigError("config: baselines must be an array");
    for (std::size_t i = 0; i < bases->size(); ++i) {
      cfg.baselines.push_back(parse_baseline((*bases)[i], i));
    }
  }
  if (const json* run = find(j, "run")) {
    expect_keys(*run,
                {"stream_length", "trials", "checkpoints", "metrics",
                 "reference_samples", "kl_grid", "nu", "seed", "output_dir", "jobs"},
                "[run]");
    cfg.stream_length = opt_integer(*run, "stream_length", 1000, "[run]");
    cfg.trials = static_cast<int>(opt_integer(*run, "trials", 1, "[run]"));
    if (const json* ck = find(*run, "checkpoints")) {
      if (!ck->is_array()) throw ConfigError("[run]: checkpoints must be an array");
      for (const json& c : *ck) {
        if (!c.is_number_integer()) {
          throw ConfigError("[run]: checkpoints must be integers");
        }
        cfg.checkpoints.push_back(c.get<std::int64_t>());
      }
    }
    if (const json* ms = find(*run, "metrics")) {
      if (!ms->is_array()) throw ConfigError("[run]: metrics must be an array");
      cfg.metrics.clear();
      for (const json& m : *ms) {
        if (!m.is_string()) throw ConfigError("[run]: metrics must be strings");
        cfg.metrics.push_back(m.get<std::string>());
      }
    }
    cfg.reference_samples =
        opt_integer(*run, "reference_samples", 20000, "[run]");
    cfg.kl_grid = static_cast<int>(opt_integer(*run, "kl_grid", 400, "[run]"));
    cfg.nu = opt_number(*run, "nu", 0.0, "[run]");
    cfg.seed = static_cast<std::uint64_t>(opt_integer(*run, "seed", 1, "[run]"));
    if (find(*run, "output_dir")) {
      cfg.output_dir = req_string(*run, "output_dir", "[run]");
    }
    cfg.jobs = static_cast<int>(opt_integer(*run, "jobs", 1, "[run]"));
  }
  cfg.validate();
  return cfg;
}

nlohmann::json ExperimentConfig::load_tree(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".json") {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw ConfigError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
  }
  return toml::parse_file(path);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_json(load_tree(path));
}

json ExperimentConfig::to_json() const {
  json j;
  json t{{"kind", target.kind}};
  if (target.kind == "wide_spikes") {
    t["wide_sigma"] = target.wide_sigma;
    if (!target.spikes.empty()) {
      json arr = json::array();
      for (const SpikeSpec& s : target.spikes) {
        arr.push_back({{"x", s.x}, {"y", s.y}, {"sigma", s.sigma}});
      }
      t["spikes"] = arr;
    }
  } else if (target.kind == "sparse_categorical") {
    t["alphabet"] = target.alphabet;
    t["support"] = target.support;
    t["decay"] = target.decay == CategoricalDecay::Zipf ? "zipf" : "uniform";
    t["perm_seed"] = target.perm_seed;
  }
  j["target"] = t;

  json d{{"kind", dictionary.kind}};
  if (dictionary.kind == "gaussian_grid") {
    json arr = json::array();
    for (const GridLayer& l : dictionary.layers) {
      arr.push_back({{"grid_side", l.grid_side}, {"sigma", l.sigma}});
    }
    d["layers"] = arr;
  } else {
    d["alphabet"] = dictionary.alphabet;
    d["epsilon"] = dictionary.epsilon;
  }
  j["dictionary"] = d;

  json ests = json::array();
  for (const EstimatorSpec& e : estimators) {
    ests.push_back(
        {{"name", e.name},
         {"kind", e.kind},
         {"mirror", e.mirror == MirrorKind::Euclidean ? "euclidean" : "entropy"},
         {"output", e.output == OutputMode::Cesaro ? "cesaro" : "last"},
         {"sign", e.sign == SignConvention::Literal ? "literal" : "descent"},
         {"schedule", schedule_to_json(e.schedule)}});
  }
  j["estimators"] = ests;

  json bases = json::array();
  for (const BaselineSpec& b : baselines) {
    json bj{{"name", b.name}, {"kind", b.kind}, {"fit_samples", b.fit_samples}};
    if (b.kind == "knn") bj["k"] = b.k;
    if (b.kind == "add_constant") bj["c"] = b.c;
    bases.push_back(bj);
  }
  j["baselines"] = bases;

  json run{{"stream_length", stream_length},
           {"trials", trials},
           {"metrics", metrics},
           {"reference_samples", reference_samples},
           {"kl_grid", kl_grid},
           {"seed", seed},
           {"output_dir", output_dir},
           {"jobs", jobs}};
  if (!checkpoints.empty()) run["checkpoints"] = checkpoints;
  if (nu > 0.0) run["nu"] = nu;
  j["run"] = run;
  return j;
}

std::vector<std::int64_t> ExperimentConfig::resolved_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<std::int64_t> out;
  const double hi = std::log10(static_cast<double>(stream_length));
  for (int i = 0; i < 20; ++i) {
    const double v = std::pow(10.0, hi * i / 19.0);
    auto n = static_cast<std::int64_t>(std::llround(v));
    n = std::clamp<std::int64_t>(n, 1, stream_length);
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (stream_length < 1) throw ConfigError("[run]: stream_length must be >= 1");
  if (trials < 1) throw ConfigError("[run]: trials must be >= 1");
  if (kl_grid < 16) throw ConfigError("[run]: kl_grid must be >= 16");
  if (reference_samples < 10) {
    throw ConfigError("[run]: reference_samples must be >= 10");
  }
  if (jobs < 1) throw ConfigError("[run]: jobs must be >= 1");
  if (nu < 0.0) throw ConfigError("[run]: nu must be nonnegative");

  if (metrics.empty()) throw ConfigError("[run]: metrics must be nonempty");
  for (const std::string& m : metrics) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), m) ==
        kMetricNames.end()) {
      throw ConfigError("[run]: unknown metric '" + m + "'");
    }
  }
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t k = i + 1; k < metrics.size(); ++k) {
      if (metrics[i] == metrics[k]) {
        throw ConfigError("[run]: duplicate metric '" + metrics[i] + "'");
      }
    }
  }

  if (!checkpoints.empty()) {
    std::int64_t prev = 0;
    for (const std::int64_t c : checkpoints) {
      if (c <= prev) throw ConfigError("[run]: checkpoints must be ascending and >= 1");
      prev = c;
    }
    if (checkpoints.back() > stream_length) {
      throw ConfigError("[run]: max checkpoint exceeds stream_length");
    }
  }

  if (estimators.empty() && baselines.empty()) {
    throw ConfigError("config: need at least one estimator or baseline");
  }
  std::vector<std::string> names;
  for (const EstimatorSpec& e : estimators) names.push_back(e.name);
  for (const BaselineSpec& b : baselines) names.push_back(b.name);
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t k = i + 1; k < names.size(); ++k) {
      if (names[i] == names[k]) {
        throw ConfigError("config: duplicate estimator/baseline name '" + names[i] + "'");
      }
    }
  }

  const bool cat_target = target.categorical();
  if (cat_target != dictionary.categorical()) {
    throw ConfigError("config: categorical targets require categorical dictionaries "
                      "and continuous targets require gaussian_grid");
  }
  if (cat_target && target.alphabet != dictionary.alphabet) {
    throw ConfigError("config: target and dictionary alphabet sizes differ");
  }

  for (const EstimatorSpec& e : estimators) {
    const std::string where = "estimator '" + e.name + "'";
    if (e.kind != "smd" && e.kind != "softmax_sgd") {
      throw ConfigError(where + ": kind must be 'smd' or 'softmax_sgd'");
    }
    const ScheduleSpec& s = e.schedule;
    if (s.kind == "power") {
      if (!(s.gamma0 > 0.0)) throw ConfigError(where + ": gamma0 must be positive");
      if (s.decay < 0.0 || s.decay > 1.0) {
        throw ConfigError(where + ": decay must lie in [0, 1]");
      }
    } else if (s.kind == "strongly_convex") {
      if (s.nu < 0.0) throw ConfigError(where + ": nu must be nonnegative");
    } else if (s.kind != "constant_sqrt") {
      throw ConfigError(where + ": unknown schedule kind '" + s.kind + "'");
    }
  }

  for (const BaselineSpec& b : baselines) {
    const std::string where = "baseline '" + b.name + "'";
    if (b.kind == "kde" || b.kind == "knn") {
      if (cat_target) throw ConfigError(where + ": needs a continuous target");
      const std::int64_t min_fit = b.kind == "kde" ? 10 : 1;
      if (b.fit_samples < min_fit || b.fit_samples > stream_length) {
        throw ConfigError(where + ": fit_samples must lie in [" +
                          std::to_string(min_fit) + ", stream_length]");
      }
      if (b.kind == "knn" && b.k < 0) throw ConfigError(where + ": k must be >= 0");
    } else if (b.kind == "add_constant") {
      if (!cat_target) throw ConfigError(where + ": needs a categorical target");
      if (b.fit_samples < 1 || b.fit_samples > stream_length) {
        throw ConfigError(where + ": fit_samples must lie in [1, stream_length]");
      }
      if (b.c < 0.0) throw ConfigError(where + ": c must be nonnegative");
    } else {
      throw ConfigError(where + ": unknown kind '" + b.kind + "'");
    }
    const bool needs_kl_target =
        std::find(metrics.begin(), metrics.end(), "kl_vs_target") == metrics.end();
    if (needs_kl_target) {
      throw ConfigError(where + ": baselines report kl_vs_target; add it to [run] metrics");
    }
  }
}

// ---- record I/O -----------------------------------------------------------

void ExperimentRecord::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write record: " + path);
  out << data.dump(2) << "\n";
}

ExperimentRecord ExperimentRecord::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read record: " + path);
  ExperimentRecord rec;
  try {
    in >> rec.data;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("record parse error in " + path + ": " + e.what());
  }
  return rec;
}

// ---- run_experiment -------------------------------------------------------

namespace {

struct Oracles {
  GInfEstimate g_inf;
  std::optional<BestInClass> best;
  bool have_nu = false;
  NuEstimate nu_estimate;
  double nu_resolved = 0.0;  // bound/schedule nu after override resolution
  std::string nu_source = "none";
};

StepSchedule build_schedule(const ScheduleSpec& s, std::int64_t horizon,
                            const MirrorMap& mirror, Eigen::Index m,
                            const Oracles& oracles, const std::string& who) {
  if (s.kind == "power") return StepSchedule::power_decay(s.gamma0, s.decay);
  if (s.kind == "strongly_convex") {
    const double nu = s.nu > 0.0 ? s.nu : oracles.nu_resolved;
    if (!(nu > 0.0)) {
      throw ConfigError(who + ": strongly_convex schedule has no usable nu "
                              "(set nu explicitly or enable estimation)");
    }
    return StepSchedule::strongly_convex(nu);
  }
  if (!(oracles.g_inf.value > 0.0) || !std::isfinite(oracles.g_inf.value)) {
    throw ConfigError(who + ": constant_sqrt schedule needs a finite G_inf bound; "
                            "this dictionary's component ratio overflows double");
  }
  return StepSchedule::constant_sqrt_n(horizon, mirror.r_phi(m), oracles.g_inf.value);
}

struct TrialOutput {
  std::uint64_t checksum = 0;
  // [estimator][metric][checkpoint]
  std::vector<std::vector<std::vector<double>>> est_values;
  std::vector<double> est_seconds;
  std::vector<Eigen::VectorXd> final_weights;  // per estimator, last checkpoint
  // [baseline][metric index into baseline metric list (single entry)]
  std::vector<double> base_values;
  std::vector<double> base_seconds;
  std::vector<json> base_details;
};

double checked_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2 || !std::isfinite(mean)) return 0.0;
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

json grid_to_json(const Eigen::MatrixXd& g) {
  json rows = json::array();
  for (Eigen::Index b = 0; b < g.rows(); ++b) {
    json row = json::array();
    for (Eigen::Index a = 0; a < g.cols(); ++a) row.push_back(g(b, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_output_dir_writable(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir +
                             "': " + ec.message());
  }
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) {
      throw std::runtime_error("output directory '" + dir + "' is not writable");
    }
  }
  fs::remove(probe, ec);
}

}  // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  check_output_dir_writable(cfg.output_dir);

  const Target target = cfg.target.build();
  const Dictionary dict = cfg.dictionary.build(cfg.box);
  const Eigen::Index m_size = dict.size();
  const std::vector<std::int64_t> ckpts = cfg.resolved_checkpoints();
  if (ckpts.back() > cfg.stream_length) {
    throw ConfigError("[run]: max checkpoint exceeds stream_length");
  }

  const bool need_best =
      std::any_of(cfg.metrics.begin(), cfg.metrics.end(), [](const std::string& m) {
        return m == "kl_vs_best_in_class" || m == "l2_vs_best_in_class";
      });
  const bool need_nu_estimate =
      cfg.nu <= 0.0 &&
      std::any_of(cfg.estimators.begin(), cfg.estimators.end(),
                  [](const EstimatorSpec& e) {
                    return e.schedule.kind == "strongly_convex" && e.schedule.nu <= 0.0;
                  });
  const bool any_strongly_convex =
      std::any_of(cfg.estimators.begin(), cfg.estimators.end(),
                  [](const EstimatorSpec& e) {
                    return e.schedule.kind == "strongly_convex";
                  });

  Oracles oracles;
  oracles.g_inf = dict.g_infinity();

  ReferenceTable ref;
  bool have_ref = false;
  const bool want_bounds = dict.is_categorical() && any_strongly_convex;
  if (need_best || need_nu_estimate || want_bounds) {
    if (dict.is_categorical()) {
      ref = ReferenceTable::from_pmf(dict, target.pmf());
    } else {
      Rng ref_rng(derive_seed(cfg.seed, kReferenceSeedLane));
      const std::vector<SamplePoint> ref_samples =
          target.sample(ref_rng, cfg.reference_samples);
      ref = ReferenceTable::from_samples(dict, ref_samples);
    }
    have_ref = true;
  }
  if (have_ref && (need_best || want_bounds)) {
    oracles.best = solve_best_in_class(dict, ref);
  }
  if (cfg.nu > 0.0) {
    oracles.nu_resolved = cfg.nu;
    oracles.nu_source = "config";
  } else if (need_nu_estimate) {
    const std::vector<WeightVector> probes =
        default_nu_probes(m_size, 8, derive_seed(cfg.seed, kNuProbeSeedLane));
    oracles.nu_estimate = estimate_nu(dict, ref, probes);
    oracles.have_nu = true;
    oracles.nu_resolved = oracles.nu_estimate.value;
    oracles.nu_source = "estimated";
    if (!(oracles.nu_resolved > 0.0)) {
      throw std::runtime_error("estimated strong-convexity constant is not positive; "
                               "set nu explicitly in the schedule or [run]");
    }
  }

  // Precompute the target grid once; every continuous KL shares it.
  Eigen::MatrixXd target_grid;
  const bool need_target_kl =
      std::find(cfg.metrics.begin(), cfg.metrics.end(), "kl_vs_target") !=
      cfg.metrics.end();
  if (need_target_kl && target.is_continuous()) {
    target_grid = target.density_grid(cfg.kl_grid);
  }

  const auto metric_value = [&](const std::string& metric,
                                const WeightVector& w) -> double {
    if (metric == "kl_vs_target") {
      if (dict.is_categorical()) return pmf_kl(target.pmf(), dict.mixture_pmf(w));
      return kl_between_grids(target_grid, dict.mixture_grid(w, cfg.kl_grid), cfg.box);
    }
    if (metric == "kl_vs_best_in_class") return kl_divergence(oracles.best->weights, w);
    return (w.vec() - oracles.best->weights.vec()).squaredNorm();
  };

  const WeightVector m0 = WeightVector::uniform(m_size);
  const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(m_size);

  std::vector<TrialOutput> trial_out(cfg.trials);
  std::atomic<int> next_trial{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  const auto run_trial = [&](int t) {
    TrialOutput& out = trial_out[static_cast<std::size_t>(t)];
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    const std::vector<SamplePoint> stream = target.sample(rng, cfg.stream_length);

    StreamChecksum sum;
    for (const SamplePoint& z : stream) sum.update(z);
    out.checksum = sum.value();

    out.est_values.resize(cfg.estimators.size());
    out.est_seconds.resize(cfg.estimators.size(), 0.0);
    out.final_weights.resize(cfg.estimators.size());
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      const EstimatorSpec& spec = cfg.estimators[e];

      // Paired-stream assertion: every estimator must see the same sequence.
      StreamChecksum again;
      for (const SamplePoint& z : stream) again.update(z);
      if (again.value() != out.checksum) {
        throw std::runtime_error("paired-stream checksum mismatch in trial " +
                                 std::to_string(t));
      }

      const MirrorMap mirror(spec.mirror);
      const StepSchedule schedule =
          build_schedule(spec.schedule, cfg.stream_length, mirror, m_size, oracles,
                         "estimator '" + spec.name + "'");
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<WeightVector> snaps;
      try {
        if (spec.kind == "softmax_sgd") {
          snaps = run_softmax_sgd(dict, schedule, w0, stream, ckpts, spec.output);
        } else {
          snaps = run_estimator(dict, spec.mirror, schedule, m0, stream, ckpts,
                                spec.output, spec.sign);
        }
      } catch (const std::exception& ex) {
        throw std::runtime_error("estimator '" + spec.name + "' failed in trial " +
                                 std::to_string(t) + ": " + ex.what());
      }
      out.est_seconds[e] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      out.est_values[e].resize(cfg.metrics.size());
      for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
        out.est_values[e][mi].resize(snaps.size());
        for (std::size_t c = 0; c < snaps.size(); ++c) {
          out.est_values[e][mi][c] = metric_value(cfg.metrics[mi], snaps[c]);
        }
      }
      out.final_weights[e] = snaps.back().vec();
    }

    out.base_values.resize(cfg.baselines.size(), 0.0);
    out.base_seconds.resize(cfg.baselines.size(), 0.0);
    out.base_details.resize(cfg.baselines.size());
    for (std::size_t b = 0; b < cfg.baselines.size(); ++b) {
      const BaselineSpec& spec = cfg.baselines[b];
      const auto n = static_cast<std::size_t>(spec.fit_samples);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (spec.kind == "add_constant") {
          const Eigen::VectorXd counts =
              count_symbols(stream, n, target.alphabet_size());
          const AddConstantModel model = fit_add_constant(counts, spec.c);
          out.base_values[b] = pmf_kl(target.pmf(), model.pmf);
          out.base_details[b] = json{{"c", spec.c}};
        } else {
          Eigen::MatrixX2d pts(spec.fit_samples, 2);
          for (std::size_t i = 0; i < n; ++i) {
            pts(static_cast<Eigen::Index>(i), 0) = stream[i].x;
            pts(static_cast<Eigen::Index>(i), 1) = stream[i].y;
          }
          if (spec.kind == "kde") {
            Rng split_rng(splitmix64(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)) ^
                                     0x9e3779b97f4a7c15ull));
            KdeFitReport report;
            const KdeModel model = fit_kde(pts, split_rng, 30, 0.01, 10.0, 0.2, &report);
            out.base_values[b] = kl_between_grids(
                target_grid, model.density_grid(cfg.box, cfg.kl_grid), cfg.box);
            out.base_details[b] = json{{"bandwidth", model.bandwidth},
                                       {"heldout_loglik", report.heldout_loglik}};
          } else {
            const KnnModel model =
                fit_knn(pts, cfg.box, spec.k, 1e-6, cfg.kl_grid);
            out.base_values[b] = kl_between_grids(
                target_grid, model.score_grid / model.normalizer, cfg.box);
            out.base_details[b] = json{{"k", model.k}};
          }
        }
      } catch (const std::exception& ex) {
        throw std::runtime_error("baseline '" + spec.name + "' failed in trial " +
                                 std::to_string(t) + ": " + ex.what());
      }
      out.base_seconds[b] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  const int jobs = std::clamp(cfg.jobs, 1, cfg.trials);
  if (jobs == 1) {
    for (int t = 0; t < cfg.trials; ++t) run_trial(t);
  } else {
    const auto worker = [&] {
      while (true) {
        const int t = next_trial.fetch_add(1);
        if (t >= cfg.trials) return;
        try {
          run_trial(t);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // ---- aggregation, deterministic by trial index --------------------------
  json record;
  record["schema"] = "mixest-experiment-record-v1";
  record["library_version"] = "0.1.0";
  record["config"] = cfg.to_json();
  record["box"] = {{"xmin", cfg.box.xmin},
                   {"xmax", cfg.box.xmax},
                   {"ymin", cfg.box.ymin},
                   {"ymax", cfg.box.ymax}};
  record["base_seed"] = cfg.seed;
  json seeds = json::array(), checksums = json::array();
  for (int t = 0; t < cfg.trials; ++t) {
    seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    checksums.push_back(hex64(trial_out[static_cast<std::size_t>(t)].checksum));
  }
  record["trial_seeds"] = seeds;
  record["stream_checksums"] = checksums;
  record["checkpoints"] = ckpts;
  record["metrics"] = cfg.metrics;

  json ests = json::array();
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    const EstimatorSpec& spec = cfg.estimators[e];
    json ej{{"name", spec.name}, {"kind", spec.kind}};
    double seconds = 0.0;
    for (const TrialOutput& t : trial_out) seconds += t.est_seconds[e];
    ej["timing_seconds"] = seconds;
    json metrics_json;
    for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
      json per_trial = json::array();
      std::vector<std::vector<double>> columns(ckpts.size());
      for (const TrialOutput& t : trial_out) {
        per_trial.push_back(t.est_values[e][mi]);
        for (std::size_t c = 0; c < ckpts.size(); ++c) {
          columns[c].push_back(t.est_values[e][mi][c]);
        }
      }
      json mean = json::array(), se = json::array();
      std::vector<std::pair<double, double>> fit_pts;
      for (std::size_t c = 0; c < ckpts.size(); ++c) {
        const double mu = checked_mean(columns[c]);
        mean.push_back(mu);
        se.push_back(stderr_of(columns[c], mu));
        fit_pts.emplace_back(static_cast<double>(ckpts[c]), mu);
      }
      json fit = nullptr;
      try {
        const RateFit rf = fit_rate(fit_pts);
        fit = json{{"slope", rf.slope},
                   {"intercept", rf.intercept},
                   {"r_squared", rf.r_squared},
                   {"points_used", rf.points_used}};
      } catch (const std::invalid_argument&) {
      }
      metrics_json[cfg.metrics[mi]] = {{"per_trial", per_trial},
                                       {"mean", mean},
                                       {"stderr", se},
                                       {"rate_fit", fit}};
    }
    ej["metrics"] = metrics_json;
    ests.push_back(std::move(ej));
  }
  record["estimators"] = ests;

  json bases = json::array();
  for (std::size_t b = 0; b < cfg.baselines.size(); ++b) {
    const BaselineSpec& spec = cfg.baselines[b];
    json bj{{"name", spec.name},
            {"kind", spec.kind},
            {"fit_samples", spec.fit_samples}};
    double seconds = 0.0;
    json per_trial = json::array(), details = json::array();
    std::vector<double> vals;
    for (const TrialOutput& t : trial_out) {
      seconds += t.base_seconds[b];
      per_trial.push_back(t.base_values[b]);
      details.push_back(t.base_details[b]);
      vals.push_back(t.base_values[b]);
    }
    const double mu = checked_mean(vals);
    bj["timing_seconds"] = seconds;
    bj["metrics"] = {{"kl_vs_target",
                      {{"per_trial", per_trial},
                       {"mean", mu},
                       {"stderr", stderr_of(vals, mu)}}}};
    bj["details"] = details;
    bases.push_back(std::move(bj));
  }
  record["baselines"] = bases;

  json oj;
  oj["g_inf"] = {{"value", oracles.g_inf.value},
                 {"log_value", oracles.g_inf.log_value},
                 {"grid_side", oracles.g_inf.grid_side}};
  oj["r_phi"] = {{"euclidean", MirrorMap(MirrorKind::Euclidean).r_phi(m_size)},
                 {"entropy", MirrorMap(MirrorKind::NegativeEntropy).r_phi(m_size)}};
  if (oracles.nu_source != "none") {
    json nj{{"value", oracles.nu_resolved}, {"source", oracles.nu_source}};
    if (oracles.have_nu) {
      nj["per_probe"] = oracles.nu_estimate.per_probe;
      nj["degenerate"] = oracles.nu_estimate.degenerate;
    }
    oj["nu"] = nj;
  } else {
    oj["nu"] = nullptr;
  }
  if (oracles.best) {
    std::vector<double> w(oracles.best->weights.vec().data(),
                          oracles.best->weights.vec().data() + m_size);
    oj["best_in_class"] = {{"objective", oracles.best->objective},
                           {"iterations", oracles.best->iterations},
                           {"converged", oracles.best->converged},
                           {"grad_mapping_norm", oracles.best->grad_mapping_norm},
                           {"weights", w}};
  } else {
    oj["best_in_class"] = nullptr;
  }
  record["oracles"] = oj;

  if (want_bounds && oracles.best && oracles.nu_resolved > 0.0 &&
      std::isfinite(oracles.g_inf.value)) {
    const double a0 = (m0.vec() - oracles.best->weights.vec()).squaredNorm();
    const double kl0 = kl_divergence(oracles.best->weights, m0);
    json b1 = json::array(), b2 = json::array();
    for (const std::int64_t n : ckpts) {
      b1.push_back(bound_theorem1(a0, oracles.g_inf.value, oracles.nu_resolved, n));
      b2.push_back(bound_theorem2(kl0, oracles.g_inf.value, oracles.nu_resolved, n));
    }
    record["bounds"] = {{"nu", oracles.nu_resolved},
                        {"g_inf", oracles.g_inf.value},
                        {"a0", a0},
                        {"kl0", kl0},
                        {"theorem1", b1},
                        {"theorem2", b2}};
  } else {
    record["bounds"] = nullptr;
  }

  if (target.is_continuous() && !cfg.estimators.empty()) {
    json hm;
    hm["grid_side"] = kHeatmapSide;
    hm["target"] = grid_to_json(target.density_grid(kHeatmapSide));
    json fitted;
    const TrialOutput& t0 = trial_out.front();
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      const WeightVector w = WeightVector::from_normalized(t0.final_weights[e]);
      fitted[cfg.estimators[e].name] = grid_to_json(dict.mixture_grid(w, kHeatmapSide));
    }
    hm["estimators"] = fitted;
    record["heatmaps"] = hm;
  } else {
    record["heatmaps"] = nullptr;
  }

  ExperimentRecord out;
  out.data = std::move(record);
  return out;
}

// ---- verify_theorems ------------------------------------------------------

VerifyReport verify_theorems(const ExperimentConfig& cfg) {
  if (!cfg.target.categorical() || !cfg.dictionary.categorical()) {
    throw ConfigError("verify-theorems: needs a categorical target and dictionary "
                      "(exact KL evaluation)");
  }
  if (cfg.trials < 50) {
    throw ConfigError("verify-theorems: needs trials >= 50 for stable means");
  }
  const std::vector<std::int64_t> ckpts = cfg.resolved_checkpoints();
  if (ckpts.size() < 5) {
    throw ConfigError("verify-theorems: needs at least 5 checkpoints for rate fits");
  }
  if (ckpts.back() > cfg.stream_length) {
    throw ConfigError("[run]: max checkpoint exceeds stream_length");
  }
  check_output_dir_writable(cfg.output_dir);

  const Target target = cfg.target.build();
  const Dictionary dict = cfg.dictionary.build(cfg.box);
  const Eigen::Index m_size = dict.size();
  const GInfEstimate g_inf = dict.g_infinity();
  if (!std::isfinite(g_inf.value)) {
    throw ConfigError("verify-theorems: G_inf overflows for this dictionary");
  }

  const ReferenceTable ref = ReferenceTable::from_pmf(dict, target.pmf());
  const BestInClass best = solve_best_in_class(dict, ref);

  double nu = cfg.nu;
  std::string nu_source = "config";
  NuEstimate nu_est;
  if (!(nu > 0.0)) {
    const std::vector<WeightVector> probes =
        default_nu_probes(m_size, 8, derive_seed(cfg.seed, kNuProbeSeedLane));
    nu_est = estimate_nu(dict, ref, probes);
    nu = nu_est.value;
    nu_source = "estimated";
    if (!(nu > 0.0) || nu_est.degenerate) {
      throw ConfigError("verify-theorems: estimated nu is numerically zero; "
                        "set [run] nu explicitly");
    }
  }

  const WeightVector m0 = WeightVector::uniform(m_size);
  const double a0 = (m0.vec() - best.weights.vec()).squaredNorm();
  const double kl0 = kl_divergence(best.weights, m0);
  std::vector<double> bound1, bound2;
  for (const std::int64_t n : ckpts) {
    bound1.push_back(bound_theorem1(a0, g_inf.value, nu, n));
    bound2.push_back(bound_theorem2(kl0, g_inf.value, nu, n));
  }

  const StepSchedule sc = StepSchedule::strongly_convex(nu);
  std::vector<std::vector<double>> kl_cols(ckpts.size()), l2_cols(ckpts.size());
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    const std::vector<SamplePoint> stream = target.sample(rng, cfg.stream_length);
    const std::vector<WeightVector> smd =
        run_estimator(dict, MirrorKind::NegativeEntropy, sc, m0, stream, ckpts,
                      OutputMode::LastIterate);
    const std::vector<WeightVector> sgd =
        run_estimator(dict, MirrorKind::Euclidean, sc, m0, stream, ckpts,
                      OutputMode::LastIterate);
    for (std::size_t c = 0; c < ckpts.size(); ++c) {
      kl_cols[c].push_back(kl_divergence(best.weights, smd[c]));
      l2_cols[c].push_back((sgd[c].vec() - best.weights.vec()).squaredNorm());
    }
  }
  std::vector<double> kl_mean, l2_mean, kl_se, l2_se;
  for (std::size_t c = 0; c < ckpts.size(); ++c) {
    kl_mean.push_back(checked_mean(kl_cols[c]));
    kl_se.push_back(stderr_of(kl_cols[c], kl_mean.back()));
    l2_mean.push_back(checked_mean(l2_cols[c]));
    l2_se.push_back(stderr_of(l2_cols[c], l2_mean.back()));
  }

  // 1/√N regime: horizon-tuned constant step, Cesàro output, suboptimality
  // gap F(m̃) − F(m*) on the exact pmf.
  const std::vector<std::int64_t> horizons{100, 316, 1000, 3162, 10000};
  const MirrorMap entropy(MirrorKind::NegativeEntropy);
  std::vector<double> gap_means;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const StepSchedule tuned =
        StepSchedule::constant_sqrt_n(horizons[h], entropy.r_phi(m_size), g_inf.value);
    const std::vector<std::int64_t> final_only{horizons[h]};
    double acc = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
      Rng rng(derive_seed(cfg.seed, kRegimeSeedLane +
                                        h * static_cast<std::uint64_t>(cfg.trials) +
                                        static_cast<std::uint64_t>(t)));
      const std::vector<SamplePoint> stream = target.sample(rng, horizons[h]);
      const std::vector<WeightVector> snaps =
          run_estimator(dict, MirrorKind::NegativeEntropy, tuned, m0, stream,
                        final_only, OutputMode::Cesaro);
      acc += ref.objective(snaps.front()) - best.objective;
    }
    gap_means.push_back(acc / cfg.trials);
  }

  VerifyReport report;
  const auto add_check = [&](const std::string& name, double value,
                             double threshold, bool passed,
                             const std::string& detail) {
    report.checks.push_back({name, passed, value, threshold, detail});
  };

  double worst2 = 0.0, worst1 = 0.0;
  std::size_t worst2_at = 0, worst1_at = 0;
  for (std::size_t c = 0; c < ckpts.size(); ++c) {
    const double r2 = kl_mean[c] / bound2[c];
    const double r1 = l2_mean[c] / bound1[c];
    if (r2 > worst2) {
      worst2 = r2;
      worst2_at = c;
    }
    if (r1 > worst1) {
      worst1 = r1;
      worst1_at = c;
    }
  }
  add_check("theorem2_bound", worst2, 1.0, worst2 <= 1.0,
            "max over checkpoints of mean KL(m*, m^n) / bound, worst at n = " +
                std::to_string(ckpts[worst2_at]));
  add_check("theorem1_bound", worst1, 1.0, worst1 <= 1.0,
            "max over checkpoints of mean |m^n - m*|^2 / bound, worst at n = " +
                std::to_string(ckpts[worst1_at]));

  std::vector<std::pair<double, double>> kl_pts, l2_pts, gap_pts;
  for (std::size_t c = 0; c < ckpts.size(); ++c) {
    kl_pts.emplace_back(static_cast<double>(ckpts[c]), kl_mean[c]);
    l2_pts.emplace_back(static_cast<double>(ckpts[c]), l2_mean[c]);
  }
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    gap_pts.emplace_back(static_cast<double>(horizons[h]), gap_means[h]);
  }
  json fits;
  const auto fit_check = [&](const std::string& name,
                             std::span<const std::pair<double, double>> pts,
                             double threshold) {
    try {
      const RateFit rf = fit_rate(pts);
      add_check(name, rf.slope, threshold, rf.slope <= threshold,
                "log-log slope, R^2 = " + fmt17(rf.r_squared));
      fits[name] = {{"slope", rf.slope},
                    {"intercept", rf.intercept},
                    {"r_squared", rf.r_squared},
                    {"points_used", rf.points_used}};
    } catch (const std::invalid_argument& e) {
      add_check(name, 0.0, threshold, false,
                std::string("rate fit failed: ") + e.what());
      fits[name] = nullptr;
    }
  };
  fit_check("theorem2_rate", kl_pts, -0.8);
  fit_check("theorem1_rate", l2_pts, -0.8);
  fit_check("proposition1_rate", gap_pts, -0.4);

  report.all_passed =
      std::all_of(report.checks.begin(), report.checks.end(),
                  [](const VerifyCheck& c) { return c.passed; });

  json rec;
  rec["schema"] = "mixest-verify-record-v1";
  rec["library_version"] = "0.1.0";
  rec["config"] = cfg.to_json();
  rec["base_seed"] = cfg.seed;
  rec["checkpoints"] = ckpts;
  rec["nu"] = {{"value", nu}, {"source", nu_source}};
  rec["g_inf"] = {{"value", g_inf.value}, {"log_value", g_inf.log_value}};
  rec["a0"] = a0;
  rec["kl0"] = kl0;
  std::vector<double> bw(best.weights.vec().data(),
                         best.weights.vec().data() + m_size);
  rec["best_in_class"] = {{"objective", best.objective}, {"weights", bw}};
  rec["bounds"] = {{"theorem1", bound1}, {"theorem2", bound2}};
  rec["curves"] = {{"exp_smd_kl", {{"mean", kl_mean}, {"stderr", kl_se}}},
                   {"sgd_l2", {{"mean", l2_mean}, {"stderr", l2_se}}}};
  rec["sqrt_regime"] = {{"horizons", horizons}, {"gap_mean", gap_means}};
  rec["rate_fits"] = fits;
  json checks = json::array();
  for (const VerifyCheck& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  rec["checks"] = checks;
  rec["all_passed"] = report.all_passed;
  report.record.data = std::move(rec);
  return report;
}

// ---- emit_outputs ---------------------------------------------------------

std::string metrics_csv(const ExperimentRecord& record) {
  std::ostringstream out;
  out << "estimator,trial,checkpoint,metric,value\n";
  const json& data = record.data;
  const auto& ckpts = data.at("checkpoints");
  const auto& metrics = data.at("metrics");
  const auto value_str = [](const json& v) {
    return v.is_number() ? fmt17(v.get<double>()) : std::string("inf");
  };
  for (const json& est : data.at("estimators")) {
    const std::string name = est.at("name").get<std::string>();
    const json& mj = est.at("metrics");
    const std::size_t trials =
        mj.at(metrics.at(0).get<std::string>()).at("per_trial").size();
    for (std::size_t t = 0; t < trials; ++t) {
      for (std::size_t c = 0; c < ckpts.size(); ++c) {
        for (const json& metric : metrics) {
          const std::string mname = metric.get<std::string>();
          out << name << "," << t << "," << ckpts.at(c).get<std::int64_t>() << ","
              << mname << ","
              << value_str(mj.at(mname).at("per_trial").at(t).at(c)) << "\n";
        }
      }
    }
  }
  for (const json& base : data.at("baselines")) {
    const std::string name = base.at("name").get<std::string>();
    const std::int64_t n = base.at("fit_samples").get<std::int64_t>();
    const json& per_trial = base.at("metrics").at("kl_vs_target").at("per_trial");
    for (std::size_t t = 0; t < per_trial.size(); ++t) {
      out << name << "," << t << "," << n << ",kl_vs_target,"
          << value_str(per_trial.at(t)) << "\n";
    }
  }
  return out.str();
}

namespace {

Eigen::MatrixXd grid_from_json(const json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd g(r, c);
  for (Eigen::Index b = 0; b < r; ++b) {
    for (Eigen::Index a = 0; a < c; ++a) {
      g(b, a) = rows.at(b).at(a).get<double>();
    }
  }
  return g;
}

DomainBox box_from_record(const json& data) {
  DomainBox box;
  if (data.contains("box") && data.at("box").is_object()) {
    const json& b = data.at("box");
    box.xmin = b.at("xmin").get<double>();
    box.xmax = b.at("xmax").get<double>();
    box.ymin = b.at("ymin").get<double>();
    box.ymax = b.at("ymax").get<double>();
  }
  return box;
}

void write_text(const fs::path& path, const std::string& content,
                std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  written.push_back(path.string());
}

double json_num(const json& v, double fallback) {
  return v.is_number() ? v.get<double>() : fallback;
}

}  // namespace

std::vector<std::string> emit_outputs(const ExperimentRecord& record,
                                      const std::set<std::string>& formats,
                                      const std::string& out_dir) {
  for (const std::string& f : formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw ConfigError("emit_outputs: unknown format '" + f + "'");
    }
  }
  std::vector<std::string> written;
  if (formats.empty()) return written;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + out_dir +
                             "': " + ec.message());
  }
  const fs::path dir(out_dir);
  const json& data = record.data;

  if (formats.count("csv")) {
    write_text(dir / "metrics.csv", metrics_csv(record), written);
  }
  if (formats.count("json")) {
    record.save((dir / "record.json").string());
    written.push_back((dir / "record.json").string());
  }
  if (formats.count("svg")) {
    const json* bounds = data.contains("bounds") && data.at("bounds").is_object()
                             ? &data.at("bounds")
                             : nullptr;
    const auto& ckpts = data.at("checkpoints");
    for (const json& metric : data.at("metrics")) {
      const std::string mname = metric.get<std::string>();
      svg::LinePlot plot;
      plot.title = mname + " vs. samples";
      plot.y_label = mname;
      for (const json& est : data.at("estimators")) {
        const json& mj = est.at("metrics").at(mname);
        svg::Series s;
        s.label = est.at("name").get<std::string>();
        for (std::size_t c = 0; c < ckpts.size(); ++c) {
          s.points.emplace_back(ckpts.at(c).get<double>(),
                                json_num(mj.at("mean").at(c),
                                         std::numeric_limits<double>::infinity()));
          s.band.push_back(json_num(mj.at("stderr").at(c), 0.0));
        }
        plot.series.push_back(std::move(s));
      }
      if (mname == "kl_vs_target") {
        for (const json& base : data.at("baselines")) {
          svg::Series s;
          s.label = base.at("name").get<std::string>();
          s.points.emplace_back(
              base.at("fit_samples").get<double>(),
              json_num(base.at("metrics").at("kl_vs_target").at("mean"),
                       std::numeric_limits<double>::infinity()));
          s.band.push_back(
              json_num(base.at("metrics").at("kl_vs_target").at("stderr"), 0.0));
          plot.series.push_back(std::move(s));
        }
      }
      const char* overlay = mname == "kl_vs_best_in_class" ? "theorem2"
                            : mname == "l2_vs_best_in_class" ? "theorem1"
                                                             : nullptr;
      if (bounds && overlay && bounds->contains(overlay)) {
        svg::Series s;
        s.label = std::string(overlay == std::string("theorem2") ? "Theorem 2"
                                                                 : "Theorem 1") +
                  " bound";
        s.dashed = true;
        const json& curve = bounds->at(overlay);
        for (std::size_t c = 0; c < ckpts.size(); ++c) {
          s.points.emplace_back(ckpts.at(c).get<double>(),
                                curve.at(c).get<double>());
        }
        plot.series.push_back(std::move(s));
      }
      write_text(dir / (mname + ".svg"), svg::render_log_log(plot), written);
    }

    if (data.contains("heatmaps") && data.at("heatmaps").is_object()) {
      const json& hm = data.at("heatmaps");
      const DomainBox box = box_from_record(data);
      const Eigen::MatrixXd target_grid = grid_from_json(hm.at("target"));
      svg::Heatmap tmap{"target density", target_grid, box, 5};
      write_text(dir / "heatmap_target.svg", svg::render_heatmap(tmap), written);
      std::ostringstream csv;
      csv << "x,y,p\n";
      const int side = static_cast<int>(target_grid.rows());
      const double dx = box.width() / side, dy = box.height() / side;
      for (int b = 0; b < side; ++b) {
        for (int a = 0; a < side; ++a) {
          csv << fmt17(box.xmin + (a + 0.5) * dx) << ","
              << fmt17(box.ymin + (b + 0.5) * dy) << ","
              << fmt17(target_grid(b, a)) << "\n";
        }
      }
      write_text(dir / "target_density.csv", csv.str(), written);
      for (const auto& [name, grid] : hm.at("estimators").items()) {
        svg::Heatmap emap{"fitted mixture: " + name, grid_from_json(grid), box, 5};
        write_text(dir / ("heatmap_" + sanitize_name(name) + ".svg"),
                   svg::render_heatmap(emap), written);
      }
    }
  }
  return written;
}

// ---- sweep override -------------------------------------------------------

void apply_override(json& config, const std::string& dotted_path,
                    const std::string& value_text) {
  if (dotted_path.empty()) throw ConfigError("sweep: empty parameter path");
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_path.find('.', start);
    segments.push_back(dotted_path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const std::string& s : segments) {
    if (s.empty()) throw ConfigError("sweep: malformed path '" + dotted_path + "'");
  }

  json* node = &config;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const std::string& seg = segments[i];
    const bool numeric =
        std::all_of(seg.begin(), seg.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (numeric && node->is_array()) {
      const auto idx = static_cast<std::size_t>(std::stoull(seg));
      if (idx >= node->size()) {
        throw ConfigError("sweep: index " + seg + " out of range in '" +
                          dotted_path + "'");
      }
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) {
        throw ConfigError("sweep: '" + seg + "' is not a table in '" + dotted_path + "'");
      }
      if (!node->contains(seg)) (*node)[seg] = json::object();
      node = &(*node)[seg];
    }
  }

  json value;
  const std::string& text = value_text;
  if (text == "true") {
    value = true;
  } else if (text == "false") {
    value = false;
  } else {
    std::int64_t iv = 0;
    const auto [p, ec] =
        std::from_chars(text.data(), text.data() + text.size(), iv);
    if (ec == std::errc() && p == text.data() + text.size()) {
      value = iv;
    } else {
      try {
        std::size_t used = 0;
        const double dv = std::stod(text, &used);
        value = used == text.size() ? json(dv) : json(text);
      } catch (const std::exception&) {
        value = text;
      }
    }
  }

  const std::string& leaf = segments.back();
  const bool numeric_leaf =
      std::all_of(leaf.begin(), leaf.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  if (numeric_leaf && node->is_array()) {
    const auto idx = static_cast<std::size_t>(std::stoull(leaf));
    if (idx >= node->size()) {
      throw ConfigError("sweep: index " + leaf + " out of range in '" + dotted_path + "'");
    }
    (*node)[idx] = value;
  } else {
    if (!node->is_object()) {
      throw ConfigError("sweep: '" + leaf + "' is not assignable in '" + dotted_path + "'");
    }
    (*node)[leaf] = value;
  }
}

}  // namespace mixest
