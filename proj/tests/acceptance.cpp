// Acceptance gate: ten end-to-end criteria, one pass/fail line each. Each
// criterion states its tolerance inline; shared runs (the theorem-regime
// verification, the four-mode CLI runs) execute once and feed several
// criteria.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "mixest/baselines.hpp"
#include "mixest/dictionary.hpp"
#include "mixest/estimators.hpp"
#include "mixest/evaluation.hpp"
#include "mixest/experiment.hpp"
#include "mixest/rng.hpp"
#include "mixest/simplex.hpp"
#include "mixest/targets.hpp"
#include "support/grid_search.hpp"

namespace mixest {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kVerifyBudgetSeconds = 10.0;
constexpr double kKlSlopeLo = -1.3, kKlSlopeHi = -0.8, kKlFitMinR2 = 0.9;
constexpr double kGapSlopeLo = -0.8, kGapSlopeHi = -0.35;
constexpr double kProxTol = 1e-4;
constexpr double kNuTol = 1e-9;
constexpr double kBestInClassTol = 2e-3;
constexpr double kKlQuadratureTol = 2e-3;
constexpr double kGradRelTol = 1e-4;
constexpr double kUnitInnerTol = 1e-9;
constexpr double kSumTol = 1e-9;
constexpr double kFourModeBudgetSeconds = 300.0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[C%d] %s  %s\n", criterion, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  EXPECT_TRUE(ok) << "criterion " << criterion << ": " << what;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("mixest_accept_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& name) const { return (path / name).string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double linf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

WeightVector random_interior(Rng& rng, Eigen::Index m) {
  Eigen::VectorXd w(m);
  for (Eigen::Index i = 0; i < m; ++i) w(i) = 0.05 + rng.uniform();
  return WeightVector(w);
}

// ---- shared run 1: theorem-regime verification (criteria 1-3) -------------

struct VerifyRun {
  VerifyReport rep;
  double seconds = 0.0;
  bool config_ok = false;
};

const VerifyRun& theorem_run() {
  static const TempDir out_dir;
  static const VerifyRun run = [] {
    VerifyRun r;
    ExperimentConfig cfg = ExperimentConfig::from_file(
        std::string(MIXEST_CONFIG_DIR) + "/theorems_k2.toml");
    cfg.output_dir = out_dir.str("verify");
    r.config_ok = cfg.trials == 200 && cfg.stream_length == 1000 &&
                  cfg.target.alphabet == 2 && cfg.dictionary.epsilon == 0.5 &&
                  cfg.nu == 0.5;
    const auto t0 = std::chrono::steady_clock::now();
    r.rep = verify_theorems(cfg);
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return run;
}

const VerifyCheck* find_check(const VerifyReport& rep, const std::string& name) {
  for (const VerifyCheck& c : rep.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// ---- shared run 2: four-mode CLI runs (criteria 8 and 10) -----------------

struct CliRuns {
  bool exit_ok = false;
  double first_seconds = 0.0;
  std::string csv_a, csv_b;
};

const CliRuns& fourmode_runs() {
  static const TempDir dir;
  static const CliRuns runs = [] {
    CliRuns r;
    const std::string bench = MIXEST_BENCH_BIN;
    const std::string config = std::string(MIXEST_CONFIG_DIR) + "/fourmode.toml";
    const auto run_once = [&](const std::string& out) {
      fs::create_directories(out);
      const std::string cmd = "\"" + bench + "\" run \"" + config + "\" --out \"" +
                              out + "\" > \"" + out + "/cli.log\" 2>&1";
      return std::system(cmd.c_str());
    };
    const auto t0 = std::chrono::steady_clock::now();
    const int rc_a = run_once(dir.str("a"));
    r.first_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int rc_b = run_once(dir.str("b"));
    r.exit_ok = rc_a == 0 && rc_b == 0;
    r.csv_a = read_file(dir.str("a") + "/metrics.csv");
    r.csv_b = read_file(dir.str("b") + "/metrics.csv");
    return r;
  }();
  return runs;
}

// Mean of the kl_vs_target rows for one estimator at one checkpoint.
double csv_mean_kl(const std::string& csv, const std::string& estimator,
                   std::int64_t checkpoint) {
  const std::string prefix =
      estimator + ",", want = "," + std::to_string(checkpoint) + ",kl_vs_target,";
  std::istringstream lines(csv);
  std::string line;
  double sum = 0.0;
  int count = 0;
  while (std::getline(lines, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    const std::size_t at = line.find(want);
    if (at == std::string::npos) continue;
    sum += std::stod(line.substr(at + want.size()));
    ++count;
  }
  return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

// ---- criteria 1-3: convergence bounds and rates ---------------------------

TEST(Acceptance, C01TheoremTwoBoundHolds) {
  const VerifyRun& v = theorem_run();
  const VerifyCheck* c = find_check(v.rep, "theorem2_bound");
  const bool ok = v.config_ok && c != nullptr && c->passed &&
                  v.seconds < kVerifyBudgetSeconds;
  std::ostringstream what;
  what << "Exp-SMD last iterate on the K = 2, eps = 0.5 instance (200 trials, "
       << "N = 1000): mean KL stays under the Theorem 2 curve at every "
       << "checkpoint, worst ratio " << (c ? fmt(c->value) : "n/a") << " <= 1, run "
       << fmt(v.seconds, 3) << " s (budget " << kVerifyBudgetSeconds << " s)";
  report(1, ok, what.str());
}

TEST(Acceptance, C02TheoremOneBoundHolds) {
  const VerifyRun& v = theorem_run();
  const VerifyCheck* c = find_check(v.rep, "theorem1_bound");
  const bool ok = v.config_ok && c != nullptr && c->passed &&
                  v.seconds < kVerifyBudgetSeconds;
  std::ostringstream what;
  what << "projected SGD on the same instance: mean |m - m*|^2 stays under the "
       << "Theorem 1 curve at every checkpoint, worst ratio "
       << (c ? fmt(c->value) : "n/a") << " <= 1, run " << fmt(v.seconds, 3)
       << " s (budget " << kVerifyBudgetSeconds << " s)";
  report(2, ok, what.str());
}

TEST(Acceptance, C03ConvergenceRatesMatchTheory) {
  const VerifyRun& v = theorem_run();
  const json& fits = v.rep.record.data.at("rate_fits");
  bool ok = false;
  std::ostringstream what;
  if (fits.at("theorem2_rate").is_object() &&
      fits.at("proposition1_rate").is_object()) {
    const double kl_slope = fits.at("theorem2_rate").at("slope").get<double>();
    const double kl_r2 = fits.at("theorem2_rate").at("r_squared").get<double>();
    const double gap_slope = fits.at("proposition1_rate").at("slope").get<double>();
    ok = kl_slope >= kKlSlopeLo && kl_slope <= kKlSlopeHi && kl_r2 >= kKlFitMinR2 &&
         gap_slope >= kGapSlopeLo && gap_slope <= kGapSlopeHi;
    what << "last-iterate KL rate slope " << fmt(kl_slope) << " in ["
         << kKlSlopeLo << ", " << kKlSlopeHi << "] with R^2 " << fmt(kl_r2)
         << " >= " << kKlFitMinR2 << "; 1/sqrt(N) regime gap slope "
         << fmt(gap_slope) << " in [" << kGapSlopeLo << ", " << kGapSlopeHi << "]";
  } else {
    what << "rate fit unavailable in the verification record";
  }
  report(3, ok, what.str());
}

// ---- criterion 4: closed-form prox steps vs numerical minimization --------

TEST(Acceptance, C04ProxStepsMatchNumericalMinimizer) {
  Rng rng(20250812);
  double worst_sgd = 0.0, worst_exp = 0.0;
  for (const int dim : {2, 3}) {
    for (int rep = 0; rep < 100; ++rep) {
      const WeightVector m = random_interior(rng, dim);
      Eigen::VectorXd g(dim);
      for (int i = 0; i < dim; ++i) g(i) = rng.uniform(-3.0, 3.0);
      const double gamma = rng.uniform(0.05, 1.5);

      const WeightVector sgd = sgd_step(m, g, gamma);
      const Eigen::VectorXd sgd_num = testing::grid_minimize_simplex(
          dim, [&](const Eigen::VectorXd& z) {
            return 0.5 * (z - m.vec()).squaredNorm() - gamma * g.dot(z);
          });
      worst_sgd = std::max(worst_sgd, linf(sgd.vec(), sgd_num));

      const WeightVector ent = exp_smd_step(m, g, gamma);
      const Eigen::VectorXd ent_num = testing::grid_minimize_simplex(
          dim, [&](const Eigen::VectorXd& z) {
            double d = 0.0;
            for (int i = 0; i < dim; ++i) {
              if (z(i) > 0.0) d += z(i) * std::log(z(i) / m[i]);
            }
            return d - gamma * g.dot(z);
          });
      worst_exp = std::max(worst_exp, linf(ent.vec(), ent_num));
    }
  }
  const bool ok = worst_sgd <= kProxTol && worst_exp <= kProxTol;
  std::ostringstream what;
  what << "sgd_step / exp_smd_step vs grid-refined prox minimization on "
       << "simplexes of size 2 and 3, 100 random (m, g, gamma) each: max Linf "
       << "error " << fmt(worst_sgd) << " / " << fmt(worst_exp) << " <= "
       << kProxTol;
  report(4, ok, what.str());
}

// ---- criterion 5: oracle cross-checks -------------------------------------

TEST(Acceptance, C05OraclesMatchIndependentComputations) {
  // (a) strong-convexity estimate on the worked instance.
  const Dictionary dict2 = Dictionary::categorical(2, 0.5);
  const ReferenceTable ref2 =
      ReferenceTable::from_pmf(dict2, Eigen::Vector2d(0.5, 0.5));
  const std::vector<WeightVector> probes{WeightVector::uniform(2)};
  const double nu = estimate_nu(dict2, ref2, probes).value;
  const bool nu_ok = std::abs(nu - 0.5) <= kNuTol;

  // (b) best-in-class solver vs grid search on random 3-component problems.
  Rng rng(20250813);
  double worst_w = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Dictionary dict = Dictionary::categorical(3, rng.uniform(0.2, 0.8));
    Eigen::VectorXd pmf(3);
    for (int i = 0; i < 3; ++i) pmf(i) = 0.05 + rng.uniform();
    pmf /= pmf.sum();
    const ReferenceTable ref = ReferenceTable::from_pmf(dict, pmf);
    const BestInClass best = solve_best_in_class(dict, ref);
    const Eigen::VectorXd grid = testing::grid_minimize_simplex(
        3, [&](const Eigen::VectorXd& z) { return ref.objective(WeightVector(z)); });
    worst_w = std::max(worst_w, linf(best.weights.vec(), grid));
  }
  const bool best_ok = worst_w <= kBestInClassTol;

  // (c) KL quadrature on shifted unit Gaussians: exact value 1/2.
  const auto gauss = [](double cx) {
    return [cx](double x, double y) {
      return std::exp(-0.5 * ((x - cx) * (x - cx) + y * y)) /
             (2.0 * 3.14159265358979323846);
    };
  };
  const KlQuadrature kq = kl_continuous(gauss(-0.5), gauss(0.5), DomainBox{});
  const bool kl_ok = std::abs(kq.value - 0.5) <= kKlQuadratureTol;

  const bool ok = nu_ok && best_ok && kl_ok;
  std::ostringstream what;
  what << "estimate_nu = " << fmt(nu, 12) << " (exact 0.5, tol " << kNuTol
       << "); best-in-class vs grid search max Linf " << fmt(worst_w) << " <= "
       << kBestInClassTol << "; shifted-Gaussian KL " << fmt(kq.value, 6)
       << " (exact 0.5, tol " << kKlQuadratureTol << ")";
  report(5, ok, what.str());
}

// ---- criterion 6: gradient checks -----------------------------------------

TEST(Acceptance, C06GradientsMatchFiniteDifferences) {
  Rng rng(20250814);
  const DomainBox box;
  double worst_score = 0.0, worst_softmax = 0.0, worst_inner = 0.0;

  const auto make_instance = [&](int index, Dictionary& dict, SamplePoint& zeta) {
    if (index % 2 == 0) {
      const std::int64_t k = rng.uniform_int(3, 30);
      dict = Dictionary::categorical(k, rng.uniform(0.1, 0.9));
      zeta = SamplePoint::categorical(rng.uniform_int(0, k - 1));
    } else {
      const int side = static_cast<int>(rng.uniform_int(3, 4));
      dict = Dictionary::multiscale_gaussian(box, {{side, rng.uniform(0.5, 1.5)}});
      zeta = SamplePoint::continuous(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    }
  };

  for (int i = 0; i < 50; ++i) {
    Dictionary dict = Dictionary::categorical(2, 0.5);
    SamplePoint zeta;
    make_instance(i, dict, zeta);
    const WeightVector m = random_interior(rng, dict.size());
    const Eigen::VectorXd g = dict.stochastic_gradient(m, zeta);
    worst_inner = std::max(worst_inner, std::abs(m.vec().dot(g) - 1.0));

    // The per-sample loss -log(x . f) has gradient -g at x = m.
    const Eigen::VectorXd f = dict.component_values(zeta);
    const Eigen::VectorXd fd = testing::fd_gradient(
        [&](const Eigen::VectorXd& x) { return -std::log(x.dot(f)); }, m.vec());
    worst_score = std::max(
        worst_score, (fd + g).cwiseAbs().maxCoeff() /
                         std::max(1.0, g.cwiseAbs().maxCoeff()));
  }

  for (int i = 0; i < 50; ++i) {
    Dictionary dict = Dictionary::categorical(2, 0.5);
    SamplePoint zeta;
    make_instance(i, dict, zeta);
    Eigen::VectorXd v(dict.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.uniform(-2.0, 2.0);
    const Eigen::VectorXd f = dict.component_values(zeta);
    const Eigen::VectorXd g = dict.stochastic_gradient(softmax(v), zeta);
    const Eigen::VectorXd analytic = v - softmax_sgd_step(v, g, 1.0);
    const Eigen::VectorXd fd = testing::fd_gradient(
        [&](const Eigen::VectorXd& w) { return -std::log(softmax(w).vec().dot(f)); },
        v);
    worst_softmax = std::max(
        worst_softmax, (fd - analytic).cwiseAbs().maxCoeff() /
                           std::max(1.0, analytic.cwiseAbs().maxCoeff()));
  }

  const bool ok = worst_score <= kGradRelTol && worst_softmax <= kGradRelTol &&
                  worst_inner <= kUnitInnerTol;
  std::ostringstream what;
  what << "score and softmax-SGD gradients vs central differences, 50 random "
       << "instances each: max relative error " << fmt(worst_score) << " / "
       << fmt(worst_softmax) << " <= " << kGradRelTol << "; max |<m, g> - 1| = "
       << fmt(worst_inner) << " <= " << kUnitInnerTol;
  report(6, ok, what.str());
}

// ---- criterion 7: simplex invariants under one million mixed steps --------

TEST(Acceptance, C07InvariantsHoldOverMillionSteps) {
  const MirrorMap entropy(MirrorKind::NegativeEntropy);
  double max_sum_err = 0.0, min_euclidean = 1.0, min_entropy = 1.0;
  std::int64_t steps_done = 0;

  const auto stress = [&](const Dictionary& dict, const std::vector<SamplePoint>& stream,
                          std::int64_t steps) {
    const StepSchedule schedules[3] = {
        StepSchedule::strongly_convex(0.5), StepSchedule::power_decay(0.2, 0.35),
        StepSchedule::constant_sqrt_n(1000000, entropy.r_phi(dict.size()),
                                      dict.g_infinity().value)};
    WeightVector cur = WeightVector::uniform(dict.size());
    for (std::int64_t i = 0; i < steps; ++i) {
      const SamplePoint& zeta = stream[static_cast<std::size_t>(i) % stream.size()];
      const double gamma = schedules[i % 3].gamma(i);
      const SignConvention sign =
          (i % 17 == 0) ? SignConvention::Literal : SignConvention::Descent;
      const Eigen::VectorXd g = dict.stochastic_gradient(cur, zeta);
      const bool use_entropy = (i % 2 == 0);
      cur = use_entropy ? exp_smd_step(cur, g, gamma, sign)
                        : sgd_step(cur, g, gamma, sign);
      max_sum_err = std::max(max_sum_err, std::abs(cur.vec().sum() - 1.0));
      const double mn = cur.vec().minCoeff();
      if (use_entropy) {
        min_entropy = std::min(min_entropy, mn);
      } else {
        min_euclidean = std::min(min_euclidean, mn);
      }
      ++steps_done;
    }
  };

  {
    const Dictionary dict = Dictionary::categorical(50, 0.05);
    const Target target =
        Target::sparse_categorical(50, 12, CategoricalDecay::Zipf, 99);
    Rng rng(20250815);
    stress(dict, target.sample(rng, 100000), 900000);
  }
  {
    const Dictionary dict = Dictionary::multiscale_gaussian(DomainBox{}, {{5, 0.8}});
    Rng rng(20250816);
    stress(dict, Target::four_mode().sample(rng, 50000), 100000);
  }

  const bool ok = steps_done == 1000000 && max_sum_err <= kSumTol &&
                  min_euclidean >= 0.0 && min_entropy >= kWeightFloor;
  std::ostringstream what;
  what << steps_done << " mixed sgd/exp-smd steps across schedules, mirrors, and "
       << "signs: max |sum - 1| = " << fmt(max_sum_err) << " <= " << kSumTol
       << ", min entry " << fmt(min_euclidean) << " >= 0 (euclidean), "
       << fmt(min_entropy) << " >= " << kWeightFloor << " (entropy floor)";
  report(7, ok, what.str());
}

// ---- criterion 8: four-mode end-to-end run --------------------------------

TEST(Acceptance, C08FourModeRunLearnsWithinBudget) {
  const CliRuns& runs = fourmode_runs();
  const double kl_early = csv_mean_kl(runs.csv_a, "exp_smd", 200);
  const double kl_late = csv_mean_kl(runs.csv_a, "exp_smd", 20000);
  const bool ok = runs.exit_ok && std::isfinite(kl_early) && std::isfinite(kl_late) &&
                  kl_late < kl_early && runs.first_seconds < kFourModeBudgetSeconds;
  std::ostringstream what;
  what << "CLI run of the M = 1189 four-mode benchmark (3 trials, N = 20000): "
       << "mean Exp-SMD KL " << fmt(kl_late) << " at N = 20000 < " << fmt(kl_early)
       << " at N = 200, wall " << fmt(runs.first_seconds, 3) << " s (budget "
       << kFourModeBudgetSeconds << " s)";
  report(8, ok, what.str());
}

// ---- criterion 9: classical baselines behave sanely -----------------------

TEST(Acceptance, C09BaselinesBehaveSanely) {
  // (a) KDE KL vs the four-mode target decreases with the fit sample count.
  std::vector<double> kde_kl;
  {
    const json j{
        {"target", {{"kind", "four_mode"}}},
        {"dictionary",
         {{"kind", "gaussian_grid"},
          {"layers", json::array({{{"grid_side", 2}, {"sigma", 1.0}}})}}},
        {"baselines",
         json::array({{{"name", "kde500"}, {"kind", "kde"}, {"fit_samples", 500}},
                      {{"name", "kde2000"}, {"kind", "kde"}, {"fit_samples", 2000}},
                      {{"name", "kde8000"}, {"kind", "kde"}, {"fit_samples", 8000}}})},
        {"run",
         {{"stream_length", 8000},
          {"trials", 3},
          {"metrics", json::array({"kl_vs_target"})},
          {"kl_grid", 200},
          {"seed", 7},
          {"output_dir", ""}}}};
    const ExperimentRecord rec = run_experiment(ExperimentConfig::from_json(j));
    for (const json& b : rec.data.at("baselines")) {
      kde_kl.push_back(b.at("metrics").at("kl_vs_target").at("mean").get<double>());
    }
  }
  const bool kde_ok =
      kde_kl.size() == 3 && kde_kl[0] > kde_kl[1] && kde_kl[1] > kde_kl[2];

  // (b) Exp-SMD beats add-a-constant on a sparse categorical target once
  // N >= 10x the support size.
  const std::int64_t support = 50;
  std::vector<double> smd_kl, add1_kl;
  bool smd_wins = true;
  for (const std::int64_t n : {10 * support, 40 * support, 100 * support}) {
    json j{
        {"target",
         {{"kind", "sparse_categorical"},
          {"alphabet", 1000},
          {"support", support},
          {"decay", "zipf"},
          {"perm_seed", 5}}},
        {"dictionary",
         {{"kind", "categorical"}, {"alphabet", 1000}, {"epsilon", 0.01}}},
        {"estimators",
         json::array({{{"name", "exp_smd"},
                       {"mirror", "entropy"},
                       {"output", "cesaro"},
                       {"schedule",
                        {{"kind", "power"}, {"gamma0", 0.1}, {"decay", 0.35}}}}})},
        {"baselines",
         json::array({{{"name", "add1"},
                       {"kind", "add_constant"},
                       {"fit_samples", n},
                       {"c", 1.0}}})},
        {"run",
         {{"stream_length", n},
          {"trials", 3},
          {"checkpoints", json::array({n})},
          {"metrics", json::array({"kl_vs_target"})},
          {"seed", 17},
          {"output_dir", ""}}}};
    const ExperimentRecord rec = run_experiment(ExperimentConfig::from_json(j));
    const double smd = rec.data.at("estimators")
                           .at(0)
                           .at("metrics")
                           .at("kl_vs_target")
                           .at("mean")
                           .at(0)
                           .get<double>();
    const double add1 = rec.data.at("baselines")
                            .at(0)
                            .at("metrics")
                            .at("kl_vs_target")
                            .at("mean")
                            .get<double>();
    smd_kl.push_back(smd);
    add1_kl.push_back(add1);
    smd_wins = smd_wins && smd < add1;
  }

  const bool ok = kde_ok && smd_wins;
  std::ostringstream what;
  what << "KDE KL decreases over N = 500/2000/8000 (" << fmt(kde_kl[0]) << " > "
       << fmt(kde_kl[1]) << " > " << fmt(kde_kl[2]) << "); Exp-SMD beats "
       << "add-a-constant at N = 500/2000/5000 on a 1000-symbol, 50-support "
       << "target (" << fmt(smd_kl[0]) << " < " << fmt(add1_kl[0]) << ", "
       << fmt(smd_kl[1]) << " < " << fmt(add1_kl[1]) << ", " << fmt(smd_kl[2])
       << " < " << fmt(add1_kl[2]) << ")";
  report(9, ok, what.str());
}

// ---- criterion 10: determinism of repeated CLI runs -----------------------

TEST(Acceptance, C10RepeatedRunsAreByteIdentical) {
  const CliRuns& runs = fourmode_runs();
  const bool ok = runs.exit_ok && !runs.csv_a.empty() && runs.csv_a == runs.csv_b;
  std::ostringstream what;
  what << "two CLI runs of the four-mode config produce byte-identical "
       << "metrics.csv (" << runs.csv_a.size() << " bytes)";
  report(10, ok, what.str());
}

}  // namespace
}  // namespace mixest
