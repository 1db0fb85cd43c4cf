#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "anng/experiments.hpp"
#include "anng/runner.hpp"

using namespace anng;

namespace {

const std::string kSqrt8 = "2.8284271247461903";

std::string base_config(const std::string& suite) {
  return "suite = " + suite +
         "\nn = 4096\nd = 6\ntau = " + kSqrt8 +
         "\nr = 1.5\nr0 = 2\nepsilon = 0.25\ntrials = 300\n"
         "dataset_seed = 1\ngraph_seed = 2\nquery_seed = 3\nmc_samples = 20000\n";
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag)
      : path(std::filesystem::temp_directory_path() / ("anng_exp_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  const auto bytes = read_file(p);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing

TEST(Config, EmptyConfigListsRequiredKeys) {
  try {
    parse_config("");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& k : required_config_keys()) EXPECT_NE(msg.find(k), std::string::npos) << k;
  }
}

TEST(Config, UnknownAndDuplicateKeysRejected) {
  EXPECT_THROW(parse_config(base_config("query-sweep") + "model = exact\nmodle = exact\n"), ConfigError);
  EXPECT_THROW(parse_config(base_config("query-sweep") + "model = exact\nn = 10\n"), ConfigError);
  EXPECT_THROW(parse_config(base_config("query-sweep") + "model = exact\njust text\n"), ConfigError);
  EXPECT_THROW(parse_config(base_config("bogus") + "model = exact\n"), ConfigError);
}

TEST(Config, ParsesRepeatedModelsAndComments) {
  const auto cfg = parse_config("# header\n" + base_config("query-sweep") +
                                "model = exact   # trailing\nmodel = uniform:0.5\n\n");
  ASSERT_EQ(cfg.models.size(), 2u);
  EXPECT_EQ(cfg.models[1], "uniform:0.5");
  EXPECT_EQ(cfg.n, 4096u);
  EXPECT_DOUBLE_EQ(*cfg.r0, 2.0);
  EXPECT_EQ(cfg.mc_samples, 20000u);
}

TEST(Config, ValueErrors) {
  EXPECT_THROW(parse_config(base_config("query-sweep") + "model = uniform:2\n"), ConfigError);
  EXPECT_THROW(parse_config(base_config("query-sweep")), ConfigError);  // no model
  std::string cfg = base_config("query-sweep") + "model = exact\n";
  cfg.replace(cfg.find("trials = 300"), 12, "trials = 0");
  EXPECT_THROW(parse_config(cfg), ConfigError);
  cfg = base_config("query-sweep") + "model = exact\n";
  cfg.replace(cfg.find("n = 4096"), 8, "n = -5");
  EXPECT_THROW(parse_config(cfg), ConfigError);
  cfg = base_config("query-sweep") + "model = exact\n";
  cfg.replace(cfg.find("r = 1.5"), 7, "r = 4.5");
  EXPECT_THROW(parse_config(cfg), ConfigError);
}

TEST(Config, TrialsZeroRejectedBySuite) {
  auto cfg = parse_config(base_config("query-sweep") + "model = exact\n");
  cfg.trials = 0;
  EXPECT_THROW(run_query_sweep(cfg), ConfigError);
}

// ---------------------------------------------------------------------------
// Query sweep

TEST(QuerySweep, UniformOneAndExactIdentical) {
  const auto cfg = parse_config(base_config("query-sweep") + "model = exact\nmodel = uniform:1\n");
  const auto rep = run_query_sweep(cfg);
  ASSERT_EQ(rep.table.rows().size(), 2u);
  const auto& a = rep.table.rows()[0].cells();
  const auto& b = rep.table.rows()[1].cells();
  for (std::size_t k = 1; k < a.size(); ++k) EXPECT_EQ(*a[k], *b[k]) << rep.table.columns()[k];
}

TEST(QuerySweep, SuccessRateMonotoneInDelta) {
  const auto cfg = parse_config(base_config("query-sweep") +
                                "model = uniform:0.1\nmodel = uniform:0.25\nmodel = uniform:0.5\nmodel = uniform:1\n");
  const auto rep = run_query_sweep(cfg);
  const auto& rows = rep.table.rows();
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double lo = rows[k - 1].num("success_rate_mean");
    const double hi = rows[k].num("success_rate_mean");
    const double se = std::hypot(rows[k - 1].num("success_rate_stderr"), rows[k].num("success_rate_stderr"));
    EXPECT_GE(hi + 2.0 * se, lo);
  }
  EXPECT_GT(rows.front().num("failures"), rows.back().num("failures"));
}

TEST(QuerySweep, ThreadCountAndRerunInvariant) {
  const auto cfg = parse_config(base_config("query-sweep") + "model = uniform:0.3\nmodel = adaptive\n");
  const auto a = to_csv(run_query_sweep(cfg, 1).table);
  EXPECT_EQ(a, to_csv(run_query_sweep(cfg, 1).table));
  EXPECT_EQ(a, to_csv(run_query_sweep(cfg, 4).table));
}

TEST(QuerySweep, PredictionsAndVacuousFlag) {
  const auto cfg = parse_config(base_config("query-sweep") + "model = uniform:0.01\nmodel = exact\n");
  const auto rep = run_query_sweep(cfg);
  const auto& small = rep.table.rows()[0];
  EXPECT_DOUBLE_EQ(small.num("pred_steps_T"), 0.5 * 4.0 / 0.25);
  EXPECT_EQ(small.count("bound_vacuous"), 1);
  EXPECT_EQ(small.num("pred_success_bound"), 0.0);
  EXPECT_DOUBLE_EQ(small.num("pred_query_cost"), 4.0 / 0.25 * std::sqrt(6.0) * std::pow(std::sqrt(8.0), 6));
  EXPECT_NEAR(rep.calibration["vol_c_exact"].get<double>(), 0.03779340921080619, 1e-14);
  EXPECT_FALSE(rep.formulas.at("pred_failure_bound").empty());
  EXPECT_NO_THROW(audit(rep));
}

TEST(QuerySweep, OmegaOneTauTwoRootTwoIsDomainError) {
  auto text = base_config("query-sweep") + "model = exact\n";
  text.replace(text.find("n = 4096"), 8, "n = 2048");
  text.replace(text.find("d = 6"), 5, "d = 11");
  text.replace(text.find("r0 = 2"), 6, "r0 = 1.9");
  text.replace(text.find("r = 1.5"), 7, "r = 1.2");
  text.replace(text.find("epsilon = 0.25"), 14, "epsilon = 0.1");
  const auto cfg = parse_config(text);
  EXPECT_THROW(run_query_sweep(cfg), DomainError);
}

// ---------------------------------------------------------------------------
// Two-sided

TEST(TwoSided, ZeroDelta2ReducesToUniform) {
  const auto two = run_twosided_sweep(parse_config(base_config("twosided") + "delta1 = 0.4\n"));
  const auto uni = run_query_sweep(parse_config(base_config("query-sweep") + "model = uniform:0.4\n"));
  const auto& t = two.table.rows()[0];
  const auto& u = uni.table.rows()[0];
  ASSERT_EQ(t.text("regime"), "delta2_zero");
  for (const auto& col : query_sweep_columns())
    if (col != "model") {
      EXPECT_EQ(t.get(col), u.get(col)) << col;
    }
}

TEST(TwoSided, BalancedRegimeDegreeWithinFourSd) {
  const auto rep = run_twosided_sweep(parse_config(base_config("twosided") + "delta1 = 0.8\n"));
  const auto& row = rep.table.rows()[1];
  EXPECT_EQ(row.text("regime"), "balanced");
  EXPECT_NEAR(row.num("delta2"), std::pow(8.0, 3) / std::sqrt(6.0) / 4096.0, 1e-15);
  EXPECT_EQ(row.count("degree_within_4sd"), 1);
  EXPECT_EQ(row.count("edges_in_half_band"), 1);
}

TEST(TwoSided, ImpossibleDelta2IsConfigError) {
  auto text = base_config("twosided") + "delta1 = 0.9\n";
  text.replace(text.find("tau = " + kSqrt8), 6 + kSqrt8.size(), "tau = 4.7");
  EXPECT_THROW(run_twosided_sweep(parse_config(text)), ConfigError);
  EXPECT_THROW(run_twosided_sweep(parse_config(base_config("twosided") + "delta1 = 0.04\n")), ConfigError);
}

// ---------------------------------------------------------------------------
// Progress

namespace {

ExperimentConfig progress_config(const std::string& models, double tau, std::uint64_t trials = 300) {
  return parse_config("suite = progress\nn = 4096\nd = 8\ntau = " + detail::format_real(tau) +
                      "\ns = 1.2\nepsilon = 0.1\ntrials = " + std::to_string(trials) +
                      "\ndataset_seed = 5\ngraph_seed = 6\nquery_seed = 7\nmc_samples = 1000\n" + models);
}

}  // namespace

TEST(Progress, DeltaZeroNeverProgresses) {
  const auto res = run_progress_trial(progress_config("model = uniform:0\n", 2.0));
  EXPECT_EQ(res.report.table.rows()[0].count("successes"), 0);
}

TEST(Progress, NearCompleteGraphMatchesBruteForceOracle) {
  // alpha_tau = 0.14: every point that could satisfy the target is adjacent to p1.
  const auto res = run_progress_trial(progress_config("model = uniform:1\n", 2.8));
  EXPECT_EQ(res.outcomes[0], res.oracle);
  EXPECT_GT(res.report.table.rows()[0].count("successes"), 0);
}

TEST(Progress, CoupledCoinsOrderPointwise) {
  const auto res = run_progress_trial(progress_config("model = uniform:0.5\nmodel = uniform:1\n", 2.0));
  for (std::size_t t = 0; t < res.oracle.size(); ++t) {
    EXPECT_LE(res.outcomes[0][t], res.outcomes[1][t]);
    EXPECT_LE(res.outcomes[1][t], res.oracle[t]);
  }
}

TEST(Progress, PreconditionEnforced) {
  EXPECT_THROW(run_progress_trial(progress_config("model = exact\n", 1.7)), ParameterError);
}

TEST(Progress, ThreadInvariant) {
  const auto cfg = progress_config("model = uniform:0.5\n", 2.0, 100);
  EXPECT_EQ(run_progress_trial(cfg, 1).outcomes, run_progress_trial(cfg, 3).outcomes);
}

// ---------------------------------------------------------------------------
// Concentration

namespace {

ExperimentConfig concentration_config(std::uint64_t n, std::uint64_t d, double tau, std::uint64_t seeds,
                                      const std::string& models) {
  return parse_config("suite = concentration\nn = " + std::to_string(n) + "\nd = " + std::to_string(d) +
                      "\ntau = " + detail::format_real(tau) + "\ntrials = 1\ngraph_seeds = " + std::to_string(seeds) +
                      "\ndataset_seed = 8\ngraph_seed = 9\nquery_seed = 10\nmc_samples = 1000\n" + models);
}

}  // namespace

TEST(Concentration, DeltaZeroIsVacuousPass) {
  const auto rep = run_concentration_suite(concentration_config(128, 4, 2.0, 10, "model = uniform:0\n"));
  const auto& row = rep.table.rows()[0];
  EXPECT_EQ(row.count("vacuous"), 1);
  EXPECT_EQ(row.num("degree_mean"), 0.0);
  EXPECT_EQ(row.count("degree_chebyshev_pass"), 1);
  EXPECT_EQ(row.count("edges_chebyshev_pass"), 1);
}

// d = 2: Vol_c = arccos(alpha_tau) / pi, so E[degree] = (n - 1) arccos(alpha_tau) / pi.
TEST(Concentration, CircleMeanDegreeOverManySeeds) {
  const double tau = 2.0;
  const auto rep = run_concentration_suite(concentration_config(8, 2, tau, 10000, "model = uniform:1\n"));
  const auto& row = rep.table.rows()[0];
  const double alpha = alpha_fn(tau, 1.5);
  const double expected = 7.0 * std::acos(alpha) / std::numbers::pi;
  // Degrees within a seed share points; use the per-seed mean as the unit.
  EXPECT_NEAR(row.num("pred_degree_mean"), expected, 1e-12);
  EXPECT_LE(std::abs(row.num("edges_mean") / 8.0 - expected), 3.0 * row.num("edges_mean_stderr") / 8.0);
}

TEST(Concentration, ChebyshevBoundHolds) {
  const auto rep = run_concentration_suite(
      concentration_config(512, 9, 2.0, 50, "model = uniform:0.5\nmodel = uniform:1\nmodel = adaptive\n"));
  for (const auto& row : rep.table.rows()) {
    EXPECT_EQ(row.count("degree_chebyshev_pass"), 1) << row.text("model");
    EXPECT_EQ(row.count("edges_chebyshev_pass"), 1) << row.text("model");
  }
}

// ---------------------------------------------------------------------------
// Audit and runner

TEST(Audit, DetectsTamperedColumns) {
  auto rep = run_query_sweep(parse_config(base_config("query-sweep") + "model = uniform:0.5\n"));
  EXPECT_NO_THROW(audit(rep));
  auto bad = rep;
  bad.table.row(0).set("success_rate_stderr", 0.5);
  EXPECT_THROW(audit(bad), InvariantViolation);
  bad = rep;
  bad.table.row(0).set("pred_steps_T", 1.0);
  EXPECT_THROW(audit(bad), InvariantViolation);
}

TEST(Runner, WritesReportsAndManifestWithMatchingChecksums) {
  TempDir dir("ok");
  const auto cfg = parse_config(base_config("query-sweep") + "model = uniform:0.5\n");
  const auto artifacts = run_experiment(cfg, dir.path, 2, "test");
  ASSERT_EQ(artifacts.size(), 3u);
  const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  ASSERT_EQ(manifest["artifacts"].size(), 2u);
  for (const auto& a : manifest["artifacts"]) {
    const auto bytes = read_file(dir.path / a["path"].get<std::string>());
    EXPECT_EQ(crc32(bytes), a["crc32"].get<std::uint32_t>());
    EXPECT_EQ(bytes.size(), a["bytes"].get<std::uint64_t>());
  }
  EXPECT_EQ(manifest["config"]["n"], 4096);
  const auto first = slurp(dir.path / "query-sweep.csv");
  run_experiment(cfg, dir.path, 1, "test");
  EXPECT_EQ(first, slurp(dir.path / "query-sweep.csv"));
}

TEST(Runner, FailureRemovesPartialOutputs) {
  TempDir dir("fail");
  // query-sweep succeeds, then twosided rejects delta1 below the balanced delta2.
  auto text = base_config("query-sweep") + "suite = twosided\nmodel = exact\ndelta1 = 0.04\n";
  const auto cfg = parse_config(text);
  EXPECT_THROW(run_experiment(cfg, dir.path, 1, "test"), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir.path / "query-sweep.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir.path / "query-sweep.json"));
  EXPECT_FALSE(std::filesystem::exists(dir.path / "manifest.json"));
}
