#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>  // nlohmann/json, vendored

#include "anng/config.hpp"
#include "anng/dataset.hpp"
#include "anng/edge_model.hpp"
#include "anng/errors.hpp"
#include "anng/geometry.hpp"
#include "anng/graph.hpp"
#include "anng/parallel.hpp"
#include "anng/random.hpp"
#include "anng/report.hpp"
#include "anng/search.hpp"

namespace anng {

// ---------------------------------------------------------------------------
// Predicted quantities (hidden constants taken as 1).

namespace predict {

/// T = (r0 - r) 2^omega / eps.
inline double steps_T(double r0, double r, double eps, double omega) { return (r0 - r) * std::exp2(omega) / eps; }

/// T * exp(-r^d delta / sqrt(d)), unclipped.
inline double raw_failure(double T, double r, double d, double delta) {
  return T * std::exp(-std::pow(r, d) * delta / std::sqrt(d));
}

inline double failure_bound(double raw) { return std::clamp(raw, 0.0, 1.0); }
inline double success_bound(double raw) { return std::clamp(1.0 - raw, 0.0, 1.0); }
inline bool vacuous(double raw) { return !(raw < 1.0); }

/// 2^omega eps^-1 d^(1/2) tau^d.
inline double query_cost(double omega, double eps, double d, double tau) {
  return std::exp2(omega) / eps * std::sqrt(d) * std::pow(tau, d);
}

/// 1 - exp(-s^d delta / sqrt(d)).
inline double progress(double s, double d, double delta) {
  return std::clamp(1.0 - std::exp(-std::pow(s, d) * delta / std::sqrt(d)), 0.0, 1.0);
}

/// delta2 of the balanced two-sided regime: d^(-1/2) tau^d 2^(-d omega).
inline double balanced_delta2(double d, double tau, double omega) {
  return std::pow(tau, d) * std::exp2(-d * omega) / std::sqrt(d);
}

/// Chebyshev tail bound 4 / (n b), capped at 1.
inline double chebyshev(double nb) { return nb > 0.0 ? std::min(1.0, 4.0 / nb) : 1.0; }

inline double binomial_sd(double trials, double p) { return std::sqrt(trials * p * (1.0 - p)); }

}  // namespace predict

namespace detail {

inline double rate_stderr(double hits, double trials) {
  const double p = hits / trials;
  return std::sqrt(p * (1.0 - p) / trials);
}

// E[rho^2] for the retention probability rho of an ordered pair with a uniform
// partner. Reciprocal coins i->j and j->i share rho, which is what inflates
// the edge-count variance beyond the binomial one.
inline double retention_second_moment(const EdgeModel& model, double alpha_tau, std::size_t d) {
  const double vol = cap_volume_exact(CapSpec(std::clamp(alpha_tau, 0.0, 1.0), d));
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, models::Exact>) return vol;
        else if constexpr (std::is_same_v<M, models::Uniform>) return m.delta * m.delta * vol;
        else if constexpr (std::is_same_v<M, models::TwoSided>)
          return m.delta1 * m.delta1 * vol + m.delta2 * m.delta2 * (1.0 - vol);
        else {
          const double cap_angle = std::acos(std::clamp(alpha_tau, -1.0, 1.0));
          const double k = static_cast<double>(d) - 2.0;
          auto density = [k](double t) { return k == 0.0 ? 1.0 : std::pow(std::sin(t), k); };
          constexpr int kIntervals = 20000;
          auto simpson = [&](double hi, auto weight) {
            const double h = hi / kIntervals;
            double acc = weight(0.0) * density(0.0) + weight(hi) * density(hi);
            for (int i = 1; i < kIntervals; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * weight(i * h) * density(i * h);
            return acc * h / 3.0;
          };
          const double num = simpson(cap_angle, [](double t) {
            const double w = 1.0 - t / std::numbers::pi;
            return w * w;
          });
          return num / simpson(std::numbers::pi, [](double) { return 1.0; });
        }
      },
      model.rule());
}

struct StepSummary {
  double mean = 0.0;
  double median = 0.0;
  std::uint64_t max = 0;
};

inline StepSummary summarize(std::vector<std::uint64_t> values) {
  StepSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (auto v : values) acc += static_cast<double>(v);
  s.mean = acc / static_cast<double>(values.size());
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 == 1 ? static_cast<double>(values[m])
                                    : 0.5 * (static_cast<double>(values[m - 1]) + static_cast<double>(values[m]));
  s.max = values.back();
  return s;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError(context + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const ParameterError& e) {
    throw ParameterError(context + ": " + e.what());
  }
}

inline nlohmann::json calibration_block(const ExperimentConfig& cfg, double alpha_tau) {
  const DensityParams p = cfg.params();
  const CapSpec cap(alpha_tau, p.d());
  Rng rng = make_rng(cfg.dataset_seed, streams::kGeometry);
  const Estimate mc = cap_volume_mc(cap, cfg.mc_samples, rng);
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back(0.1 * k);
  nlohmann::json j;
  j["alpha_tau"] = alpha_tau;
  j["vol_c_exact"] = cap_volume_exact(cap);
  j["vol_c_mc_mean"] = mc.mean;
  j["vol_c_mc_stderr"] = mc.std_error;
  j["mc_samples"] = cfg.mc_samples;
  j["cap_constant_min_ratio"] = calibrate_cap_constant(p.d(), grid);
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Query sweeps.

/// Query columns shared by the query-sweep and two-sided reports.
inline std::vector<std::string> query_sweep_columns() {
  return {"model",          "n",
          "d",              "omega",
          "tau",            "alpha_tau",
          "r",              "r0",
          "epsilon",        "trials",
          "successes",      "failures",
          "success_rate_mean", "success_rate_stderr",
          "steps_mean",     "steps_median",
          "steps_max",      "comparisons_mean",
          "edge_count",     "degree_mean",
          "vol_c_exact",    "vol_c_mc_mean",
          "vol_c_mc_stderr", "delta_eff",
          "pred_edge_prob", "pred_degree_mean",
          "pred_steps_T",   "pred_failure_bound",
          "pred_success_bound", "bound_vacuous",
          "pred_query_cost", "pred_query_cost_delta"};
}

inline std::vector<std::string> twosided_columns() {
  auto cols = query_sweep_columns();
  for (const char* c : {"regime", "delta1", "delta2", "degree_binom_sd", "degree_within_4sd", "pred_edges",
                        "edges_binom_sd", "edges_pair_sd", "edges_within_4sd", "edges_ratio", "edges_in_half_band",
                        "edges_in_quarter_band", "pred_query_cost_regime"})
    cols.emplace_back(c);
  return cols;
}

/// Planted queries with warm starts, shared by every model of a sweep point.
struct QueryPlan {
  std::vector<UnitVector> queries;
  std::vector<std::uint64_t> planted;
  std::vector<std::uint64_t> starts;
};

inline QueryPlan plan_queries(const Dataset& data, const ExperimentConfig& cfg, unsigned threads) {
  const std::size_t trials = cfg.trials;
  std::vector<std::optional<UnitVector>> qs(trials);
  QueryPlan plan;
  plan.planted.resize(trials);
  plan.starts.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = make_rng(cfg.query_seed, streams::kQuery, t);
    PlantedQuery pq = plant_query(data, rng, *cfg.r);
    const auto start = find_warm_start(data, pq.q.coords(), *cfg.r0, *cfg.r, rng);
    if (!start) throw InvariantViolation("plan_queries: planted point is not a warm-start candidate");
    plan.planted[t] = pq.planted;
    plan.starts[t] = *start;
    qs[t] = std::move(pq.q);
  });
  plan.queries.reserve(trials);
  for (auto& q : qs) plan.queries.push_back(std::move(*q));
  return plan;
}

/// Outcomes of every planned query on one graph.
inline std::vector<GreedyOutcome> run_queries(const NeighborGraph& graph, const Dataset& data, const QueryPlan& plan,
                                              const ExperimentConfig& cfg, unsigned threads) {
  std::vector<GreedyOutcome> out(plan.queries.size());
  parallel_for(out.size(), threads, [&](std::size_t t) {
    const QuerySpec spec{plan.queries[t], *cfg.r, cfg.r0, cfg.epsilon};
    out[t] = greedy_query(graph, data, spec, FixedStart{plan.starts[t]});
  });
  return out;
}

namespace detail {

// Fills the shared query columns of one row.
inline void fill_query_row(Table::Row& row, const ExperimentConfig& cfg, const EdgeModel& model,
                           const NeighborGraph& graph, const std::vector<GreedyOutcome>& outcomes, double alpha_tau,
                           const nlohmann::json& calib) {
  const DensityParams p = cfg.params();
  const double d = static_cast<double>(p.d());
  std::uint64_t successes = 0;
  double comparisons = 0.0;
  std::vector<std::uint64_t> steps;
  steps.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.status == QueryStatus::Success) ++successes;
    comparisons += static_cast<double>(o.comparisons);
    steps.push_back(o.steps);
  }
  const auto ss = summarize(std::move(steps));
  const double trials = static_cast<double>(cfg.trials);
  const DegreeStats deg = degree_stats(graph);
  const double delta = model.effective_delta(alpha_tau);
  const double edge_prob = model.marginal_edge_probability(alpha_tau, p.d());
  const double T = predict::steps_T(*cfg.r0, *cfg.r, *cfg.epsilon, p.omega());
  const double raw = predict::raw_failure(T, *cfg.r, d, delta);
  const double cost = predict::query_cost(p.omega(), *cfg.epsilon, d, cfg.tau);

  row.set("model", model.label())
      .set("n", p.n())
      .set("d", p.d())
      .set("omega", p.omega())
      .set("tau", cfg.tau)
      .set("alpha_tau", alpha_tau)
      .set("r", *cfg.r)
      .set("r0", *cfg.r0)
      .set("epsilon", *cfg.epsilon)
      .set("trials", cfg.trials)
      .set("successes", successes)
      .set("failures", cfg.trials - successes)
      .set("success_rate_mean", static_cast<double>(successes) / trials)
      .set("success_rate_stderr", rate_stderr(static_cast<double>(successes), trials))
      .set("steps_mean", ss.mean)
      .set("steps_median", ss.median)
      .set("steps_max", ss.max)
      .set("comparisons_mean", comparisons / trials)
      .set("edge_count", deg.edge_count)
      .set("degree_mean", deg.mean)
      .set("vol_c_exact", calib["vol_c_exact"].get<double>())
      .set("vol_c_mc_mean", calib["vol_c_mc_mean"].get<double>())
      .set("vol_c_mc_stderr", calib["vol_c_mc_stderr"].get<double>())
      .set("delta_eff", delta)
      .set("pred_edge_prob", edge_prob)
      .set("pred_degree_mean", static_cast<double>(p.n() - 1) * edge_prob)
      .set("pred_steps_T", T)
      .set("pred_failure_bound", predict::failure_bound(raw))
      .set("pred_success_bound", predict::success_bound(raw))
      .set("bound_vacuous", predict::vacuous(raw))
      .set("pred_query_cost", cost)
      .set("pred_query_cost_delta", cost * delta);
}

inline std::map<std::string, std::string> query_formulas() {
  return {{"pred_edge_prob", "per-pair edge probability: delta2 + (delta1 - delta2) Vol_c(alpha_tau); adaptive by quadrature"},
          {"pred_degree_mean", "(n - 1) * pred_edge_prob"},
          {"pred_steps_T", "T = (r0 - r) 2^omega / epsilon"},
          {"pred_failure_bound", "min(1, T exp(-r^d delta / sqrt(d))), up to constants"},
          {"pred_success_bound", "max(0, 1 - T exp(-r^d delta / sqrt(d))), up to constants; bound_vacuous when clipped"},
          {"pred_query_cost", "2^omega epsilon^-1 d^(1/2) tau^d, up to constants"},
          {"pred_query_cost_delta", "2^omega epsilon^-1 d^(1/2) tau^d delta, up to constants"}};
}

}  // namespace detail

/// One graph per model over a fixed dataset; planted warm-start queries.
inline Report run_query_sweep(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate_for("query-sweep");
  return detail::with_context("query-sweep", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const DensityParams params = cfg.params();
    const double alpha_tau = alpha_fn(cfg.tau, params.omega());
    Report rep{"query-sweep", Table(query_sweep_columns()), detail::query_formulas(), {}, {}, cfg.to_json()};
    rep.calibration = detail::calibration_block(cfg, alpha_tau);
    const Dataset data = Dataset::generate(params, cfg.dataset_seed);
    const QueryPlan plan = plan_queries(data, cfg, threads);
    nlohmann::json per_model = nlohmann::json::array();
    for (const EdgeModel& model : cfg.edge_models()) {
      const auto tb = std::chrono::steady_clock::now();
      const NeighborGraph graph = build_graph(data, model, cfg.graph_seed, threads);
      const double build_s = detail::seconds_since(tb);
      const auto tq = std::chrono::steady_clock::now();
      const auto outcomes = run_queries(graph, data, plan, cfg, threads);
      per_model.push_back({{"model", model.label()}, {"build_s", build_s}, {"query_s", detail::seconds_since(tq)}});
      detail::fill_query_row(rep.table.add_row(), cfg, model, graph, outcomes, alpha_tau, rep.calibration);
    }
    rep.timings = {{"per_model", per_model}, {"total_s", detail::seconds_since(t0)}};
    return rep;
  });
}

/// For each delta1: TwoSided(delta1, 0) and TwoSided(delta1, d^-1/2 tau^d 2^-d omega).
inline Report run_twosided_sweep(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate_for("twosided");
  const DensityParams params = cfg.params();
  const double d = static_cast<double>(params.d());
  const double n = static_cast<double>(params.n());
  const double delta2_star = predict::balanced_delta2(d, cfg.tau, params.omega());
  if (delta2_star > 1.0)
    throw ConfigError("config (suite twosided): balanced delta2 = d^-1/2 tau^d 2^-d omega = " +
                      detail::format_real(delta2_star) + " exceeds 1");
  for (double d1 : cfg.delta1)
    if (!(d1 > delta2_star) || d1 > 1.0)
      throw ConfigError("config (suite twosided): delta1 = " + detail::format_real(d1) +
                        " must lie in (balanced delta2, 1] = (" + detail::format_real(delta2_star) + ", 1]");

  return detail::with_context("twosided", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const double alpha_tau = alpha_fn(cfg.tau, params.omega());
    auto formulas = detail::query_formulas();
    formulas["delta2"] = "balanced regime: d^(-1/2) tau^d 2^(-d omega)";
    formulas["pred_edges"] = "n (n - 1) (delta2 + (delta1 - delta2) Vol_c(alpha_tau))";
    formulas["edges_binom_sd"] = "sqrt(n (n - 1) b (1 - b)), b = pred_edge_prob";
    formulas["edges_pair_sd"] = "binomial variance plus reciprocal-pair covariance n (n - 1) (E[rho^2] - b^2)";
    formulas["degree_binom_sd"] = "edges_binom_sd / n (standard deviation of the mean degree)";
    formulas["pred_query_cost_regime"] =
        "delta2 = 0: 2^omega epsilon^-1 d^(1/2) tau^d delta1; balanced: 2^omega epsilon^-1 d^(1/2) tau^d";
    Report rep{"twosided", Table(twosided_columns()), formulas, {}, {}, cfg.to_json()};
    rep.calibration = detail::calibration_block(cfg, alpha_tau);
    rep.calibration["balanced_delta2"] = delta2_star;
    const Dataset data = Dataset::generate(params, cfg.dataset_seed);
    const QueryPlan plan = plan_queries(data, cfg, threads);
    nlohmann::json per_model = nlohmann::json::array();
    for (double d1 : cfg.delta1) {
      for (const bool balanced : {false, true}) {
        const double d2 = balanced ? delta2_star : 0.0;
        const EdgeModel model(models::TwoSided{d1, d2}, cfg.tau);
        const auto tb = std::chrono::steady_clock::now();
        const NeighborGraph graph = build_graph(data, model, cfg.graph_seed, threads);
        const double build_s = detail::seconds_since(tb);
        const auto tq = std::chrono::steady_clock::now();
        const auto outcomes = run_queries(graph, data, plan, cfg, threads);
        per_model.push_back({{"model", model.label()}, {"build_s", build_s}, {"query_s", detail::seconds_since(tq)}});

        auto& row = rep.table.add_row();
        detail::fill_query_row(row, cfg, model, graph, outcomes, alpha_tau, rep.calibration);
        const double b = row.num("pred_edge_prob");
        const double pred_edges = n * (n - 1.0) * b;
        const double edges_sd = predict::binomial_sd(n * (n - 1.0), b);
        const double m2 = detail::retention_second_moment(model, alpha_tau, params.d());
        const double pair_sd = std::sqrt(edges_sd * edges_sd + n * (n - 1.0) * (m2 - b * b));
        const double edges = row.num("edge_count");
        const double ratio = pred_edges > 0.0 ? edges / pred_edges : 0.0;
        const double cost = row.num("pred_query_cost");
        row.set("regime", balanced ? "balanced" : "delta2_zero")
            .set("delta1", d1)
            .set("delta2", d2)
            .set("degree_binom_sd", edges_sd / n)
            .set("degree_within_4sd", std::abs(row.num("degree_mean") - row.num("pred_degree_mean")) <= 4.0 * edges_sd / n)
            .set("pred_edges", pred_edges)
            .set("edges_binom_sd", edges_sd)
            .set("edges_pair_sd", pair_sd)
            .set("edges_within_4sd", std::abs(edges - pred_edges) <= 4.0 * edges_sd)
            .set("edges_ratio", ratio)
            .set("edges_in_half_band", edges >= 0.5 * pred_edges && edges <= 1.5 * pred_edges)
            .set("edges_in_quarter_band", edges >= 0.25 * pred_edges && edges <= 0.75 * pred_edges)
            .set("pred_query_cost_regime", balanced ? cost : cost * d1);
      }
    }
    rep.timings = {{"per_model", per_model}, {"total_s", detail::seconds_since(t0)}};
    return rep;
  });
}

// ---------------------------------------------------------------------------
// Progress trials.

inline std::vector<std::string> progress_columns() {
  return {"model",   "n",         "d",          "omega",           "tau",              "alpha_tau",
          "s",       "epsilon",   "trials",     "successes",       "success_rate_mean", "success_rate_stderr",
          "oracle_successes", "oracle_rate_mean", "degree_p1_mean", "delta_eff",      "pred_wedge_lb",
          "pred_progress_bound"};
}

/// Report plus per-trial outcomes (one vector per model, 1 = progress made).
struct ProgressResult {
  Report report;
  std::vector<std::vector<std::uint8_t>> outcomes;
  std::vector<std::uint8_t> oracle;
};

/// Per trial: fresh dataset, q at sine distance (s + eps) 2^-omega from p1 = point 0,
/// then does some out-neighbor of p1 lie within s 2^-omega of q (on q's side)?
inline ProgressResult run_progress_trial(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate_for("progress");
  return detail::with_context("progress", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const DensityParams params = cfg.params();
    const double s = *cfg.s;
    const double eps = *cfg.epsilon;
    const double lb = wedge_lb(cfg.tau, s, eps, params);
    const double alpha_tau = alpha_fn(cfg.tau, params.omega());
    const auto models = cfg.edge_models();
    const double target = s / params.scale();
    const double start_sine = (s + eps) / params.scale();

    ProgressResult res;
    res.outcomes.assign(models.size(), std::vector<std::uint8_t>(cfg.trials, 0));
    res.oracle.assign(cfg.trials, 0);
    std::vector<std::vector<std::uint64_t>> degrees(models.size(), std::vector<std::uint64_t>(cfg.trials, 0));
    parallel_for(cfg.trials, threads, [&](std::size_t t) {
      const Dataset data = Dataset::generate(params, derive_seed(cfg.dataset_seed, streams::kTrialDataset, t));
      Rng rng = make_rng(cfg.query_seed, streams::kQuery, t);
      const UnitVector q = place_at_sine(data.point(0), start_sine, rng);
      const std::uint64_t gseed = derive_seed(cfg.graph_seed, streams::kGraph, t);
      for (std::uint64_t j = 1; j < data.size(); ++j)
        if (within_sine_radius(data.point(j), q, target)) {
          res.oracle[t] = 1;
          break;
        }
      for (std::size_t m = 0; m < models.size(); ++m) {
        const auto row = build_row(data, models[m], gseed, 0, alpha_tau);
        degrees[m][t] = row.size();
        for (VertexId j : row)
          if (within_sine_radius(data.point(j), q, target)) {
            res.outcomes[m][t] = 1;
            break;
          }
      }
    });

    Report rep{"progress", Table(progress_columns()),
               {{"pred_wedge_lb", "s^d / (n sqrt(d)), lower bound on the wedge volume"},
                {"pred_progress_bound", "1 - exp(-s^d delta / sqrt(d)), up to constants"}},
               {}, {}, cfg.to_json()};
    rep.calibration = detail::calibration_block(cfg, alpha_tau);
    const double trials = static_cast<double>(cfg.trials);
    std::uint64_t oracle_hits = 0;
    for (auto v : res.oracle) oracle_hits += v;
    for (std::size_t m = 0; m < models.size(); ++m) {
      std::uint64_t hits = 0;
      for (auto v : res.outcomes[m]) hits += v;
      const double delta = models[m].effective_delta(alpha_tau);
      rep.table.add_row()
          .set("model", models[m].label())
          .set("n", params.n())
          .set("d", params.d())
          .set("omega", params.omega())
          .set("tau", cfg.tau)
          .set("alpha_tau", alpha_tau)
          .set("s", s)
          .set("epsilon", eps)
          .set("trials", cfg.trials)
          .set("successes", hits)
          .set("success_rate_mean", static_cast<double>(hits) / trials)
          .set("success_rate_stderr", detail::rate_stderr(static_cast<double>(hits), trials))
          .set("oracle_successes", oracle_hits)
          .set("oracle_rate_mean", static_cast<double>(oracle_hits) / trials)
          .set("degree_p1_mean", detail::summarize(degrees[m]).mean)
          .set("delta_eff", delta)
          .set("pred_wedge_lb", lb)
          .set("pred_progress_bound", predict::progress(s, static_cast<double>(params.d()), delta));
    }
    rep.timings = {{"total_s", detail::seconds_since(t0)}};
    res.report = std::move(rep);
    return res;
  });
}

// ---------------------------------------------------------------------------
// Concentration.

inline std::vector<std::string> concentration_columns() {
  return {"model",
          "n",
          "d",
          "omega",
          "tau",
          "alpha_tau",
          "graph_seeds",
          "vol_c_exact",
          "pred_edge_prob",
          "pred_degree_mean",
          "pred_edges",
          "degree_obs",
          "degree_mean",
          "degree_mean_stderr",
          "degree_tail_count",
          "degree_tail_rate",
          "degree_tail_stderr",
          "pred_degree_chebyshev_bound",
          "degree_chebyshev_pass",
          "degree_band_lo",
          "degree_band_hi",
          "degree_theory_band_lo",
          "degree_theory_band_hi",
          "degree_in_theory_band_rate",
          "degree_binom_band_lo",
          "degree_binom_band_hi",
          "degree_in_binom_band_rate",
          "edges_mean",
          "edges_mean_stderr",
          "edges_tail_count",
          "edges_tail_rate",
          "edges_tail_stderr",
          "pred_edges_chebyshev_bound",
          "edges_chebyshev_pass",
          "edges_binom_sd",
          "edges_in_binom_band_rate",
          "vacuous"};
}

/// Degrees and edge counts over `graph_seeds` independent (dataset, graph) draws.
inline Report run_concentration_suite(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate_for("concentration");
  return detail::with_context("concentration", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const DensityParams params = cfg.params();
    const double n = static_cast<double>(params.n());
    const double alpha_tau = alpha_fn(cfg.tau, params.omega());
    const double vol = cap_volume_exact(CapSpec(alpha_tau, params.d()));
    const auto models = cfg.edge_models();
    const std::size_t seeds = cfg.graph_seeds;

    // degrees[m][k * n + i], edges[m][k]
    std::vector<std::vector<std::uint32_t>> degrees(models.size(), std::vector<std::uint32_t>(seeds * params.n()));
    std::vector<std::vector<std::uint64_t>> edges(models.size(), std::vector<std::uint64_t>(seeds));
    parallel_for(seeds, threads, [&](std::size_t k) {
      const Dataset data = Dataset::generate(params, derive_seed(cfg.dataset_seed, streams::kTrialDataset, k));
      const std::uint64_t gseed = derive_seed(cfg.graph_seed, streams::kGraph, k);
      for (std::size_t m = 0; m < models.size(); ++m) {
        const NeighborGraph g = build_graph(data, models[m], gseed, 1);
        const auto off = g.offsets();
        for (std::uint64_t i = 0; i < params.n(); ++i)
          degrees[m][k * params.n() + i] = static_cast<std::uint32_t>(off[i + 1] - off[i]);
        edges[m][k] = g.edge_count();
      }
    });

    Report rep{"concentration",
               Table(concentration_columns()),
               {{"pred_edge_prob", "b = per-pair edge probability (delta2 + (delta1 - delta2) Vol_c(alpha_tau))"},
                {"pred_degree_mean", "(n - 1) b"},
                {"pred_edges", "n (n - 1) b"},
                {"pred_degree_chebyshev_bound", "Pr[|x - (n-1) b| >= (n-1) b / 2] <= 4 / ((n-1) b)"},
                {"pred_edges_chebyshev_bound", "Pr[|x - n(n-1) b| >= n(n-1) b / 2] <= 4 / (n (n-1) b)"},
                {"degree_theory_band", "[1 - 0.5 delta, 1.5] (n - 1) Vol_c(alpha_tau)"},
                {"degree_binom_band", "(n - 1) b +- 4 sqrt((n - 1) b (1 - b))"},
                {"edges_binom_sd", "sqrt(n (n - 1) b (1 - b))"}},
               {},
               {},
               cfg.to_json()};
    rep.calibration = detail::calibration_block(cfg, alpha_tau);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const EdgeModel& model = models[m];
      const double b = model.marginal_edge_probability(alpha_tau, params.d());
      const double mu_deg = (n - 1.0) * b;
      const double mu_edges = n * (n - 1.0) * b;
      const bool vacuous = !(b > 0.0);
      const double delta = model.effective_delta(alpha_tau);
      const double theory_lo = (1.0 - 0.5 * delta) * (n - 1.0) * vol;
      const double theory_hi = 1.5 * (n - 1.0) * vol;
      const double deg_sd = predict::binomial_sd(n - 1.0, b);
      const double edges_sd = predict::binomial_sd(n * (n - 1.0), b);

      const auto& deg = degrees[m];
      const double obs = static_cast<double>(deg.size());
      double sum = 0.0, sq = 0.0;
      std::uint64_t tail = 0, in_theory = 0, in_binom = 0;
      for (auto x32 : deg) {
        const double x = x32;
        sum += x;
        sq += x * x;
        if (std::abs(x - mu_deg) >= mu_deg / 2.0) ++tail;
        if (x >= theory_lo && x <= theory_hi) ++in_theory;
        if (std::abs(x - mu_deg) <= 4.0 * deg_sd) ++in_binom;
      }
      const double deg_mean = sum / obs;
      const double deg_var = obs > 1 ? std::max(0.0, (sq - obs * deg_mean * deg_mean) / (obs - 1.0)) : 0.0;

      const auto& es = edges[m];
      const double eobs = static_cast<double>(es.size());
      double esum = 0.0, esq = 0.0;
      std::uint64_t etail = 0, e_in_binom = 0;
      for (auto x64 : es) {
        const double x = static_cast<double>(x64);
        esum += x;
        esq += x * x;
        if (std::abs(x - mu_edges) >= mu_edges / 2.0) ++etail;
        if (std::abs(x - mu_edges) <= 4.0 * edges_sd) ++e_in_binom;
      }
      const double e_mean = esum / eobs;
      const double e_var = eobs > 1 ? std::max(0.0, (esq - eobs * e_mean * e_mean) / (eobs - 1.0)) : 0.0;

      const double deg_rate = static_cast<double>(tail) / obs;
      const double deg_rate_se = detail::rate_stderr(static_cast<double>(tail), obs);
      const double deg_bound = predict::chebyshev(mu_deg);
      const double e_rate = static_cast<double>(etail) / eobs;
      const double e_rate_se = detail::rate_stderr(static_cast<double>(etail), eobs);
      const double e_bound = predict::chebyshev(mu_edges);

      rep.table.add_row()
          .set("model", model.label())
          .set("n", params.n())
          .set("d", params.d())
          .set("omega", params.omega())
          .set("tau", cfg.tau)
          .set("alpha_tau", alpha_tau)
          .set("graph_seeds", cfg.graph_seeds)
          .set("vol_c_exact", vol)
          .set("pred_edge_prob", b)
          .set("pred_degree_mean", mu_deg)
          .set("pred_edges", mu_edges)
          .set("degree_obs", static_cast<std::uint64_t>(deg.size()))
          .set("degree_mean", deg_mean)
          .set("degree_mean_stderr", std::sqrt(deg_var / obs))
          .set("degree_tail_count", tail)
          .set("degree_tail_rate", deg_rate)
          .set("degree_tail_stderr", deg_rate_se)
          .set("pred_degree_chebyshev_bound", deg_bound)
          .set("degree_chebyshev_pass", vacuous || deg_rate <= deg_bound + 3.0 * deg_rate_se)
          .set("degree_band_lo", 0.5 * mu_deg)
          .set("degree_band_hi", 1.5 * mu_deg)
          .set("degree_theory_band_lo", theory_lo)
          .set("degree_theory_band_hi", theory_hi)
          .set("degree_in_theory_band_rate", static_cast<double>(in_theory) / obs)
          .set("degree_binom_band_lo", mu_deg - 4.0 * deg_sd)
          .set("degree_binom_band_hi", mu_deg + 4.0 * deg_sd)
          .set("degree_in_binom_band_rate", static_cast<double>(in_binom) / obs)
          .set("edges_mean", e_mean)
          .set("edges_mean_stderr", std::sqrt(e_var / eobs))
          .set("edges_tail_count", etail)
          .set("edges_tail_rate", e_rate)
          .set("edges_tail_stderr", e_rate_se)
          .set("pred_edges_chebyshev_bound", e_bound)
          .set("edges_chebyshev_pass", vacuous || e_rate <= e_bound + 3.0 * e_rate_se)
          .set("edges_binom_sd", edges_sd)
          .set("edges_in_binom_band_rate", static_cast<double>(e_in_binom) / eobs)
          .set("vacuous", vacuous);
    }
    rep.timings = {{"total_s", detail::seconds_since(t0)}};
    return rep;
  });
}

// ---------------------------------------------------------------------------
// Self-audit: recompute derived columns from raw counts and configuration.

namespace detail {

inline void audit_close(const Table::Row& row, const std::string& column, double expected, const std::string& suite) {
  const double got = row.num(column);
  const double tol = 1e-12 * std::max(1.0, std::abs(expected));
  const bool both_nan = std::isnan(got) && std::isnan(expected);
  if (!both_nan && !(std::abs(got - expected) <= tol))
    throw InvariantViolation("self-audit (" + suite + "): column '" + column + "' = " + format_real(got) +
                             ", recomputed " + format_real(expected));
}

}  // namespace detail

/// Throws InvariantViolation when a derived column disagrees with its recomputation.
inline void audit(const Report& rep) {
  const Table& t = rep.table;
  auto has = [&](const char* c) { return t.has_column(c); };
  for (const auto& row : t.rows()) {
    if (!row.complete()) throw InvariantViolation("self-audit (" + rep.suite + "): incomplete row");
    auto check = [&](const std::string& c, double v) { detail::audit_close(row, c, v, rep.suite); };
    const double n = row.num("n");
    const double d = row.num("d");
    check("omega", std::log2(n) / d);
    check("alpha_tau", alpha_fn(row.num("tau"), row.num("omega")));
    if (has("successes")) {
      const double trials = row.num("trials");
      const double hits = row.num("successes");
      check("success_rate_mean", hits / trials);
      check("success_rate_stderr", detail::rate_stderr(hits, trials));
    }
    if (has("failures")) check("failures", row.num("trials") - row.num("successes"));
    if (has("pred_degree_mean")) check("pred_degree_mean", (n - 1.0) * row.num("pred_edge_prob"));
    if (has("pred_steps_T")) {
      const double T = predict::steps_T(row.num("r0"), row.num("r"), row.num("epsilon"), row.num("omega"));
      const double raw = predict::raw_failure(T, row.num("r"), d, row.num("delta_eff"));
      const double cost = predict::query_cost(row.num("omega"), row.num("epsilon"), d, row.num("tau"));
      check("pred_steps_T", T);
      check("pred_failure_bound", predict::failure_bound(raw));
      check("pred_success_bound", predict::success_bound(raw));
      check("bound_vacuous", predict::vacuous(raw) ? 1.0 : 0.0);
      check("pred_query_cost", cost);
      check("pred_query_cost_delta", cost * row.num("delta_eff"));
      check("degree_mean", row.num("edge_count") / n);
    }
    if (has("regime")) {
      const double b = row.num("pred_edge_prob");
      const double d1 = row.num("delta1");
      const double d2 = row.num("delta2");
      check("pred_edge_prob", d2 + (d1 - d2) * row.num("vol_c_exact"));
      const double pe = n * (n - 1.0) * b;
      const double sd = predict::binomial_sd(n * (n - 1.0), b);
      const double edges = row.num("edge_count");
      check("pred_edges", pe);
      check("edges_binom_sd", sd);
      check("degree_binom_sd", sd / n);
      check("edges_ratio", pe > 0.0 ? edges / pe : 0.0);
      check("edges_within_4sd", std::abs(edges - pe) <= 4.0 * sd ? 1.0 : 0.0);
      check("degree_within_4sd",
            std::abs(row.num("degree_mean") - row.num("pred_degree_mean")) <= 4.0 * sd / n ? 1.0 : 0.0);
      check("edges_in_half_band", edges >= 0.5 * pe && edges <= 1.5 * pe ? 1.0 : 0.0);
      check("edges_in_quarter_band", edges >= 0.25 * pe && edges <= 0.75 * pe ? 1.0 : 0.0);
      const bool balanced = row.text("regime") == "balanced";
      check("pred_query_cost_regime", balanced ? row.num("pred_query_cost") : row.num("pred_query_cost") * d1);
      if (balanced) check("delta2", predict::balanced_delta2(d, row.num("tau"), row.num("omega")));
    }
    if (has("pred_progress_bound")) {
      check("oracle_rate_mean", row.num("oracle_successes") / row.num("trials"));
      check("pred_progress_bound", predict::progress(row.num("s"), d, row.num("delta_eff")));
      check("pred_wedge_lb", std::pow(row.num("s"), d) / (n * std::sqrt(d)));
    }
    if (has("degree_tail_rate")) {
      const double b = row.num("pred_edge_prob");
      const double mu_deg = (n - 1.0) * b;
      const double mu_e = n * (n - 1.0) * b;
      const double obs = row.num("degree_obs");
      const double eobs = row.num("graph_seeds");
      const double dt = row.num("degree_tail_count");
      const double et = row.num("edges_tail_count");
      const bool vac = !(b > 0.0);
      check("pred_degree_mean", mu_deg);
      check("pred_edges", mu_e);
      check("degree_obs", eobs * n);
      check("degree_tail_rate", dt / obs);
      check("degree_tail_stderr", detail::rate_stderr(dt, obs));
      check("pred_degree_chebyshev_bound", predict::chebyshev(mu_deg));
      check("degree_chebyshev_pass",
            vac || dt / obs <= predict::chebyshev(mu_deg) + 3.0 * detail::rate_stderr(dt, obs) ? 1.0 : 0.0);
      check("degree_band_lo", 0.5 * mu_deg);
      check("degree_band_hi", 1.5 * mu_deg);
      check("degree_binom_band_lo", mu_deg - 4.0 * predict::binomial_sd(n - 1.0, b));
      check("degree_binom_band_hi", mu_deg + 4.0 * predict::binomial_sd(n - 1.0, b));
      check("edges_tail_rate", et / eobs);
      check("edges_tail_stderr", detail::rate_stderr(et, eobs));
      check("pred_edges_chebyshev_bound", predict::chebyshev(mu_e));
      check("edges_chebyshev_pass",
            vac || et / eobs <= predict::chebyshev(mu_e) + 3.0 * detail::rate_stderr(et, eobs) ? 1.0 : 0.0);
      check("edges_binom_sd", predict::binomial_sd(n * (n - 1.0), b));
      check("vacuous", vac ? 1.0 : 0.0);
    }
  }
}

/// Runs one named suite and audits the result.
inline Report run_suite(const std::string& suite, const ExperimentConfig& cfg, unsigned threads = 1) {
  Report rep;
  if (suite == "query-sweep") rep = run_query_sweep(cfg, threads);
  else if (suite == "twosided") rep = run_twosided_sweep(cfg, threads);
  else if (suite == "progress") rep = run_progress_trial(cfg, threads).report;
  else if (suite == "concentration") rep = run_concentration_suite(cfg, threads);
  else throw ConfigError("unknown suite '" + suite + "'");
  audit(rep);
  return rep;
}

}  // namespace anng
