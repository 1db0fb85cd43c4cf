// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anng/anng.hpp"
#include "reference_sim.hpp"

using namespace anng;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_budget = elapsed < budget_s;
  const bool pass = out.pass && in_budget;
  if (!pass && id.rfind("info", 0) != 0) ++failures;
  std::printf("%s %-6s %s | %s | %.2fs (budget %.0fs%s)\n", pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              out.detail.c_str(), elapsed, budget_s, in_budget ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

ExperimentConfig query_config(std::uint64_t n, std::uint64_t d, double tau, double r, double r0, double eps,
                              std::uint64_t trials, std::vector<std::string> models, std::uint64_t seed) {
  ExperimentConfig c;
  c.suites = {"query-sweep"};
  c.n = n;
  c.d = d;
  c.tau = tau;
  c.r = r;
  c.r0 = r0;
  c.epsilon = eps;
  c.trials = trials;
  c.models = std::move(models);
  c.dataset_seed = seed;
  c.graph_seed = seed + 1;
  c.query_seed = seed + 2;
  c.mc_samples = 20000;
  return c;
}

// Success rate non-decreasing within 2 stderr at every adjacent pair; failures strictly
// increase from the largest to the smallest delta.
Outcome monotone_tradeoff(const Report& rep) {
  const auto& rows = rep.table.rows();
  bool ok = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    os << rows[k].text("model") << " rate=" << fmt("%.4f", rows[k].num("success_rate_mean"))
       << " fails=" << rows[k].count("failures") << "; ";
    if (k > 0) {
      const double se = std::hypot(rows[k - 1].num("success_rate_stderr"), rows[k].num("success_rate_stderr"));
      ok &= rows[k].num("success_rate_mean") + 2.0 * se >= rows[k - 1].num("success_rate_mean");
    }
  }
  ok &= rows.front().count("failures") > rows.back().count("failures");
  return {ok, os.str()};
}

}  // namespace

int main() {
  constexpr double kSqrt8 = 2.0 * std::numbers::sqrt2;
  std::printf("acceptance: 12 criteria, tolerances pinned in code\n");

  criterion("1", "cap volume: MC(1e5) vs exact within 5 sd, 50 random (gamma, d)", 60, [] {
    Rng rng = make_rng(1001, streams::kGeometry);
    std::uniform_int_distribution<std::size_t> dim(2, 16);
    std::uniform_real_distribution<double> height(0.0, 0.9);
    int bad = 0;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const CapSpec spec(height(rng), dim(rng));
      const double exact = cap_volume_exact(spec);
      const auto est = cap_volume_mc(spec, 100000, rng);
      // Standard error of the estimator at the true volume (robust when no sample hits a tiny cap).
      const double se = std::sqrt(exact * (1.0 - exact) / 100000.0);
      const double z = std::abs(est.mean - exact) / se;
      worst = std::max(worst, z);
      bad += !(z <= 5.0);
    }
    return Outcome{bad == 0, fmt("violations=%d max|z|=%.2f", bad, worst)};
  });

  criterion("2", "wedge > cap/2 with 5-sigma margin, 20 tuples beta <= gamma cos theta, 1e6 samples", 300, [] {
    Rng rng = make_rng(1002, streams::kGeometry);
    std::uniform_int_distribution<std::size_t> dim(3, 10);
    std::uniform_real_distribution<double> g(0.1, 0.5), th(0.1, 1.2), shrink(0.5, 1.0);
    int bad = 0;
    double min_margin = 1e9;
    for (int k = 0; k < 20; ++k) {
      const std::size_t d = dim(rng);
      const double gamma = g(rng), theta = th(rng);
      const double beta = gamma * std::cos(theta) * shrink(rng);
      const auto est = wedge_volume_mc(WedgeSpec(beta, gamma, theta), d, 1000000, rng);
      const double half = cap_volume_exact(CapSpec(gamma, d)) / 2.0;
      const double margin = (est.mean - half) / est.std_error;
      min_margin = std::min(min_margin, margin);
      bad += !(margin > 5.0);
    }
    return Outcome{bad == 0, fmt("violations=%d min margin=%.1f sd", bad, min_margin)};
  });

  criterion("3", "alpha_tau < alpha_s * alpha_{s+eps} on a 100-tuple grid", 1, [] {
    int count = 0, bad = 0;
    for (double omega : {2.0, 2.5, 3.0, 3.5})
      for (double s : {1.05, 1.2, 1.4, 1.6, 1.8})
        for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3}) {
          const double tau = std::numbers::sqrt2 * (s + eps);
          ++count;
          bad += !(alpha_fn(tau, omega) < alpha_fn(s, omega) * alpha_fn(s + eps, omega));
        }
    return Outcome{bad == 0 && count == 100, fmt("tuples=%d violations=%d", count, bad)};
  });

  criterion("4", "Chebyshev: tail frequency <= 4/(nb), 1e4 binomial draws per (n, p) on 3x3 grid", 60, [] {
    int bad = 0, cell = 0;
    std::ostringstream os;
    for (int n : {50, 200, 1000})
      for (double p : {0.05, 0.15, 0.3}) {
        Rng rng = make_rng(1004, streams::kChebyshev, cell++);
        std::binomial_distribution<int> bin(n, p);
        int tail = 0;
        for (int k = 0; k < 10000; ++k) tail += std::abs(bin(rng) - n * p) >= n * p / 2.0;
        const double freq = tail / 10000.0;
        const double bound = 4.0 / (n * p);
        bad += !(freq <= bound);
        os << fmt("(%d,%.2f):%.4f<=%.3f ", n, p, freq, std::min(bound, 1.0));
      }
    return Outcome{bad == 0, os.str()};
  });

  const auto ref_params = DensityParams::from_counts(512, 9);
  const Dataset ref_data = Dataset::generate(ref_params, 2024);

  criterion("5", "n=512 d=9 tau=2 uniform(0.5, 1): degree and edges within 4 binomial sd", 240, [&] {
    const double n = 512.0;
    const double alpha = alpha_fn(2.0, ref_params.omega());
    const double vol = cap_volume_exact(CapSpec(alpha, 9));
    bool ok = true;
    std::ostringstream os;
    for (double delta : {0.5, 1.0}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto g = build_graph(ref_data, EdgeModel(models::Uniform{delta}, 2.0), 77);
      const auto s = degree_stats(g);
      const double b = delta * vol;
      const double edges_sd = predict::binomial_sd(n * (n - 1.0), b);
      const double z_deg = (s.mean - (n - 1.0) * b) / (edges_sd / n);
      const double z_edges = (static_cast<double>(s.edge_count) - n * (n - 1.0) * b) / edges_sd;
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ok &= std::abs(z_deg) <= 4.0 && std::abs(z_edges) <= 4.0 && secs < 120.0;
      os << fmt("delta=%.1f mean=%.3f pred=%.3f z=%.2f edges=%llu z=%.2f; ", delta, s.mean, (n - 1.0) * b, z_deg,
                static_cast<unsigned long long>(s.edge_count), z_edges);
    }
    return Outcome{ok, os.str()};
  });

  criterion("6", "two-sided(0.8, d^-1/2 tau^d 2^-d omega): degree within 4 sd and edges in [1/4,3/4] band", 120, [&] {
    const double n = 512.0, d = 9.0;
    const double alpha = alpha_fn(2.0, ref_params.omega());
    const double vol = cap_volume_exact(CapSpec(alpha, 9));
    const double d2 = predict::balanced_delta2(d, 2.0, ref_params.omega());
    const auto g = build_graph(ref_data, EdgeModel(models::TwoSided{0.8, d2}, 2.0), 77);
    const auto s = degree_stats(g);
    const double b = d2 + (0.8 - d2) * vol;
    const double pred_edges = n * (n - 1.0) * b;
    const double sd = predict::binomial_sd(n * (n - 1.0), b);
    const double z = (s.mean - (n - 1.0) * b) / (sd / n);
    const double e = static_cast<double>(s.edge_count);
    const bool degree_ok = std::abs(z) <= 4.0;
    const bool quarter_ok = e >= 0.25 * pred_edges && e <= 0.75 * pred_edges;
    const bool half_ok = e >= 0.5 * pred_edges && e <= 1.5 * pred_edges;
    return Outcome{degree_ok && quarter_ok,
                   fmt("delta2=%.6f degree z=%.2f (%s); edges/pred=%.4f, [1/4,3/4] band %s; [1/2,3/2] band %s", d2, z,
                       degree_ok ? "ok" : "out", e / pred_edges, quarter_ok ? "ok" : "VIOLATED",
                       half_ok ? "ok" : "violated")};
  });

  criterion("7", "coupling identities: uniform(1) == exact graph; twosided(d1, 0) report == uniform(d1)", 60, [&] {
    const auto a = build_graph(ref_data, EdgeModel(models::Uniform{1.0}, 2.0), 5);
    const auto b = build_graph(ref_data, EdgeModel(models::Exact{}, 2.0), 5);
    const bool graphs = std::ranges::equal(a.offsets(), b.offsets()) && std::ranges::equal(a.targets(), b.targets());
    auto cfg = query_config(4096, 6, kSqrt8, 1.5, 2.0, 0.25, 500, {"uniform:0.4"}, 700);
    const auto uni = run_query_sweep(cfg);
    cfg.suites = {"twosided"};
    cfg.delta1 = {0.4};
    const auto two = run_twosided_sweep(cfg);
    bool reports = two.table.rows()[0].text("regime") == "delta2_zero";
    for (const auto& col : query_sweep_columns())
      if (col != "model") reports &= two.table.rows()[0].get(col) == uni.table.rows()[0].get(col);
    return Outcome{graphs && reports, fmt("graphs %s, reports %s", graphs ? "identical" : "DIFFER",
                                          reports ? "identical" : "DIFFER")};
  });

  const std::vector<std::string> sweep = {"uniform:0.1", "uniform:0.25", "uniform:0.5", "uniform:0.75", "uniform:1"};
  criterion("8", "monotone trade-off: n=2048 d=11 tau=2sqrt2 r=1.5 r0=2, 2000 queries per delta", 600, [&] {
    const auto cfg = query_config(2048, 11, kSqrt8, 1.5, 2.0, 0.25, 2000, sweep, 800);
    return monotone_tradeoff(run_query_sweep(cfg, resolve_threads()));
  });
  criterion("info-8", "(informational) same sweep at n=4096 d=6 where alpha_tau exists", 600, [&] {
    const auto cfg = query_config(4096, 6, kSqrt8, 1.5, 2.0, 0.25, 2000, sweep, 800);
    return monotone_tradeoff(run_query_sweep(cfg, resolve_threads()));
  });

  criterion("9", "progress: rate(0.5) <= rate(1.0) pointwise on 1000 coupled trials (n=4096 d=8 s=1.2 eps=0.1)", 300,
            [] {
              ExperimentConfig c;
              c.suites = {"progress"};
              c.n = 4096;
              c.d = 8;
              c.tau = 2.0;
              c.s = 1.2;
              c.epsilon = 0.1;
              c.trials = 1000;
              c.models = {"uniform:0.5", "uniform:1"};
              c.dataset_seed = 900;
              c.graph_seed = 901;
              c.query_seed = 902;
              c.mc_samples = 1000;
              const auto res = run_progress_trial(c, resolve_threads());
              std::uint64_t violations = 0;
              for (std::size_t t = 0; t < c.trials; ++t) violations += res.outcomes[0][t] > res.outcomes[1][t];
              const auto& rows = res.report.table.rows();
              return Outcome{violations == 0, fmt("violations=%llu rate(0.5)=%.3f rate(1)=%.3f",
                                                  static_cast<unsigned long long>(violations),
                                                  rows[0].num("success_rate_mean"), rows[1].num("success_rate_mean"))};
            });

  criterion("10", "greedy path == reference simulator on 20 instances, n <= 64", 30, [] {
    int mismatches = 0, queries = 0;
    const char* names[] = {"exact", "uniform:0.5", "adaptive", "twosided:0.6,0.1"};
    for (int inst = 0; inst < 20; ++inst) {
      const std::uint64_t n = 24 + 2 * static_cast<std::uint64_t>(inst);
      const auto params = DensityParams::from_counts(n, 2);
      const auto data = Dataset::generate(params, 1000 + inst);
      const auto model = EdgeModel::parse(names[inst % 4], 0.9 * params.scale());
      const auto pars = model.parameters();
      const auto graph = build_graph(data, model, 50 + inst);
      ref::Instance in{n, 2, {}};
      for (std::uint64_t i = 0; i < n; ++i) in.pts.emplace_back(data.point(i).begin(), data.point(i).end());
      const auto adj = ref::adjacency(in, model.tag(), pars.empty() ? 0 : pars[0], pars.size() > 1 ? pars[1] : 0,
                                      threshold_for(model, params), 50 + inst);
      Rng rng = make_rng(inst, streams::kQuery);
      const double r = 1.0 + 0.5 * (params.scale() - 1.0);
      for (std::uint64_t start = 0; start < n; start += 3) {
        const auto pq = plant_query(data, rng, r);
        const auto out = greedy_query(graph, data, QuerySpec{pq.q, r, {}, {}}, FixedStart{start});
        const auto w = ref::greedy(in, adj, {pq.q.coords().begin(), pq.q.coords().end()}, r / params.scale(), start);
        ++queries;
        const bool same = out.path.size() == w.path.size() && std::equal(w.path.begin(), w.path.end(), out.path.begin()) &&
                          (out.status == QueryStatus::Success) == w.success && out.comparisons == w.comparisons;
        mismatches += !same;
      }
    }
    return Outcome{mismatches == 0, fmt("queries=%d mismatches=%d", queries, mismatches)};
  });

  criterion("11", "reproducibility: byte-identical CSV across reruns and thread counts, 3 configs", 300, [] {
    std::vector<ExperimentConfig> cfgs;
    cfgs.push_back(query_config(4096, 6, kSqrt8, 1.5, 2.0, 0.25, 1000, {"uniform:0.25", "adaptive", "exact"}, 1100));
    auto two = query_config(4096, 6, kSqrt8, 1.5, 2.0, 0.25, 500, {}, 1110);
    two.suites = {"twosided"};
    two.delta1 = {0.3, 0.9};
    cfgs.push_back(two);
    auto conc = query_config(512, 9, 2.0, 1.5, 1.9, 0.1, 1, {"uniform:0.5", "twosided:0.8,0.1"}, 1120);
    conc.suites = {"concentration"};
    conc.graph_seeds = 50;
    cfgs.push_back(conc);
    int identical = 0;
    for (const auto& c : cfgs) {
      const auto a = to_csv(run_suite(c.suites[0], c, 1).table);
      const auto b = to_csv(run_suite(c.suites[0], c, 4).table);
      const auto again = to_csv(run_suite(c.suites[0], c, 1).table);
      identical += a == b && a == again;
    }
    return Outcome{identical == 3, fmt("identical configs=%d/3", identical)};
  });

  criterion("12", "comparisons ratio twosided(0.25,0)/twosided(1,0) = 0.25 +-30%", 600, [] {
    auto c = query_config(4096, 6, kSqrt8, 1.5, 2.0, 0.25, 2000, {}, 1200);
    c.suites = {"twosided"};
    c.delta1 = {0.25, 1.0};
    const auto rep = run_twosided_sweep(c, resolve_threads());
    std::vector<double> comps;
    for (const auto& row : rep.table.rows())
      if (row.text("regime") == "delta2_zero") comps.push_back(row.num("comparisons_mean"));
    const double ratio = comps.at(0) / comps.at(1);
    return Outcome{std::abs(ratio - 0.25) <= 0.3 * 0.25,
                   fmt("comparisons %.3f / %.3f = %.4f (allowed [0.175, 0.325])", comps[0], comps[1], ratio)};
  });

  std::printf("acceptance: %d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
