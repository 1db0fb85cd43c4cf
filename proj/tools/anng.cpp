// anng: dataset generation, graph construction, single queries and experiment sweeps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anng/anng.hpp"

namespace {

std::string join_argv(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

anng::Start parse_start(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string value = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size() ||
      (kind != "random" && kind != "fixed"))
    throw anng::ParameterError("--start: expected random:SEED or fixed:IDX, got '" + text + "'");
  if (kind == "random") return anng::RandomStart{v};
  return anng::FixedStart{v};
}

anng::UnitVector read_query_file(const std::string& path, std::uint64_t d) {
  std::ifstream in(path);
  if (!in) throw anng::FormatError(anng::FormatError::Kind::Io, "cannot open query file '" + path + "'");
  std::vector<double> coords;
  std::string token;
  while (in >> token) coords.push_back(anng::detail::parse_real(token, "query file"));
  if (coords.size() != d) {
    std::ostringstream os;
    os << "query file: expected " << d << " coordinates, got " << coords.size();
    throw anng::ParameterError(os.str());
  }
  return anng::UnitVector(std::move(coords));
}

int cmd_gen_dataset(std::uint64_t n, std::uint64_t d, std::uint64_t seed, const std::string& out) {
  const auto params = anng::DensityParams::dense(n, d);
  const auto data = anng::Dataset::generate(params, seed);
  anng::write_dataset(data, out);
  std::printf("n=%llu d=%llu omega=%.17g\n", static_cast<unsigned long long>(n), static_cast<unsigned long long>(d),
              params.omega());
  return 0;
}

int cmd_build_graph(const std::string& dataset, double tau, const std::string& model_text, std::uint64_t seed,
                    const std::string& out, unsigned threads) {
  const auto data = anng::read_dataset(dataset);
  const auto model = anng::EdgeModel::parse(model_text, tau);
  const auto graph = anng::build_graph(data, model, seed, threads);
  anng::serialize(graph, out);
  const auto stats = anng::degree_stats(graph);
  const double n = static_cast<double>(data.size());
  const double alpha = anng::threshold_for(model, data.params());
  const double b = model.marginal_edge_probability(alpha, data.dimension());
  const double pred_edges = n * (n - 1.0) * b;
  const double sd = anng::predict::binomial_sd(n * (n - 1.0), b);
  std::printf("model=%s\n", model.label().c_str());
  std::printf("alpha_tau=%.17g\n", alpha);
  std::printf("edge_count=%llu\n", static_cast<unsigned long long>(stats.edge_count));
  std::printf("degree_mean=%.17g\n", stats.mean);
  std::printf("pred_degree_mean=%.17g\n", (n - 1.0) * b);
  std::printf("pred_edges=%.17g\n", pred_edges);
  std::printf("edges_chebyshev_band=[%.17g, %.17g] (holds with probability >= %.6g)\n", 0.5 * pred_edges,
              1.5 * pred_edges, 1.0 - anng::predict::chebyshev(pred_edges));
  std::printf("edges_binom_4sd_band=[%.17g, %.17g]\n", pred_edges - 4.0 * sd, pred_edges + 4.0 * sd);
  return 0;
}

int cmd_query(const std::string& dataset, const std::string& graph_path, double r, const std::optional<std::uint64_t>& plant,
              const std::string& qfile, const std::string& start_text) {
  const auto data = anng::read_dataset(dataset);
  const auto graph = anng::deserialize_graph(graph_path);
  anng::check_compatible(graph, data);
  const anng::Start start = parse_start(start_text);
  if (plant.has_value() == !qfile.empty()) throw anng::ParameterError("query: give exactly one of --plant or --qfile");
  std::optional<anng::UnitVector> q;
  nlohmann::json j;
  if (plant) {
    const anng::QuerySpec probe{anng::UnitVector::basis(data.dimension(), 0), r, std::nullopt, std::nullopt};
    probe.validate(data.params());
    anng::Rng rng = anng::make_rng(*plant, anng::streams::kQuery);
    auto pq = anng::plant_query(data, rng, r);
    j["planted"] = pq.planted;
    q = std::move(pq.q);
  } else {
    q = read_query_file(qfile, data.dimension());
  }
  const anng::QuerySpec spec{*q, r, std::nullopt, std::nullopt};
  const auto outcome = anng::greedy_query(graph, data, spec, start);
  j["status"] = anng::to_string(outcome.status);
  j["terminal"] = outcome.terminal;
  j["steps"] = outcome.steps;
  j["comparisons"] = outcome.comparisons;
  j["sin_theta_terminal"] = outcome.sin_theta_terminal;
  j["path"] = outcome.path;
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out, unsigned threads,
                   const std::string& command_line) {
  const auto bytes = anng::read_file(config_path);
  const auto cfg = anng::parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  for (const auto& suite : cfg.suites) std::fprintf(stderr, "[anng] suite %s\n", suite.c_str());
  const auto artifacts = anng::run_experiment(cfg, out, threads, command_line);
  for (const auto& a : artifacts)
    std::printf("%s crc32=%08x bytes=%llu\n", a.path.string().c_str(), a.crc32,
                static_cast<unsigned long long>(a.bytes));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate near-neighbor graphs on the unit sphere"};
  app.require_subcommand(1);
  unsigned threads_flag = 0;

  std::uint64_t n = 0, d = 0, seed = 0;
  std::string out;
  auto* gen = app.add_subcommand("gen-dataset", "Sample n uniform points on S^(d-1) (requires log2(n)/d > 1)");
  gen->add_option("--n", n, "number of points")->required();
  gen->add_option("--d", d, "dimension")->required();
  gen->add_option("--seed", seed, "dataset seed")->required();
  gen->add_option("--out", out, "output dataset file (ANND)")->required();

  std::string dataset, model_text, graph_path;
  double tau = 0.0;
  auto* build = app.add_subcommand("build-graph", "Build a near-neighbor graph over a dataset");
  build->add_option("--dataset", dataset, "dataset file (ANND)")->required();
  build->add_option("--tau", tau, "scale tau > 1")->required();
  build->add_option("--model", model_text, std::string("edge model: ") + std::string(anng::EdgeModel::kGrammar))
      ->required();
  build->add_option("--seed", seed, "graph (coin) seed")->required();
  build->add_option("--out", out, "output graph file (ANNG)")->required();
  build->add_option("--threads", threads_flag, "worker threads (default: ANNG_THREADS or all cores)");

  double r = 0.0;
  std::optional<std::uint64_t> plant;
  std::string qfile, start_text = "random:0";
  auto* query = app.add_subcommand("query", "Run one greedy query; prints the outcome as JSON");
  query->add_option("--dataset", dataset, "dataset file (ANND)")->required();
  query->add_option("--graph", graph_path, "graph file (ANNG)")->required();
  query->add_option("--r", r, "target radius r in (1, 2^omega)")->required();
  query->add_option("--plant", plant, "plant the query near a random point using this seed");
  query->add_option("--qfile", qfile, "file with d whitespace-separated query coordinates");
  query->add_option("--start", start_text, "random:SEED or fixed:IDX");

  std::string config_path;
  auto* exp = app.add_subcommand("experiment", "Run the suites of a config file; writes CSV, JSON and manifest");
  exp->add_option("--config", config_path, "config file (key = value lines)")->required();
  exp->add_option("--out", out, "output directory")->required();
  exp->add_option("--threads", threads_flag, "worker threads (default: ANNG_THREADS or all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_dataset(n, d, seed, out);
    if (*build) return cmd_build_graph(dataset, tau, model_text, seed, out, anng::resolve_threads(threads_flag));
    if (*query) return cmd_query(dataset, graph_path, r, plant, qfile, start_text);
    if (*exp) return cmd_experiment(config_path, out, anng::resolve_threads(threads_flag), join_argv(argc, argv));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
