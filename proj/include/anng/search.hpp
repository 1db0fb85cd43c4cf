#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <variant>
#include <vector>

#include "anng/dataset.hpp"
#include "anng/errors.hpp"
#include "anng/geometry.hpp"
#include "anng/graph.hpp"
#include "anng/random.hpp"

namespace anng {

/// A query and its target radius r (sine distance r * 2^-omega).
struct QuerySpec {
  UnitVector q;
  double r;
  std::optional<double> r0;
  std::optional<double> epsilon;

  void validate(const DensityParams& params) const {
    const double upper = params.scale();
    if (q.dimension() != params.d()) throw ParameterError("query: dimension mismatch with dataset");
    if (!(r > 1.0 && r < upper)) {
      std::ostringstream os;
      os << "query: r must lie in (1, 2^omega) = (1, " << upper << "), got r=" << r;
      throw ParameterError(os.str());
    }
    if (r0 && !(*r0 > r)) throw ParameterError("query: r0 must exceed r");
    if (epsilon && r0 && !(*epsilon > 0.0 && *epsilon < *r0 - r))
      throw ParameterError("query: epsilon must lie in (0, r0 - r)");
    if (epsilon && !r0 && !(*epsilon > 0.0)) throw ParameterError("query: epsilon must be positive");
  }
};

struct RandomStart {
  std::uint64_t seed;
};
struct FixedStart {
  std::uint64_t index;
};
using Start = std::variant<RandomStart, FixedStart>;

enum class QueryStatus { Success, FailNoProgress };

inline const char* to_string(QueryStatus s) { return s == QueryStatus::Success ? "Success" : "FailNoProgress"; }

struct GreedyOutcome {
  QueryStatus status = QueryStatus::FailNoProgress;
  std::uint64_t terminal = 0;
  std::uint64_t steps = 0;
  std::uint64_t comparisons = 0;
  std::vector<std::uint64_t> path;
  double sin_theta_terminal = 1.0;

  friend bool operator==(const GreedyOutcome&, const GreedyOutcome&) = default;
};

/// Result of one greedy step: the next vertex, or nullopt for fail.
struct StepResult {
  std::optional<std::uint64_t> next;
  std::uint64_t comparisons = 0;
};

/// sin(theta_{p,q}) <= radius with <p, q> > 0.
inline bool within_sine_radius(std::span<const double> p, std::span<const double> q, double radius) {
  return dot(p, q) > 0.0 && sine_distance(p, q) <= radius;
}

/// Moves to the neighbor with the largest inner product with q if it strictly
/// beats p; ties between neighbors go to the lowest index.
inline StepResult greedy_step(const NeighborGraph& graph, const Dataset& data, std::uint64_t p,
                              std::span<const double> q) {
  const auto nbrs = graph.neighbors(p);
  double best = dot(data.point(p), q);
  std::optional<std::uint64_t> next;
  for (VertexId j : nbrs) {
    const double v = dot(data.point(j), q);
    if (v > best) {
      best = v;
      next = j;
    }
  }
  return {next, nbrs.size()};
}

inline void check_compatible(const NeighborGraph& graph, const Dataset& data) {
  if (graph.size() != data.size() || graph.dimension() != data.dimension()) {
    std::ostringstream os;
    os << "dimension mismatch: graph (n=" << graph.size() << ", d=" << graph.dimension() << ") vs dataset (n="
       << data.size() << ", d=" << data.dimension() << ")";
    throw ParameterError(os.str());
  }
}

inline std::uint64_t resolve_start(const Start& start, std::uint64_t n) {
  if (const auto* fixed = std::get_if<FixedStart>(&start)) {
    if (fixed->index >= n) throw ParameterError("query: fixed start index out of range");
    return fixed->index;
  }
  Rng rng = make_rng(std::get<RandomStart>(start).seed, streams::kStart);
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

/// Greedy walk until the current vertex is within sine radius r * 2^-omega of q
/// (and on q's side), or until no neighbor improves <p, q>.
inline GreedyOutcome greedy_query(const NeighborGraph& graph, const Dataset& data, const QuerySpec& spec,
                                  const Start& start) {
  check_compatible(graph, data);
  spec.validate(data.params());
  const double radius = spec.r / data.params().scale();
  const auto q = spec.q.coords();

  GreedyOutcome out;
  std::uint64_t p = resolve_start(start, data.size());
  out.path.push_back(p);
  // Strict increase of <p, q> allows at most n - 1 moves.
  for (std::uint64_t iter = 0; iter <= data.size(); ++iter) {
    if (within_sine_radius(data.point(p), q, radius)) {
      out.status = QueryStatus::Success;
      break;
    }
    const StepResult step = greedy_step(graph, data, p, q);
    out.comparisons += step.comparisons;
    if (!step.next) {
      out.status = QueryStatus::FailNoProgress;
      break;
    }
    p = *step.next;
    out.path.push_back(p);
    ++out.steps;
    if (iter == data.size()) throw InvariantViolation("greedy_query: iteration cap n reached");
  }
  out.terminal = p;
  out.sin_theta_terminal = sine_distance(data.point(p), q);
  return out;
}

/// A unit vector at sine distance `sine` from p (angle below pi/2 for sine < 1),
/// in a uniformly random tangent direction.
template <class Urbg>
UnitVector place_at_sine(std::span<const double> p, double sine, Urbg& rng) {
  if (!(sine >= 0.0 && sine <= 1.0)) throw ParameterError("place_at_sine: sine must lie in [0, 1]");
  const std::size_t d = p.size();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> t(d);
  for (;;) {
    for (double& c : t) c = gauss(rng);
    const double along = dot(t, p);
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      t[k] -= along * p[k];
      sq += t[k] * t[k];
    }
    if (sq > 1e-20) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& c : t) c *= inv;
      break;
    }
  }
  const double cosine = std::sqrt((1.0 - sine) * (1.0 + sine));
  std::vector<double> q(d);
  for (std::size_t k = 0; k < d; ++k) q[k] = cosine * p[k] + sine * t[k];
  return UnitVector(std::move(q));
}

struct PlantedQuery {
  UnitVector q;
  std::uint64_t planted;
};

/// Query within sine distance u * r_target * 2^-omega of a uniformly chosen dataset point, u ~ U[0, 1).
template <class Urbg>
PlantedQuery plant_query(const Dataset& data, Urbg& rng, double r_target) {
  const double max_sine = r_target / data.params().scale();
  if (!(r_target >= 0.0) || max_sine > 1.0) {
    std::ostringstream os;
    os << "plant_query: r_target * 2^-omega = " << max_sine << " exceeds 1";
    throw ParameterError(os.str());
  }
  const std::uint64_t i = std::uniform_int_distribution<std::uint64_t>(0, data.size() - 1)(rng);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return {place_at_sine(data.point(i), u * max_sine, rng), i};
}

/// Brute-force scan for a warm start p0 with sin(theta_{p0,q}) <= r0 * 2^-omega
/// and <p0, q> > 0. Picks uniformly among candidates that do not already meet
/// the r target; falls back to all candidates if every one does.
template <class Urbg>
std::optional<std::uint64_t> find_warm_start(const Dataset& data, std::span<const double> q, double r0, double r,
                                             Urbg& rng) {
  const double outer = r0 / data.params().scale();
  const double inner = r / data.params().scale();
  std::vector<std::uint64_t> far;
  std::vector<std::uint64_t> all;
  for (std::uint64_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    if (!within_sine_radius(p, q, outer)) continue;
    all.push_back(i);
    if (!within_sine_radius(p, q, inner)) far.push_back(i);
  }
  const auto& pool = far.empty() ? all : far;
  if (pool.empty()) return std::nullopt;
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

}  // namespace anng
