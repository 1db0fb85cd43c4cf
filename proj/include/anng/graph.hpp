#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <vector>

#include "anng/dataset.hpp"
#include "anng/edge_model.hpp"
#include "anng/errors.hpp"
#include "anng/geometry.hpp"
#include "anng/parallel.hpp"
#include "anng/random.hpp"

namespace anng {

using VertexId = std::uint32_t;

/// Directed near-neighbor graph in CSR form. Immutable once built.
class NeighborGraph {
 public:
  NeighborGraph(std::uint64_t dimension, EdgeModel model, std::uint64_t seed, std::vector<std::uint64_t> offsets,
                std::vector<VertexId> targets)
      : dimension_(dimension), model_(model), seed_(seed), offsets_(std::move(offsets)), targets_(std::move(targets)) {
    validate();
  }

  std::uint64_t size() const noexcept { return offsets_.size() - 1; }
  std::uint64_t dimension() const noexcept { return dimension_; }
  const EdgeModel& model() const noexcept { return model_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t edge_count() const noexcept { return targets_.size(); }

  /// Out-neighbors of p, ascending.
  std::span<const VertexId> neighbors(std::uint64_t p) const {
    if (p >= size()) {
      std::ostringstream os;
      os << "neighbors: vertex " << p << " out of range [0, " << size() << ")";
      throw std::out_of_range(os.str());
    }
    return std::span<const VertexId>(targets_).subspan(offsets_[p], offsets_[p + 1] - offsets_[p]);
  }

  std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
  std::span<const VertexId> targets() const noexcept { return targets_; }

  friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

 private:
  void validate() const {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != targets_.size())
      throw InvariantViolation("NeighborGraph: offsets do not frame the target array");
    const std::uint64_t n = size();
    for (std::uint64_t p = 0; p < n; ++p) {
      if (offsets_[p] > offsets_[p + 1]) throw InvariantViolation("NeighborGraph: offsets not monotone");
      for (std::uint64_t e = offsets_[p]; e < offsets_[p + 1]; ++e) {
        if (targets_[e] >= n) throw InvariantViolation("NeighborGraph: target out of range");
        if (targets_[e] == p) throw InvariantViolation("NeighborGraph: self-loop");
        if (e > offsets_[p] && targets_[e - 1] >= targets_[e])
          throw InvariantViolation("NeighborGraph: adjacency not sorted/unique");
      }
    }
  }

  std::uint64_t dimension_;
  EdgeModel model_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> offsets_;
  std::vector<VertexId> targets_;
};

/// alpha_tau for a model over a dataset.
inline double threshold_for(const EdgeModel& model, const DensityParams& params) {
  return alpha_fn(model.tau(), params.omega());
}

/// Out-neighbors of vertex i: j != i with coin_flip(seed, i, j) < retention(<p_i, p_j>).
inline std::vector<VertexId> build_row(const Dataset& data, const EdgeModel& model, std::uint64_t seed,
                                       std::uint64_t i, double alpha_tau) {
  std::vector<VertexId> row;
  const auto pi = data.point(i);
  for (std::uint64_t j = 0; j < data.size(); ++j) {
    if (j == i) continue;
    const double prob = model.retention(dot(pi, data.point(j)), alpha_tau);
    if (prob <= 0.0) continue;
    if (coin_flip(seed, i, j) < prob) row.push_back(static_cast<VertexId>(j));
  }
  return row;
}

inline std::vector<VertexId> build_row(const Dataset& data, const EdgeModel& model, std::uint64_t seed,
                                       std::uint64_t i) {
  return build_row(data, model, seed, i, threshold_for(model, data.params()));
}

/// Brute-force O(n^2 d) construction. Deterministic in (data, model, seed) for any thread count.
inline NeighborGraph build_graph(const Dataset& data, const EdgeModel& model, std::uint64_t seed,
                                 unsigned threads = 1) {
  if (data.size() > std::uint64_t{0xFFFFFFFFu}) throw ParameterError("build_graph: n exceeds 32-bit vertex ids");
  const double alpha_tau = threshold_for(model, data.params());
  std::vector<std::vector<VertexId>> rows(data.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) { rows[i] = build_row(data, model, seed, i, alpha_tau); });

  std::vector<std::uint64_t> offsets(rows.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) offsets[i + 1] = offsets[i] + rows[i].size();
  std::vector<VertexId> targets;
  targets.reserve(offsets.back());
  for (auto& row : rows) targets.insert(targets.end(), row.begin(), row.end());
  return NeighborGraph(data.dimension(), model, seed, std::move(offsets), std::move(targets));
}

/// The oracle: stored out-neighbor list of p.
inline std::span<const VertexId> neighbors(const NeighborGraph& graph, std::uint64_t p) { return graph.neighbors(p); }

struct DegreeStats {
  double mean = 0.0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double variance = 0.0;  // population variance over vertices
  std::uint64_t edge_count = 0;

  friend bool operator==(const DegreeStats&, const DegreeStats&) = default;
};

inline DegreeStats degree_stats(const NeighborGraph& graph) {
  DegreeStats s;
  const std::uint64_t n = graph.size();
  s.edge_count = graph.edge_count();
  if (n == 0) return s;
  const auto off = graph.offsets();
  s.min = off[1] - off[0];
  for (std::uint64_t p = 0; p < n; ++p) {
    const std::uint64_t deg = off[p + 1] - off[p];
    s.min = std::min(s.min, deg);
    s.max = std::max(s.max, deg);
  }
  s.mean = static_cast<double>(s.edge_count) / static_cast<double>(n);
  double acc = 0.0;
  for (std::uint64_t p = 0; p < n; ++p) {
    const double dev = static_cast<double>(off[p + 1] - off[p]) - s.mean;
    acc += dev * dev;
  }
  s.variance = acc / static_cast<double>(n);
  return s;
}

}  // namespace anng
