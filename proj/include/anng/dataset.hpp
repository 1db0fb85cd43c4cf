#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anng/errors.hpp"
#include "anng/geometry.hpp"
#include "anng/random.hpp"

namespace anng {

/// n unit vectors in R^d, stored row-major.
class Dataset {
 public:
  Dataset(DensityParams params, std::vector<double> coords) : params_(params), coords_(std::move(coords)) {
    const std::uint64_t d = params_.d();
    if (coords_.size() != params_.n() * d) throw ParameterError("Dataset: coordinate count does not equal n*d");
    for (std::uint64_t i = 0; i < params_.n(); ++i) {
      const auto p = point(i);
      double sq = 0.0;
      for (double c : p) {
        if (!std::isfinite(c)) throw ParameterError("Dataset: non-finite coordinate");
        sq += c * c;
      }
      if (std::fabs(std::sqrt(sq) - 1.0) > 1e-12) throw ParameterError("Dataset: point is not unit norm");
    }
  }

  /// n i.i.d. uniform points on S^{d-1}, a pure function of (params, seed).
  static Dataset generate(const DensityParams& params, std::uint64_t seed) {
    Rng rng = make_rng(seed, streams::kDataset);
    std::vector<double> coords;
    coords.reserve(params.n() * params.d());
    for (std::uint64_t i = 0; i < params.n(); ++i) {
      const UnitVector v = sample_unit_sphere(params.d(), rng);
      coords.insert(coords.end(), v.coords().begin(), v.coords().end());
    }
    return Dataset(params, std::move(coords));
  }

  const DensityParams& params() const noexcept { return params_; }
  std::uint64_t size() const noexcept { return params_.n(); }
  std::uint64_t dimension() const noexcept { return params_.d(); }

  std::span<const double> point(std::uint64_t i) const {
    return std::span<const double>(coords_).subspan(i * params_.d(), params_.d());
  }

  std::span<const double> coords() const noexcept { return coords_; }

 private:
  DensityParams params_;
  std::vector<double> coords_;
};

}  // namespace anng
