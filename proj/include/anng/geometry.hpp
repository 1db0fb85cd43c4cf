#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "anng/errors.hpp"
#include "anng/incomplete_beta.hpp"

namespace anng {

/// A point of the unit sphere S^{d-1}, d >= 2. Construction normalizes.
class UnitVector {
 public:
  explicit UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw ParameterError("UnitVector: dimension must be at least 2");
    double sq = 0.0;
    for (double c : coords_) {
      if (!std::isfinite(c)) throw ParameterError("UnitVector: non-finite coordinate");
      sq += c * c;
    }
    if (!(sq > 0.0)) throw ParameterError("UnitVector: zero vector cannot be normalized");
    const double inv = 1.0 / std::sqrt(sq);
    for (double& c : coords_) c *= inv;
  }

  /// Standard basis vector e_k.
  static UnitVector basis(std::size_t d, std::size_t k) {
    std::vector<double> v(d, 0.0);
    v.at(k) = 1.0;
    return UnitVector(std::move(v));
  }

  std::size_t dimension() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t k) const { return coords_[k]; }

  UnitVector operator-() const {
    std::vector<double> v(coords_);
    for (double& c : v) c = -c;
    return UnitVector(std::move(v));
  }

  operator std::span<const double>() const noexcept { return coords_; }

 private:
  std::vector<double> coords_;
};

/// Size/dimension pair of a dataset and its density omega = log2(n) / d.
class DensityParams {
 public:
  /// Enforces the dense regime omega > 1.
  static DensityParams dense(std::uint64_t n, std::uint64_t d) {
    DensityParams p = from_counts(n, d);
    if (!(p.omega_ > 1.0)) {
      std::ostringstream os;
      os << "dataset is not dense: omega = log2(n)/d = log2(" << n << ")/" << d << " = " << p.omega_
         << ", need omega > 1";
      throw ParameterError(os.str());
    }
    return p;
  }

  /// Computes omega without the density requirement (i.i.d. experiments at omega <= 1).
  static DensityParams from_counts(std::uint64_t n, std::uint64_t d) {
    if (n < 2) throw ParameterError("DensityParams: need n >= 2");
    if (d < 2) throw ParameterError("DensityParams: need d >= 2");
    return DensityParams(n, d, std::log2(static_cast<double>(n)) / static_cast<double>(d));
  }

  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t d() const noexcept { return d_; }
  double omega() const noexcept { return omega_; }
  bool is_dense() const noexcept { return omega_ > 1.0; }
  /// 2^omega; sine radii in the library are expressed as multiples of 2^-omega.
  double scale() const noexcept { return std::exp2(omega_); }

  friend bool operator==(const DensityParams&, const DensityParams&) = default;

 private:
  DensityParams(std::uint64_t n, std::uint64_t d, double omega) : n_(n), d_(d), omega_(omega) {}

  std::uint64_t n_;
  std::uint64_t d_;
  double omega_;
};

/// Cap of height gamma on S^{d-1}; the center is irrelevant for its volume.
struct CapSpec {
  double gamma;
  std::size_t d;

  CapSpec(double gamma_, std::size_t d_) : gamma(gamma_), d(d_) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("CapSpec: gamma must lie in [0, 1]");
    if (d < 2) throw ParameterError("CapSpec: d must be at least 2");
  }
};

/// Intersection of caps of heights beta and gamma whose centers are theta apart.
struct WedgeSpec {
  double beta;
  double gamma;
  double theta;

  WedgeSpec(double beta_, double gamma_, double theta_) : beta(beta_), gamma(gamma_), theta(theta_) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("WedgeSpec: beta must lie in [0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("WedgeSpec: gamma must lie in [0, 1]");
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ParameterError("WedgeSpec: theta must lie in [0, pi]");
  }
};

/// Monte Carlo estimate of a probability.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;

  static Estimate from_counts(std::uint64_t hits, std::uint64_t samples) {
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples};
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Angle in [0, pi]; the inner product is clamped into [-1, 1] first.
inline double angle(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("angle: dimension mismatch");
  return std::acos(std::clamp(dot(x, y), -1.0, 1.0));
}

/// sin(theta_{p,q}) for unit p, q, computed as the length of q's component
/// orthogonal to p. Accurate near 0, where sin(acos(<p,q>)) is not.
inline double sine_distance(std::span<const double> p, std::span<const double> q) {
  const double c = dot(p, q);
  double sq = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double r = q[k] - c * p[k];
    sq += r * r;
  }
  return std::min(1.0, std::sqrt(sq));
}

/// Uniform sample from S^{d-1} via normalized Gaussian coordinates.
template <class Urbg>
UnitVector sample_unit_sphere(std::size_t d, Urbg& rng) {
  if (d < 2) throw ParameterError("sample_unit_sphere: d must be at least 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(d);
  for (;;) {
    double sq = 0.0;
    for (double& c : v) {
      c = gauss(rng);
      sq += c * c;
    }
    if (sq > 1e-300) return UnitVector(std::move(v));
  }
}

/// alpha_x = sqrt(1 - x^2 * 2^{-2 omega}): the inner-product threshold at sine radius x * 2^-omega.
inline double alpha_fn(double x, double omega) {
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << "alpha_fn: x must be nonnegative (x=" << x << ", omega=" << omega << ")";
    throw DomainError(os.str());
  }
  const double radicand = 1.0 - x * x * std::exp2(-2.0 * omega);
  if (radicand < 0.0) {
    std::ostringstream os;
    os << "alpha_fn: negative radicand 1 - x^2 * 2^(-2 omega) = " << radicand << " at x=" << x
       << ", omega=" << omega << " (need x <= 2^omega = " << std::exp2(omega) << ")";
    throw DomainError(os.str());
  }
  return std::sqrt(radicand);
}

/// c_lb * d^{-1/2} * (1 - gamma^2)^{d/2}.
inline double cap_volume_lower_bound(const CapSpec& spec, double c_lb) {
  if (!(c_lb > 0.0)) throw ParameterError("cap_volume_lower_bound: c_lb must be positive");
  const double d = static_cast<double>(spec.d);
  return c_lb * std::pow(d, -0.5) * std::pow(1.0 - spec.gamma * spec.gamma, d / 2.0);
}

/// Exact relative volume of a cap of height gamma on S^{d-1}:
/// (1/2) I_{1-gamma^2}((d-1)/2, 1/2); arccos(gamma)/pi on the circle.
inline double cap_volume_exact(const CapSpec& spec) {
  if (spec.gamma == 0.0) return 0.5;
  if (spec.gamma == 1.0) return 0.0;
  if (spec.d == 2) return std::acos(spec.gamma) / std::numbers::pi;
  const double a = (static_cast<double>(spec.d) - 1.0) / 2.0;
  const double x = (1.0 - spec.gamma) * (1.0 + spec.gamma);
  return 0.5 * regularized_incomplete_beta(a, 0.5, x);
}

/// Largest c with cap_volume_exact >= c_lb-bound on the given heights (gamma < 1 only).
inline double calibrate_cap_constant(std::size_t d, std::span<const double> gammas) {
  double best = std::numeric_limits<double>::infinity();
  for (double g : gammas) {
    if (g >= 1.0) continue;
    const CapSpec spec(g, d);
    best = std::min(best, cap_volume_exact(spec) / cap_volume_lower_bound(spec, 1.0));
  }
  return best;
}

/// Fraction of uniform samples y with <e_1, y> >= gamma.
template <class Urbg>
Estimate cap_volume_mc(const CapSpec& spec, std::uint64_t samples, Urbg& rng) {
  if (samples < 1) throw ParameterError("cap_volume_mc: samples must be at least 1");
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const UnitVector y = sample_unit_sphere(spec.d, rng);
    if (y[0] >= spec.gamma) ++hits;
  }
  return Estimate::from_counts(hits, samples);
}

/// Fraction of uniform samples in C_x(beta) and C_y(gamma), x = e_1, y = cos(theta) e_1 + sin(theta) e_2.
template <class Urbg>
Estimate wedge_volume_mc(const WedgeSpec& spec, std::size_t d, std::uint64_t samples, Urbg& rng) {
  if (samples < 1) throw ParameterError("wedge_volume_mc: samples must be at least 1");
  if (d < 2) throw ParameterError("wedge_volume_mc: d must be at least 2");
  const double ct = std::cos(spec.theta);
  const double st = std::sin(spec.theta);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const UnitVector v = sample_unit_sphere(d, rng);
    if (v[0] >= spec.beta && ct * v[0] + st * v[1] >= spec.gamma) ++hits;
  }
  return Estimate::from_counts(hits, samples);
}

/// Lower bound s^d / (n sqrt(d)) on Vol_w(alpha_tau, alpha_s, arcsin((s + eps) 2^-omega)).
inline double wedge_lb(double tau, double s, double eps, const DensityParams& params) {
  if (!(s > 1.0)) {
    std::ostringstream os;
    os << "wedge_lb: precondition s > 1 failed (s=" << s << ")";
    throw ParameterError(os.str());
  }
  if (!(eps > 0.0)) {
    std::ostringstream os;
    os << "wedge_lb: precondition eps > 0 failed (eps=" << eps << ")";
    throw ParameterError(os.str());
  }
  const double need = std::numbers::sqrt2 * (s + eps);
  if (!(tau >= need)) {
    std::ostringstream os;
    os << "wedge_lb: precondition tau >= sqrt(2)*(s+eps) failed (tau=" << tau << " < " << need << ")";
    throw ParameterError(os.str());
  }
  const double d = static_cast<double>(params.d());
  return std::pow(s, d) / (static_cast<double>(params.n()) * std::sqrt(d));
}

}  // namespace anng
