#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "anng/errors.hpp"
#include "anng/geometry.hpp"

namespace anng {

namespace models {
/// Every pair above the threshold is an edge.
struct Exact {
  friend bool operator==(const Exact&, const Exact&) = default;
};
/// Pairs above the threshold survive with probability delta.
struct Uniform {
  double delta;
  friend bool operator==(const Uniform&, const Uniform&) = default;
};
/// Pairs above the threshold survive with probability 1 - theta/pi.
struct Adaptive {
  friend bool operator==(const Adaptive&, const Adaptive&) = default;
};
/// Pairs above the threshold survive with delta1, all others with delta2.
struct TwoSided {
  double delta1;
  double delta2;
  friend bool operator==(const TwoSided&, const TwoSided&) = default;
};
}  // namespace models

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view token, std::string_view context) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, v);
  if (token.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    std::ostringstream os;
    os << context << ": cannot parse '" << token << "' as a real number";
    throw ParameterError(os.str());
  }
  return v;
}

}  // namespace detail

/// Edge-retention rule applied on top of the alpha_tau threshold.
class EdgeModel {
 public:
  using Variant = std::variant<models::Exact, models::Uniform, models::Adaptive, models::TwoSided>;

  static constexpr std::string_view kGrammar = "exact | uniform:DELTA | adaptive | twosided:DELTA1,DELTA2";

  EdgeModel(Variant rule, double tau) : rule_(rule), tau_(tau) {
    if (!(tau_ > 1.0) || !std::isfinite(tau_)) throw ParameterError("EdgeModel: tau must be > 1");
    auto check_prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "EdgeModel: " << name << " must lie in [0, 1] (got " << p << ")";
        throw ParameterError(os.str());
      }
    };
    if (const auto* u = std::get_if<models::Uniform>(&rule_)) check_prob(u->delta, "delta");
    if (const auto* t = std::get_if<models::TwoSided>(&rule_)) {
      check_prob(t->delta1, "delta1");
      check_prob(t->delta2, "delta2");
      if (!(t->delta1 > t->delta2)) {
        std::ostringstream os;
        os << "EdgeModel: two-sided model needs delta1 > delta2 (got delta1=" << t->delta1
           << ", delta2=" << t->delta2 << ")";
        throw ParameterError(os.str());
      }
    }
  }

  /// Parses the textual form, e.g. "uniform:0.5" or "twosided:0.8,0.1".
  static EdgeModel parse(std::string_view text, double tau) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    auto fail = [&](std::string_view token) -> EdgeModel {
      std::ostringstream os;
      os << "model: unexpected '" << token << "' in '" << text << "'; expected " << kGrammar;
      throw ParameterError(os.str());
    };
    if (head == "exact" || head == "adaptive") {
      if (colon != std::string_view::npos) return fail(text.substr(colon));
      return head == "exact" ? EdgeModel(models::Exact{}, tau) : EdgeModel(models::Adaptive{}, tau);
    }
    auto real = [&](std::string_view token) {
      try {
        return detail::parse_real(token, "model");
      } catch (const ParameterError&) {
        fail(token);
        return 0.0;
      }
    };
    if (head == "uniform") {
      if (colon == std::string_view::npos) return fail(text);
      return EdgeModel(models::Uniform{real(args)}, tau);
    }
    if (head == "twosided") {
      const auto comma = args.find(',');
      if (colon == std::string_view::npos || comma == std::string_view::npos) return fail(text);
      return EdgeModel(models::TwoSided{real(args.substr(0, comma)), real(args.substr(comma + 1))}, tau);
    }
    return fail(head);
  }

  const Variant& rule() const noexcept { return rule_; }
  double tau() const noexcept { return tau_; }

  std::string label() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, models::Exact>) return "exact";
          else if constexpr (std::is_same_v<M, models::Adaptive>) return "adaptive";
          else if constexpr (std::is_same_v<M, models::Uniform>) return "uniform:" + detail::format_real(m.delta);
          else return "twosided:" + detail::format_real(m.delta1) + "," + detail::format_real(m.delta2);
        },
        rule_);
  }

  /// File-format tag and parameters.
  std::uint8_t tag() const noexcept { return static_cast<std::uint8_t>(rule_.index()); }

  std::vector<double> parameters() const {
    if (const auto* u = std::get_if<models::Uniform>(&rule_)) return {u->delta};
    if (const auto* t = std::get_if<models::TwoSided>(&rule_)) return {t->delta1, t->delta2};
    return {};
  }

  static std::size_t parameter_count(std::uint8_t tag) {
    switch (tag) {
      case 1: return 1;
      case 3: return 2;
      default: return 0;
    }
  }

  static EdgeModel from_tag(std::uint8_t tag, const std::vector<double>& params, double tau) {
    switch (tag) {
      case 0: return EdgeModel(models::Exact{}, tau);
      case 1: return EdgeModel(models::Uniform{params.at(0)}, tau);
      case 2: return EdgeModel(models::Adaptive{}, tau);
      case 3: return EdgeModel(models::TwoSided{params.at(0), params.at(1)}, tau);
      default: throw ParameterError("EdgeModel: unknown model tag " + std::to_string(tag));
    }
  }

  /// Retention probability of the pair given its inner product.
  /// Threshold test is <p_i, p_j> >= alpha_tau, ties included.
  double retention(double inner, double alpha_tau) const {
    const bool close = inner >= alpha_tau;
    return std::visit(
        [&](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, models::Exact>) return close ? 1.0 : 0.0;
          else if constexpr (std::is_same_v<M, models::Uniform>) return close ? m.delta : 0.0;
          else if constexpr (std::is_same_v<M, models::Adaptive>)
            return close ? 1.0 - std::acos(std::clamp(inner, -1.0, 1.0)) / std::numbers::pi : 0.0;
          else return close ? m.delta1 : m.delta2;
        },
        rule_);
  }

  /// The delta entering the failure bounds: 1 for exact, delta1 for two-sided,
  /// and 1 - arccos(alpha_tau)/pi (the smallest head probability in the cap) for adaptive.
  double effective_delta(double alpha_tau) const {
    return std::visit(
        [&](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, models::Exact>) return 1.0;
          else if constexpr (std::is_same_v<M, models::Uniform>) return m.delta;
          else if constexpr (std::is_same_v<M, models::Adaptive>)
            return 1.0 - std::acos(std::clamp(alpha_tau, -1.0, 1.0)) / std::numbers::pi;
          else return m.delta1;
        },
        rule_);
  }

  /// Probability that i -> j is an edge when p_j is uniform on the sphere.
  double marginal_edge_probability(double alpha_tau, std::size_t d) const;

  friend bool operator==(const EdgeModel&, const EdgeModel&) = default;

 private:
  Variant rule_;
  double tau_;
};

namespace detail {

// Pr[theta <= cap angle] weighted by (1 - theta/pi), theta having density
// proportional to sin^{d-2}(theta) on [0, pi]. Composite Simpson.
inline double adaptive_cap_mass(double alpha_tau, std::size_t d) {
  const double cap_angle = std::acos(std::clamp(alpha_tau, -1.0, 1.0));
  const double k = static_cast<double>(d) - 2.0;
  auto density = [k](double t) { return k == 0.0 ? 1.0 : std::pow(std::sin(t), k); };
  constexpr int kIntervals = 20000;
  auto simpson = [&](double hi, auto weight) {
    const double h = hi / kIntervals;
    double acc = weight(0.0) * density(0.0) + weight(hi) * density(hi);
    for (int i = 1; i < kIntervals; ++i) {
      const double t = i * h;
      acc += (i % 2 == 1 ? 4.0 : 2.0) * weight(t) * density(t);
    }
    return acc * h / 3.0;
  };
  const double num = simpson(cap_angle, [](double t) { return 1.0 - t / std::numbers::pi; });
  const double den = simpson(std::numbers::pi, [](double) { return 1.0; });
  return num / den;
}

}  // namespace detail

inline double EdgeModel::marginal_edge_probability(double alpha_tau, std::size_t d) const {
  const double vol = alpha_tau >= 0.0 ? cap_volume_exact(CapSpec(std::min(alpha_tau, 1.0), d))
                                      : 1.0 - cap_volume_exact(CapSpec(std::min(-alpha_tau, 1.0), d));
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, models::Exact>) return vol;
        else if constexpr (std::is_same_v<M, models::Uniform>) return m.delta * vol;
        else if constexpr (std::is_same_v<M, models::Adaptive>) return detail::adaptive_cap_mass(alpha_tau, d);
        else return m.delta2 + (m.delta1 - m.delta2) * vol;
      },
      rule_);
}

/// Retention probability for a pair at angle theta_ij.
inline double edge_probability(const EdgeModel& model, double theta_ij, double alpha_tau) {
  if (!(theta_ij >= 0.0 && theta_ij <= std::numbers::pi))
    throw ParameterError("edge_probability: theta must lie in [0, pi]");
  if (!(alpha_tau >= 0.0 && alpha_tau <= 1.0))
    throw ParameterError("edge_probability: alpha_tau must lie in [0, 1]");
  return model.retention(std::cos(theta_ij), alpha_tau);
}

}  // namespace anng
