#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "reconbound/metric_space.hpp"

namespace reconbound::divergence {

/// Inputs to the divergence upper bounds. `eps` is either the DP epsilon
/// (with rho = 1 for Hamming neighbours) or the metric-DP eps_L.
struct DivergenceBoundInput {
  double eps = 0.0;
  double rho = 1.0;
  std::optional<double> alpha;
  std::size_t n = 1;

  void validate() const;
};

struct KlBound {
  double value;   ///< t * tanh(t / 2), t = eps * rho
  double approx;  ///< min{t, t^2 / 2}
};

KlBound kl_bound(const DivergenceBoundInput& input);

/// min{t, 3 alpha t^2 / 2}, t = eps * rho. Throws missing_alpha.
double renyi_bound(const DivergenceBoundInput& input);

enum class Family { Laplace, Gaussian };

/// Two members of a location family sharing one scale.
struct AnalyticPair {
  Family family;
  double loc1;
  double loc2;
  double scale;

  void validate() const;
  double log_density_first(double x) const;
  double log_density_second(double x) const;
  /// Integration support: both locations padded by 40 scales.
  metric::Interval support() const;
};

double analytic_kl(const AnalyticPair& pair);

/// Gaussian only: alpha * delta^2 / (2 scale^2). Throws unsupported_family
/// for Laplace.
double analytic_renyi(const AnalyticPair& pair, double alpha);

using LogDensity = std::function<double(double)>;

inline constexpr double kQuadratureTolerance = 1e-8;

/// Integral of p ln(p/q) over `support` by adaptive quadrature.
double numeric_kl(const LogDensity& p, const LogDensity& q,
                  metric::Interval support,
                  std::span<const double> breakpoints = {},
                  double abs_tol = kQuadratureTolerance);
double numeric_kl(const AnalyticPair& pair);

/// (1 / (alpha - 1)) ln of the integral of p^alpha q^(1 - alpha).
double numeric_renyi(const LogDensity& p, const LogDensity& q, double alpha,
                     metric::Interval support,
                     std::span<const double> breakpoints = {},
                     double abs_tol = kQuadratureTolerance);
double numeric_renyi(const AnalyticPair& pair, double alpha);

/// Half the integral of |p - q|.
double numeric_tv(const LogDensity& p, const LogDensity& q,
                  metric::Interval support,
                  std::span<const double> breakpoints = {},
                  double abs_tol = kQuadratureTolerance);
double numeric_tv(const AnalyticPair& pair);

/// Bretagnolle-Huber: TV <= 1 - exp(-kl) / 2.
double bh_tv_bound(double kl);

/// KL of n-fold products of the same pair.
double tensorized_kl(double kl_single, std::size_t n);

}  // namespace reconbound::divergence
