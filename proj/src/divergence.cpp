#include "reconbound/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "reconbound/error.hpp"
#include "reconbound/quadrature.hpp"

namespace reconbound::divergence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double product(const DivergenceBoundInput& input) {
  input.validate();
  return input.eps * input.rho;
}

std::vector<double> pair_breakpoints(const AnalyticPair& pair) {
  return {pair.loc1, pair.loc2};
}

}  // namespace

void DivergenceBoundInput::validate() const {
  require(eps >= 0.0, ErrorCode::invalid_argument, "eps must be >= 0");
  require(rho >= 0.0, ErrorCode::invalid_argument, "rho must be >= 0");
  require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  if (alpha) {
    require(*alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  }
}

KlBound kl_bound(const DivergenceBoundInput& input) {
  const double t = product(input);
  if (t == kInf) return {kInf, kInf};
  return {t * std::tanh(0.5 * t), std::min(t, 0.5 * t * t)};
}

double renyi_bound(const DivergenceBoundInput& input) {
  const double t = product(input);
  require(input.alpha.has_value(), ErrorCode::missing_alpha,
          "renyi_bound needs alpha");
  return std::min(t, 1.5 * *input.alpha * t * t);
}

void AnalyticPair::validate() const {
  require(scale > 0.0 && std::isfinite(scale), ErrorCode::invalid_argument,
          "scale must be positive");
  require(std::isfinite(loc1) && std::isfinite(loc2),
          ErrorCode::invalid_argument, "locations must be finite");
}

static double log_density(Family family, double loc, double scale, double x) {
  switch (family) {
    case Family::Laplace:
      return -std::log(2.0 * scale) - std::abs(x - loc) / scale;
    case Family::Gaussian: {
      const double z = (x - loc) / scale;
      return -0.5 * z * z - std::log(scale) -
             0.5 * std::log(2.0 * std::numbers::pi);
    }
  }
  return 0.0;
}

double AnalyticPair::log_density_first(double x) const {
  return log_density(family, loc1, scale, x);
}

double AnalyticPair::log_density_second(double x) const {
  return log_density(family, loc2, scale, x);
}

metric::Interval AnalyticPair::support() const {
  return {std::min(loc1, loc2) - 40.0 * scale,
          std::max(loc1, loc2) + 40.0 * scale};
}

double analytic_kl(const AnalyticPair& pair) {
  pair.validate();
  const double delta = pair.loc1 - pair.loc2;
  switch (pair.family) {
    case Family::Laplace: {
      const double r = std::abs(delta) / pair.scale;
      // r + e^{-r} - 1 without cancellation for small r.
      return r + std::expm1(-r);
    }
    case Family::Gaussian:
      return delta * delta / (2.0 * pair.scale * pair.scale);
  }
  return 0.0;
}

double analytic_renyi(const AnalyticPair& pair, double alpha) {
  pair.validate();
  require(alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  require(pair.family == Family::Gaussian, ErrorCode::unsupported_family,
          "closed-form Renyi divergence is only provided for Gaussians");
  const double delta = pair.loc1 - pair.loc2;
  return alpha * delta * delta / (2.0 * pair.scale * pair.scale);
}

double numeric_kl(const LogDensity& p, const LogDensity& q,
                  metric::Interval support, std::span<const double> breakpoints,
                  double abs_tol) {
  const auto integrand = [&](double x) {
    const double lp = p(x);
    if (lp == -kInf) return 0.0;
    const double lq = q(x);
    require(lq > -kInf, ErrorCode::invalid_argument,
            "q must be positive wherever p is");
    return std::exp(lp) * (lp - lq);
  };
  const QuadratureResult r =
      integrate(integrand, support.lo, support.hi, abs_tol, breakpoints);
  return std::max(0.0, r.value);
}

double numeric_kl(const AnalyticPair& pair) {
  pair.validate();
  const std::vector<double> cuts = pair_breakpoints(pair);
  return numeric_kl([&](double x) { return pair.log_density_first(x); },
                    [&](double x) { return pair.log_density_second(x); },
                    pair.support(), cuts);
}

double numeric_renyi(const LogDensity& p, const LogDensity& q, double alpha,
                     metric::Interval support,
                     std::span<const double> breakpoints, double abs_tol) {
  require(alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  const auto integrand = [&](double x) {
    const double lp = p(x);
    if (lp == -kInf) return 0.0;
    return std::exp(alpha * lp + (1.0 - alpha) * q(x));
  };
  const QuadratureResult r =
      integrate(integrand, support.lo, support.hi, abs_tol, breakpoints);
  return std::max(0.0, std::log(r.value) / (alpha - 1.0));
}

double numeric_renyi(const AnalyticPair& pair, double alpha) {
  pair.validate();
  const std::vector<double> cuts = pair_breakpoints(pair);
  return numeric_renyi([&](double x) { return pair.log_density_first(x); },
                       [&](double x) { return pair.log_density_second(x); },
                       alpha, pair.support(), cuts);
}

double numeric_tv(const LogDensity& p, const LogDensity& q,
                  metric::Interval support, std::span<const double> breakpoints,
                  double abs_tol) {
  const auto integrand = [&](double x) {
    return 0.5 * std::abs(std::exp(p(x)) - std::exp(q(x)));
  };
  return integrate(integrand, support.lo, support.hi, abs_tol, breakpoints)
      .value;
}

double numeric_tv(const AnalyticPair& pair) {
  pair.validate();
  // |p - q| also kinks where the densities cross, at the midpoint.
  std::vector<double> cuts = pair_breakpoints(pair);
  cuts.push_back(0.5 * (pair.loc1 + pair.loc2));
  return numeric_tv([&](double x) { return pair.log_density_first(x); },
                    [&](double x) { return pair.log_density_second(x); },
                    pair.support(), cuts);
}

double bh_tv_bound(double kl) {
  require(kl >= 0.0, ErrorCode::invalid_argument, "kl must be >= 0");
  return 1.0 - 0.5 * std::exp(-kl);
}

double tensorized_kl(double kl_single, std::size_t n) {
  require(kl_single >= 0.0, ErrorCode::invalid_argument, "kl must be >= 0");
  require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  return static_cast<double>(n) * kl_single;
}

}  // namespace reconbound::divergence
