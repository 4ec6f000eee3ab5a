#include "reconbound/pnsgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reconbound/error.hpp"

namespace reconbound::pnsgd {

namespace {

void check_position(std::size_t n, std::size_t t) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  require(t >= 1 && t <= n, ErrorCode::invalid_argument,
          "position t must lie in [1, n]");
}

}  // namespace

void PNSGDConfig::validate() const {
  require(eta > 0.0, ErrorCode::invalid_argument, "eta must be > 0");
  require(beta > 0.0, ErrorCode::invalid_argument, "beta must be > 0");
  require(eta <= 2.0 / beta, ErrorCode::step_size,
          "eta must not exceed 2 / beta for contractive updates");
  require(sigma >= 0.0, ErrorCode::invalid_argument, "sigma must be >= 0");
  require(constraint_radius > 0.0, ErrorCode::invalid_argument,
          "constraint radius must be > 0");
  double sq = 0.0;
  for (double v : w0) sq += v * v;
  require(std::sqrt(sq) <= constraint_radius * (1.0 + 1e-12),
          ErrorCode::invalid_argument, "w0 must lie in the constraint set");
}

void project_l2_ball(std::span<double> v, double radius) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > radius) {
    const double s = radius / norm;
    for (double& x : v) x *= s;
  }
}

std::vector<double> pnsgd_update(std::span<const double> w,
                                 std::span<const double> grad, double eta,
                                 double radius) {
  std::vector<double> v(w.begin(), w.end());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= eta * grad[j];
  project_l2_ball(v, radius);
  return v;
}

std::vector<double> pnsgd_run(const PNSGDConfig& config, std::size_t n_samples,
                              const GradientFn& grad, RandomStream& rng) {
  config.validate();
  require(n_samples >= 1, ErrorCode::invalid_argument, "empty dataset");
  std::vector<double> w = config.w0;
  std::vector<double> g(w.size());
  for (std::size_t t = 0; t < n_samples; ++t) {
    std::fill(g.begin(), g.end(), 0.0);
    grad(w, t, g);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double noise = config.sigma > 0.0 ? config.sigma * rng.normal() : 0.0;
      w[j] -= config.eta * (g[j] + noise);
    }
    project_l2_ball(w, config.constraint_radius);
  }
  return w;
}

double noise_for_renyi_dp(double alpha, double eps, double G, std::size_t n,
                          std::size_t t) {
  require(alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  require(eps > 0.0, ErrorCode::invalid_argument, "eps must be > 0");
  require(G > 0.0, ErrorCode::invalid_argument, "G must be > 0");
  check_position(n, t);
  return 2.0 * alpha * G * G / (eps * static_cast<double>(n - t + 1));
}

double noise_for_renyi_mdp(double alpha, double eps_metric, double L_input,
                           double domain_diam, std::size_t n, std::size_t t) {
  require(alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  require(eps_metric > 0.0, ErrorCode::invalid_argument,
          "eps_metric must be > 0");
  require(L_input > 0.0, ErrorCode::invalid_argument, "L_input must be > 0");
  require(std::isfinite(domain_diam), ErrorCode::unbounded_domain,
          "the sample domain must be bounded");
  require(domain_diam > 0.0, ErrorCode::invalid_argument,
          "domain diameter must be > 0");
  check_position(n, t);
  return 2.0 * alpha * L_input * L_input * domain_diam /
         (eps_metric * static_cast<double>(n - t + 1));
}

double rdp_to_dp(double alpha, double eps_renyi, double delta) {
  require(alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  require(eps_renyi >= 0.0, ErrorCode::invalid_argument,
          "Renyi epsilon must be >= 0");
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument,
          "delta must lie in (0, 1)");
  if (alpha == std::numeric_limits<double>::infinity()) return eps_renyi;
  return eps_renyi + std::log(1.0 / delta) / (alpha - 1.0);
}

std::vector<double> default_alpha_grid() {
  return {1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
}

AlphaChoice best_rdp_to_dp(const std::function<double(double)>& eps_renyi,
                           double delta, const std::vector<double>& grid) {
  require(!grid.empty(), ErrorCode::invalid_argument, "empty alpha grid");
  const auto objective = [&](double a) {
    return rdp_to_dp(a, eps_renyi(a), delta);
  };
  std::size_t best = 0;
  double best_value = objective(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v < best_value) {
      best = i;
      best_value = v;
    }
  }
  double lo = best > 0 ? grid[best - 1] : grid[best];
  double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  if (hi <= lo) return {grid[best], best_value};

  // Golden-section refinement inside the bracket around the best node.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double a = 0.5 * (lo + hi);
  const double v = objective(a);
  if (v < best_value) return {a, v};
  return {grid[best], best_value};
}

NoiseChoice calibrate_noise(
    double target_eps, double delta,
    const std::function<double(double, double)>& rule,
    const std::vector<double>& grid) {
  require(target_eps > 0.0, ErrorCode::invalid_argument,
          "target eps must be > 0");
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument,
          "delta must lie in (0, 1)");
  NoiseChoice best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (double alpha : grid) {
    const double budget = target_eps - std::log(1.0 / delta) / (alpha - 1.0);
    if (budget <= 0.0) continue;
    const double s2 = rule(alpha, budget);
    if (s2 < best.sigma_sq) best = {s2, alpha, budget};
  }
  require(std::isfinite(best.sigma_sq), ErrorCode::invalid_argument,
          "no alpha in the grid leaves a positive Renyi budget");
  return best;
}

}  // namespace reconbound::pnsgd
