#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "reconbound/rng.hpp"

namespace reconbound::pnsgd {

/// Projected noisy SGD over the L2 ball of radius `constraint_radius`.
struct PNSGDConfig {
  double eta = 1.0;    ///< learning rate
  double sigma = 0.0;  ///< per-step Gaussian noise standard deviation
  std::vector<double> w0;
  double constraint_radius = 1.0;
  double beta = 1.0;             ///< smoothness of f(., x)
  std::optional<double> G;       ///< global gradient norm bound
  double L_input = 1.0;          ///< input-Lipschitz constant of the gradients
  double domain_diam = 1.0;      ///< diameter of the sample domain

  /// step_size error if eta > 2 / beta; invalid_argument otherwise.
  void validate() const;
};

/// grad_w f(w, x_t) for sample index t, written into `out`.
using GradientFn = std::function<void(std::span<const double> w,
                                      std::size_t sample, std::span<double> out)>;

/// L2 projection of v onto the ball of the given radius, in place.
void project_l2_ball(std::span<double> v, double radius);

/// One noiseless step: project(w - eta * grad).
std::vector<double> pnsgd_update(std::span<const double> w,
                                 std::span<const double> grad, double eta,
                                 double radius);

/// One pass over samples 0..n-1 in order:
///   v = w - eta (grad f(w, x_t) + Z),  Z ~ N(0, sigma^2 I),  w = project(v).
/// Only the final iterate is returned.
std::vector<double> pnsgd_run(const PNSGDConfig& config, std::size_t n_samples,
                              const GradientFn& grad, RandomStream& rng);

/// sigma^2 >= 2 alpha G^2 / (eps (n - t + 1)) for (alpha, eps)-Renyi DP of the
/// sample at 1-based position t.
double noise_for_renyi_dp(double alpha, double eps, double G, std::size_t n,
                          std::size_t t);

/// sigma^2 >= 2 alpha L_input^2 diam / (eps_L (n - t + 1)) for
/// (alpha, eps_L)-Renyi metric DP.
double noise_for_renyi_mdp(double alpha, double eps_metric, double L_input,
                           double domain_diam, std::size_t n, std::size_t t);

/// eps_renyi + ln(1/delta) / (alpha - 1).
double rdp_to_dp(double alpha, double eps_renyi, double delta);

/// {1.5, 2, 4, 8, 16, 32, 64}
std::vector<double> default_alpha_grid();

struct AlphaChoice {
  double alpha;
  double eps;
};

/// Minimizes rdp_to_dp(alpha, eps_renyi(alpha), delta): scans `grid`, then
/// refines by golden-section search between the neighbours of the best node.
AlphaChoice best_rdp_to_dp(const std::function<double(double)>& eps_renyi,
                           double delta,
                           const std::vector<double>& grid = default_alpha_grid());

/// Smallest sigma^2 over the alpha grid that reaches a target (eps, delta)
/// through rdp_to_dp, given sigma^2 = rule(alpha, eps_renyi). Grid points that
/// leave no Renyi budget are skipped; throws invalid_argument if none remain.
struct NoiseChoice {
  double sigma_sq;
  double alpha;
  double eps_renyi;
};
NoiseChoice calibrate_noise(
    double target_eps, double delta,
    const std::function<double(double alpha, double eps_renyi)>& rule,
    const std::vector<double>& grid = default_alpha_grid());

}  // namespace reconbound::pnsgd
