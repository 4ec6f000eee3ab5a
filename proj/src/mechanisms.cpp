#include "reconbound/mechanisms.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "reconbound/error.hpp"

namespace reconbound::mechanisms {

namespace {

constexpr double kConstantGuard = 1e-12;

std::vector<double> copy(std::span<const double> v) {
  return {v.begin(), v.end()};
}

void check_delta_open(double delta) {
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument,
          "delta must lie in (0, 1)");
}

}  // namespace

double dp_laplace_scale(std::size_t n_train, double eps, double lambda) {
  require(n_train >= 1, ErrorCode::invalid_argument, "N must be >= 1");
  require(eps > 0.0, ErrorCode::invalid_argument,
          "eps = 0 would need infinite noise");
  require(lambda > 0.0, ErrorCode::invalid_argument, "lambda must be > 0");
  return 2.0 / (static_cast<double>(n_train) * eps * lambda);
}

double mdp_radial_rate(std::size_t n_train, double eps_metric, double lambda) {
  require(n_train >= 1, ErrorCode::invalid_argument, "N must be >= 1");
  require(eps_metric > 0.0, ErrorCode::invalid_argument,
          "eps_metric = 0 would need infinite noise");
  require(lambda > 0.0, ErrorCode::invalid_argument, "lambda must be > 0");
  return static_cast<double>(n_train) * eps_metric * lambda / 2.0;
}

Release output_perturb_dp(std::span<const double> theta,
                          const PrivacyParams& params,
                          const OutputPerturbationConfig& config,
                          RandomStream& rng) {
  params.validate();
  PrivacyMetadata meta{"output_perturbation_laplace", params.eps, 0.0, 0.0,
                       0.0, 1.0, config.noiseless};
  if (config.noiseless) return Release(copy(theta), meta);
  const double b = dp_laplace_scale(config.n_train, params.eps, config.lambda);
  meta.noise_scale = b;
  std::vector<double> h = copy(theta);
  for (double& v : h) v += rng.laplace(b);
  return Release(std::move(h), meta);
}

Release output_perturb_mdp_euclidean(std::span<const double> theta,
                                     double eps_metric,
                                     const OutputPerturbationConfig& config,
                                     RandomStream& rng) {
  PrivacyMetadata meta{"output_perturbation_radial_laplace", 0.0, 0.0,
                       eps_metric, 0.0, 0.0, config.noiseless};
  if (config.noiseless) return Release(copy(theta), meta);
  const double rate = mdp_radial_rate(config.n_train, eps_metric, config.lambda);
  meta.noise_scale = rate;
  const std::size_t d = theta.size();
  std::vector<double> dir(d);
  rng.unit_vector(dir);
  const double radius = rng.gamma(static_cast<double>(d), 1.0 / rate);
  std::vector<double> h = copy(theta);
  for (std::size_t j = 0; j < d; ++j) h[j] += radius * dir[j];
  return Release(std::move(h), meta);
}

double laplace_log_density(std::span<const double> h,
                           std::span<const double> center, double scale) {
  require(h.size() == center.size(), ErrorCode::invalid_argument,
          "size mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    acc += -std::log(2.0 * scale) - std::abs(h[j] - center[j]) / scale;
  }
  return acc;
}

double radial_laplace_log_density(std::span<const double> h,
                                  std::span<const double> center, double rate) {
  require(h.size() == center.size(), ErrorCode::invalid_argument,
          "size mismatch");
  const double d = static_cast<double>(h.size());
  double sq = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    sq += (h[j] - center[j]) * (h[j] - center[j]);
  }
  // Normalizer rate^d / (S_{d-1} Gamma(d)), S_{d-1} = 2 pi^{d/2} / Gamma(d/2).
  const double log_surface = std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) -
                             std::lgamma(0.5 * d);
  return d * std::log(rate) - log_surface - std::lgamma(d) - rate * std::sqrt(sq);
}

double gaussian_dp_constant(double delta) {
  check_delta_open(delta);
  return std::sqrt(2.0 * std::log(1.25 / delta)) + kConstantGuard;
}

double gaussian_dp_sigma(double sensitivity, double eps, double delta) {
  require(sensitivity >= 0.0, ErrorCode::invalid_argument,
          "sensitivity must be >= 0");
  require(eps > 0.0, ErrorCode::invalid_argument, "eps must be > 0");
  return gaussian_dp_constant(delta) * sensitivity / eps;
}

Release gaussian_mechanism_dp(std::span<const double> f_value,
                              SensitivitySpec sens, const PrivacyParams& params,
                              RandomStream& rng) {
  params.validate();
  require(params.eps > 0.0 && params.eps < 1.0, ErrorCode::invalid_argument,
          "the Gaussian mechanism calibration holds only for 0 < eps < 1");
  check_delta_open(params.delta);
  const double sigma = gaussian_dp_sigma(sens.value, params.eps, params.delta);
  PrivacyMetadata meta{"gaussian_dp", params.eps, params.delta, 0.0, sigma,
                       1.0, false};
  std::vector<double> out = copy(f_value);
  if (sigma > 0.0) {
    for (double& v : out) v += sigma * rng.normal();
  }
  return Release(std::move(out), meta);
}

double gaussian_mdp_constant(double delta, MdpGaussianConstant which) {
  check_delta_open(delta);
  const double factor = which == MdpGaussianConstant::classical ? 2.0 : 1.0;
  return std::sqrt(factor * std::log(1.25 / delta)) + kConstantGuard;
}

double gaussian_mdp_sigma(double lipschitz, double eps_metric, double delta,
                          MdpGaussianConstant which) {
  require(lipschitz >= 0.0, ErrorCode::invalid_argument,
          "Lipschitz constant must be >= 0");
  require(eps_metric > 0.0, ErrorCode::invalid_argument,
          "eps_metric must be > 0");
  return gaussian_mdp_constant(delta, which) * lipschitz / eps_metric;
}

Release gaussian_mechanism_mdp(std::span<const double> f_value,
                               LipschitzSpec lip, double rho_inputs,
                               const PrivacyParams& params, RandomStream& rng,
                               MdpGaussianConstant which) {
  params.validate();
  require(rho_inputs >= 0.0, ErrorCode::invalid_argument,
          "input distance must be >= 0");
  const double sigma =
      gaussian_mdp_sigma(lip.value, params.eps_metric, params.delta, which);
  PrivacyMetadata meta{"gaussian_mdp", 0.0, params.delta, params.eps_metric,
                       sigma, rho_inputs, false};
  std::vector<double> out = copy(f_value);
  if (sigma > 0.0) {
    for (double& v : out) v += sigma * rng.normal();
  }
  return Release(std::move(out), meta);
}

}  // namespace reconbound::mechanisms
