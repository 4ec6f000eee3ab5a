#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reconbound/privacy.hpp"
#include "reconbound/rng.hpp"

namespace reconbound::mechanisms {

/// Global sensitivity, in output-norm units.
struct SensitivitySpec {
  double value = 0.0;
};

/// Input-Lipschitz constant: output-norm units per unit of input metric.
struct LipschitzSpec {
  double value = 0.0;
};

/// What a mechanism guarantees about one release. Never changed by
/// post-processing.
struct PrivacyMetadata {
  std::string mechanism;
  double eps = 0.0;
  double delta = 0.0;
  double eps_metric = 0.0;
  double noise_scale = 0.0;  ///< Laplace scale, radial rate or Gaussian sigma
  double rho_inputs = 0.0;   ///< input distance the mDP guarantee was stated at
  bool noiseless = false;

  bool operator==(const PrivacyMetadata&) const = default;
};

/// A released vector together with its privacy metadata.
class Release {
 public:
  Release(std::vector<double> value, PrivacyMetadata metadata)
      : value_(std::move(value)), metadata_(std::move(metadata)) {}

  const std::vector<double>& value() const noexcept { return value_; }
  const PrivacyMetadata& metadata() const noexcept { return metadata_; }

  /// Post-processing: applies a deterministic map to the value and carries the
  /// metadata over untouched.
  template <typename F>
  Release map(F&& f) const {
    return Release(std::forward<F>(f)(value_), metadata_);
  }

 private:
  std::vector<double> value_;
  PrivacyMetadata metadata_;
};

/// Output perturbation of an L2-regularized ERM minimizer trained on
/// `n_train` samples. `noiseless` releases theta exactly (the eps -> infinity
/// limit) without pushing infinities through the arithmetic.
struct OutputPerturbationConfig {
  std::size_t n_train = 1;
  double lambda = 1.0;
  bool noiseless = false;
};

/// Laplace scale 2 / (N eps lambda).
double dp_laplace_scale(std::size_t n_train, double eps, double lambda);

/// Rate N eps_L lambda / 2 of the radial-Laplace density
/// proportional to exp(-rate |eta|_2).
double mdp_radial_rate(std::size_t n_train, double eps_metric, double lambda);

/// theta plus i.i.d. Laplace noise per coordinate.
Release output_perturb_dp(std::span<const double> theta,
                          const PrivacyParams& params,
                          const OutputPerturbationConfig& config,
                          RandomStream& rng);

/// theta plus radial-Laplace noise: uniform direction, Gamma(d, 1/rate) radius.
Release output_perturb_mdp_euclidean(std::span<const double> theta,
                                     double eps_metric,
                                     const OutputPerturbationConfig& config,
                                     RandomStream& rng);

double laplace_log_density(std::span<const double> h,
                           std::span<const double> center, double scale);
double radial_laplace_log_density(std::span<const double> h,
                                  std::span<const double> center, double rate);

/// sqrt(2 ln(1.25/delta)), nudged up so the strict inequality holds.
double gaussian_dp_constant(double delta);
/// c * sensitivity / eps with c from gaussian_dp_constant.
double gaussian_dp_sigma(double sensitivity, double eps, double delta);

/// Requires 0 < eps < 1 and 0 < delta < 1.
Release gaussian_mechanism_dp(std::span<const double> f_value,
                              SensitivitySpec sens, const PrivacyParams& params,
                              RandomStream& rng);

/// The metric-DP Gaussian mechanism states c^2 > ln(1.25/delta), half the
/// classical 2 ln(1.25/delta). `classical` selects the latter.
enum class MdpGaussianConstant { as_stated, classical };

double gaussian_mdp_constant(double delta,
                             MdpGaussianConstant which = MdpGaussianConstant::as_stated);
double gaussian_mdp_sigma(double lipschitz, double eps_metric, double delta,
                          MdpGaussianConstant which = MdpGaussianConstant::as_stated);

Release gaussian_mechanism_mdp(
    std::span<const double> f_value, LipschitzSpec lip, double rho_inputs,
    const PrivacyParams& params, RandomStream& rng,
    MdpGaussianConstant which = MdpGaussianConstant::as_stated);

}  // namespace reconbound::mechanisms
