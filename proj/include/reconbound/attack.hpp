#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "reconbound/logreg.hpp"
#include "reconbound/metric_space.hpp"
#include "reconbound/rng.hpp"

namespace reconbound::attack {

struct Sample {
  std::vector<double> x;
  int y = 1;
};

/// Informed adversary: knows every training sample except the challenge and
/// may query m released models, k of them spent on shadow targets.
struct ThreatModel {
  Dataset d_minus;
  Sample challenge;
  std::size_t query_budget_m = 1;
  std::size_t shadow_count_k = 0;
  std::size_t sample_count_n = 1;  ///< m - k

  /// Sets n = m - k. Throws budget_exceeded when k >= m.
  static ThreatModel make(Dataset d_minus, Sample challenge, std::size_t m,
                          std::size_t k = 0);
  void validate() const;
};

/// What to do when h admits no exact stationarity solution (a noisy release
/// usually does not).
enum class RootPolicy {
  strict,   ///< throw no_root
  closest,  ///< take the v minimizing |psi(v) - a|
};

struct GlmAttackParams {
  double lambda = 1e-2;
  std::size_t n_train = 1;  ///< N, including the challenge
  RootPolicy policy = RootPolicy::strict;
  double domain_radius = 1.0;  ///< samples are known to lie in this L2 ball
  double bracket = 50.0;
  double tolerance = 1e-12;
};

struct GlmReconstruction {
  std::vector<double> x_hat;
  double margin;  ///< v = y* h.x_hat at the chosen root
  std::size_t roots;  ///< exact roots found; 0 means the closest point was used
};

/// Margin v0 where psi(v) = -v s(-v) attains its minimum (v s(v) = 1).
double psi_argmin();

/// All solutions v in [-bracket, bracket] of -v s(-v) = a, ascending.
std::vector<double> stationarity_roots(double a, double bracket = 50.0,
                                       double tolerance = 1e-12);

/// Inverts the stationarity condition of L2-regularized logistic regression
/// for the missing sample. With g the missing gradient, x_hat = g / c where
/// c = -y* s(-y* h.x_hat). Two margins can fit the same release. Candidates
/// outside the domain ball are discarded; among the rest the one whose norm is
/// closest to the median row norm of d_minus wins. With no candidate inside
/// the domain, the smallest |x_hat| is returned.
GlmReconstruction glm_reconstruct(std::span<const double> h,
                                  const Dataset& d_minus, int y_star,
                                  const GlmAttackParams& params);

std::vector<double> glm_reconstruct_single(std::span<const double> h,
                                           const Dataset& d_minus, int y_star,
                                           double lambda, std::size_t n_train);

struct AttackResult {
  std::vector<double> z_hat;
  double mse = 0.0;
  std::vector<std::vector<double>> per_sample_estimates;
  std::size_t failures = 0;
};

/// One private release of the model trained on d_minus plus the challenge.
using ReleaseFn = std::function<std::vector<double>(RandomStream&)>;

/// Draws n releases, reconstructs from each and averages the successes.
/// The error is rho(x*, z_hat)^2 under `norm`.
AttackResult attack_average(const ThreatModel& model, const ReleaseFn& mechanism,
                            const GlmAttackParams& params, RandomStream& rng,
                            metric::NormTag norm = metric::NormTag::L2);

struct ShadowPair {
  std::vector<double> h;
  Sample z;
};

using Trainer = std::function<std::vector<double>(const Dataset&)>;

/// Trains one shadow model per auxiliary target on d_minus plus that target
/// and debits the k queries from the budget.
std::vector<ShadowPair> shadow_interface(ThreatModel& model,
                                         const std::vector<Sample>& aux,
                                         const Trainer& trainer);

}  // namespace reconbound::attack
