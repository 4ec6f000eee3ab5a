#pragma once

#include <cstddef>
#include <string>

#include "reconbound/privacy.hpp"

namespace reconbound::bounds {

/// Everything the lower bounds consume.
struct BoundQuery {
  double diam = 1.0;               ///< diam(Z)
  double coord_diam_sq_sum = 1.0;  ///< sum_i diam_i(Z)^2
  std::size_t n = 1;               ///< releases observed by the adversary
  PrivacyParams params;
  double d_eff = 0.0;              ///< ln N(1/2, unit ball, rho)
  double c_lecam = 1.0 / 16.0;     ///< constant from the two-point argument

  void validate() const;
};

/// A bound value. `unbounded` marks the +infinity cases (eps = 0 in a
/// denominator); `value` then holds +infinity for in-process use only.
struct BoundValue {
  double value = 0.0;
  bool unbounded = false;
};

/// C diam^2 exp(-n eps tanh(eps/2)) (1 - delta).
double thm1_dp_bound(const BoundQuery& q);

/// C diam^2 exp(-n min{eps, 3 alpha eps^2 / 2}). Throws missing_alpha.
double renyi_dp_bound(const BoundQuery& q);

/// (1 - delta) / (2 n e eps_L^2).
BoundValue thm2_mdp_bound(const BoundQuery& q);

/// Fano bound maximized over the packing radius:
///   (d_eff - ln 2)^2 / (8 n eps_L^2 d_eff) (1 - delta).
/// Throws degenerate_dimension unless d_eff > ln 2.
BoundValue thm3_highdim_bound(const BoundQuery& q);

/// The Fano expression before maximization, t^2 [1 - (2 n eps_L^2 t^2 + ln 2)
/// / d_eff] (1 - delta), for checking the closed form.
double thm3_objective(const BoundQuery& q, double t);

/// sum_i diam_i^2 / (4 (e^eps - 1)), the prior coordinate-wise bound.
BoundValue guo_bound(const BoundQuery& q);

/// ln(1 + d/4): below this eps the coordinate-wise bound exceeds the trivial
/// upper bound on a unit-diameter ball.
double guo_validity_threshold(std::size_t d);

enum class Validity { valid, vacuous };

const char* to_string(Validity v);

/// vacuous when the bound exceeds the trivial upper bound diam^2.
Validity validity_check(double bound_value, double trivial_upper);
Validity validity_check(const BoundValue& bound, double trivial_upper);

}  // namespace reconbound::bounds
