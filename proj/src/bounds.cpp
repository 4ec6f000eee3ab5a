#include "reconbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "reconbound/error.hpp"

namespace reconbound::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double n_of(const BoundQuery& q) { return static_cast<double>(q.n); }

}  // namespace

void BoundQuery::validate() const {
  require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  require(std::isfinite(diam) && diam >= 0.0, ErrorCode::invalid_argument,
          "diam must be finite and >= 0");
  require(std::isfinite(coord_diam_sq_sum) && coord_diam_sq_sum >= 0.0,
          ErrorCode::invalid_argument,
          "coordinate diameter sum must be finite and >= 0");
  require(std::isfinite(d_eff) && d_eff >= 0.0, ErrorCode::invalid_argument,
          "d_eff must be finite and >= 0");
  require(c_lecam > 0.0, ErrorCode::invalid_argument, "C must be > 0");
  require(params.eps >= 0.0 && params.eps_metric >= 0.0,
          ErrorCode::invalid_argument, "privacy parameters must be >= 0");
  // delta = 1 is allowed here: it zeroes the (1 - delta) factor.
  require(params.delta >= 0.0 && params.delta <= 1.0,
          ErrorCode::invalid_argument, "delta must lie in [0, 1]");
  if (params.alpha) {
    require(*params.alpha > 1.0, ErrorCode::invalid_argument,
            "alpha must be > 1");
  }
}

double thm1_dp_bound(const BoundQuery& q) {
  q.validate();
  const double eps = q.params.eps;
  return q.c_lecam * q.diam * q.diam *
         std::exp(-n_of(q) * eps * std::tanh(0.5 * eps)) *
         (1.0 - q.params.delta);
}

double renyi_dp_bound(const BoundQuery& q) {
  q.validate();
  require(q.params.alpha.has_value(), ErrorCode::missing_alpha,
          "the Renyi DP bound needs alpha");
  const double eps = q.params.eps;
  const double exponent = std::min(eps, 1.5 * *q.params.alpha * eps * eps);
  return q.c_lecam * q.diam * q.diam * std::exp(-n_of(q) * exponent);
}

BoundValue thm2_mdp_bound(const BoundQuery& q) {
  q.validate();
  const double e = q.params.eps_metric;
  if (e == 0.0) return {kInf, true};
  return {(1.0 - q.params.delta) / (2.0 * n_of(q) * std::numbers::e * e * e),
          false};
}

BoundValue thm3_highdim_bound(const BoundQuery& q) {
  q.validate();
  require(q.d_eff > std::numbers::ln2, ErrorCode::degenerate_dimension,
          "Fano's inequality needs d_eff > ln 2 (at least two hypotheses)");
  const double e = q.params.eps_metric;
  if (e == 0.0) return {kInf, true};
  const double gap = q.d_eff - std::numbers::ln2;
  return {gap * gap / (8.0 * n_of(q) * e * e * q.d_eff) * (1.0 - q.params.delta),
          false};
}

double thm3_objective(const BoundQuery& q, double t) {
  q.validate();
  const double e = q.params.eps_metric;
  return t * t *
         (1.0 - (2.0 * n_of(q) * e * e * t * t + std::numbers::ln2) / q.d_eff) *
         (1.0 - q.params.delta);
}

BoundValue guo_bound(const BoundQuery& q) {
  q.validate();
  const double eps = q.params.eps;
  if (eps == 0.0) return {kInf, true};
  if (eps == kInf) return {0.0, false};
  return {q.coord_diam_sq_sum / (4.0 * std::expm1(eps)), false};
}

double guo_validity_threshold(std::size_t d) {
  require(d >= 1, ErrorCode::invalid_argument, "d must be >= 1");
  return std::log1p(static_cast<double>(d) / 4.0);
}

const char* to_string(Validity v) {
  return v == Validity::valid ? "VALID" : "VACUOUS";
}

Validity validity_check(double bound_value, double trivial_upper) {
  return bound_value > trivial_upper ? Validity::vacuous : Validity::valid;
}

Validity validity_check(const BoundValue& bound, double trivial_upper) {
  if (bound.unbounded) return Validity::vacuous;
  return validity_check(bound.value, trivial_upper);
}

}  // namespace reconbound::bounds
