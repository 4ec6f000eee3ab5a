#include <cmath>
#include <limits>

#include "reconbound/error.hpp"
#include "reconbound/privacy.hpp"
#include "reconbound/rng.hpp"

namespace reconbound {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::unbounded_domain: return "unbounded domain";
    case ErrorCode::size_guard: return "size guard";
    case ErrorCode::missing_alpha: return "missing alpha";
    case ErrorCode::unsupported_family: return "unsupported family";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::step_size: return "step size";
    case ErrorCode::degenerate_dimension: return "degenerate dimension";
    case ErrorCode::no_root: return "no root";
    case ErrorCode::near_zero_gradient: return "near-zero gradient";
    case ErrorCode::all_failed: return "all draws failed";
    case ErrorCode::budget_exceeded: return "budget exceeded";
    case ErrorCode::enumeration_cap: return "enumeration cap";
    case ErrorCode::wrong_arity: return "wrong arity";
    case ErrorCode::bad_format: return "bad format";
    case ErrorCode::digit_absent: return "digit absent";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "i/o";
  }
  return "unknown";
}

void PrivacyParams::validate() const {
  require(std::isfinite(eps) || eps == std::numeric_limits<double>::infinity(),
          ErrorCode::invalid_argument, "eps must not be NaN");
  require(eps >= 0.0, ErrorCode::invalid_argument, "eps must be >= 0");
  require(delta >= 0.0 && delta < 1.0, ErrorCode::invalid_argument,
          "delta must lie in [0, 1)");
  require(eps_metric >= 0.0, ErrorCode::invalid_argument,
          "eps_metric must be >= 0");
  if (alpha) {
    require(*alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  }
}

double RandomStream::laplace(double scale) {
  const double u = uniform() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Reject the top partial block so the modulo is unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % bound;
  }
}

void RandomStream::unit_vector(std::span<double> out) {
  for (;;) {
    double sq = 0.0;
    for (double& v : out) {
      v = normal();
      sq += v * v;
    }
    if (sq > 1e-300) {
      const double inv = 1.0 / std::sqrt(sq);
      for (double& v : out) v *= inv;
      return;
    }
  }
}

}  // namespace reconbound
