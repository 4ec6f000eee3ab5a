#pragma once

#include <functional>
#include <span>

namespace reconbound {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< summed Gauss-Kronrod error estimate
  long evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Panels are bisected in order of largest error estimate until the summed
/// estimate is below `abs_tol`. Interior `breakpoints` (kinks, modes) seed the
/// initial partition. Throws non_convergence when a panel would need more
/// than `max_depth` bisections.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-8,
                           std::span<const double> breakpoints = {},
                           int max_depth = 40);

}  // namespace reconbound
