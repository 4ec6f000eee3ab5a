#pragma once

#include <optional>

namespace reconbound {

/// Privacy knobs shared by mechanisms and bounds: (eps, delta) for DP,
/// eps_metric for metric DP, alpha for Renyi variants.
struct PrivacyParams {
  double eps = 0.0;
  double delta = 0.0;
  double eps_metric = 0.0;
  std::optional<double> alpha;

  /// Throws invalid_argument unless eps >= 0, 0 <= delta < 1, eps_metric >= 0
  /// and alpha > 1 when present.
  void validate() const;
};

}  // namespace reconbound
