#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace reconbound {

/// Labelled feature rows, row-major. Labels are -1 or +1.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * dim, dim};
  }
  void push_back(std::span<const double> features, int label);
  /// Copy with row i removed.
  Dataset without(std::size_t i) const;
};

/// Numerically stable 1 / (1 + e^{-z}).
double logistic(double z) noexcept;

/// ln(1 + e^{-y theta.x}).
double logistic_loss(std::span<const double> theta, std::span<const double> x,
                     int y);

/// out += weight * grad_theta ln(1 + e^{-y theta.x})
///      = weight * (-y * s(-y theta.x)) * x.
void add_logistic_gradient(std::span<const double> theta,
                           std::span<const double> x, int y,
                           std::span<double> out, double weight = 1.0);

/// L2-regularized logistic regression:
///   J(theta) = (1/N) sum_i ln(1 + e^{-y_i theta.x_i}) + (lambda/2) |theta|^2.
struct LogRegProblem {
  Dataset data;
  double lambda = 1e-2;
  double tolerance = 1e-10;  ///< on |grad J|_2
  std::size_t max_iterations = 200000;

  void validate() const;
  double objective(std::span<const double> theta) const;
  /// Writes grad J(theta) into out.
  void gradient(std::span<const double> theta, std::span<double> out) const;
};

struct TrainedModel {
  std::vector<double> theta;
  double gradient_norm;
  std::size_t iterations;
};

/// Full-batch gradient descent with backtracking, run until |grad J| is at
/// most problem.tolerance. Throws non_convergence at the iteration cap.
TrainedModel train_logreg_exact(const LogRegProblem& problem);

}  // namespace reconbound
