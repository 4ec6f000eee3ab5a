#include "reconbound/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reconbound/error.hpp"

namespace reconbound {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

void Dataset::push_back(std::span<const double> features, int label) {
  require(features.size() == dim, ErrorCode::invalid_argument,
          "feature row has the wrong dimension");
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(label);
}

Dataset Dataset::without(std::size_t i) const {
  require(i < size(), ErrorCode::invalid_argument, "row index out of range");
  Dataset out{dim, {}, {}};
  out.x.reserve(x.size() - dim);
  out.y.reserve(y.size() - 1);
  for (std::size_t r = 0; r < size(); ++r) {
    if (r != i) out.push_back(row(r), y[r]);
  }
  return out;
}

double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_loss(std::span<const double> theta, std::span<const double> x,
                     int y) {
  const double m = y * dot(theta, x);
  // log1p(e^{-m}) stays accurate for large |m|.
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

void add_logistic_gradient(std::span<const double> theta,
                           std::span<const double> x, int y,
                           std::span<double> out, double weight) {
  const double coeff = -y * logistic(-y * dot(theta, x)) * weight;
  for (std::size_t j = 0; j < x.size(); ++j) out[j] += coeff * x[j];
}

void LogRegProblem::validate() const {
  require(data.dim >= 1, ErrorCode::invalid_argument, "dim must be >= 1");
  require(data.size() >= 1, ErrorCode::invalid_argument, "empty dataset");
  require(data.x.size() == data.size() * data.dim, ErrorCode::invalid_argument,
          "feature matrix has the wrong shape");
  require(lambda > 0.0, ErrorCode::invalid_argument, "lambda must be > 0");
  require(tolerance > 0.0, ErrorCode::invalid_argument,
          "tolerance must be > 0");
  for (std::size_t i = 0; i < data.size(); ++i) {
    require(data.y[i] == 1 || data.y[i] == -1, ErrorCode::invalid_argument,
            "labels must be -1 or +1");
    const auto r = data.row(i);
    require(std::all_of(r.begin(), r.end(),
                        [](double v) { return std::isfinite(v); }),
            ErrorCode::invalid_argument, "feature rows must be finite");
    require(norm2(r) <= 1.0 + 1e-12, ErrorCode::invalid_argument,
            "feature rows must have L2 norm <= 1");
  }
}

double LogRegProblem::objective(std::span<const double> theta) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    loss += logistic_loss(theta, data.row(i), data.y[i]);
  }
  return loss / static_cast<double>(data.size()) +
         0.5 * lambda * dot(theta, theta);
}

void LogRegProblem::gradient(std::span<const double> theta,
                             std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const double w = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    add_logistic_gradient(theta, data.row(i), data.y[i], out, w);
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += lambda * theta[j];
}

TrainedModel train_logreg_exact(const LogRegProblem& problem) {
  problem.validate();
  const std::size_t d = problem.data.dim;

  // Smoothness: the logistic term contributes at most max|x|^2 / 4.
  double max_sq = 0.0;
  for (std::size_t i = 0; i < problem.data.size(); ++i) {
    const auto r = problem.data.row(i);
    max_sq = std::max(max_sq, dot(r, r));
  }
  const double safe_step = 1.0 / (0.25 * max_sq + problem.lambda);

  std::vector<double> theta(d, 0.0), grad(d), trial(d);
  problem.gradient(theta, grad);
  double value = problem.objective(theta);
  double step = safe_step;

  for (std::size_t it = 0; it < problem.max_iterations; ++it) {
    const double gnorm = norm2(grad);
    if (gnorm <= problem.tolerance) return {theta, gnorm, it};

    // Armijo backtracking from an optimistic step. At 1/L descent is
    // guaranteed, so that step is taken even when rounding hides the decrease.
    step *= 2.0;
    for (;;) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = theta[j] - step * grad[j];
      if (step <= safe_step) break;
      const double candidate = problem.objective(trial);
      if (candidate <= value - 0.5 * step * gnorm * gnorm) break;
      step = std::max(0.5 * step, safe_step);
    }
    theta.swap(trial);
    value = problem.objective(theta);
    problem.gradient(theta, grad);
  }
  fail(ErrorCode::non_convergence,
       "logistic regression did not reach the gradient tolerance");
}

}  // namespace reconbound
