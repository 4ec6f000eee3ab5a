#include "reconbound/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reconbound/error.hpp"

namespace reconbound::attack {

namespace {

double psi(double v) { return -v * logistic(-v); }

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Bisection for psi(v) = a on [lo, hi], where psi - a changes sign.
double bisect(double a, double lo, double hi, double tolerance) {
  double f_lo = psi(lo) - a;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = psi(mid) - a;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double median_row_norm(const Dataset& data) {
  std::vector<double> norms(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    norms[i] = std::sqrt(dot(data.row(i), data.row(i)));
  }
  if (norms.empty()) return 0.0;
  const auto mid = norms.begin() + static_cast<std::ptrdiff_t>(norms.size() / 2);
  std::nth_element(norms.begin(), mid, norms.end());
  return *mid;
}

}  // namespace

ThreatModel ThreatModel::make(Dataset d_minus, Sample challenge, std::size_t m,
                              std::size_t k) {
  require(k < m, ErrorCode::budget_exceeded,
          "shadow targets must leave at least one query for the attack");
  ThreatModel model{std::move(d_minus), std::move(challenge), m, k, m - k};
  model.validate();
  return model;
}

void ThreatModel::validate() const {
  require(sample_count_n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  require(shadow_count_k + sample_count_n == query_budget_m,
          ErrorCode::budget_exceeded, "k + n must equal m");
  require(challenge.x.size() == d_minus.dim, ErrorCode::invalid_argument,
          "challenge dimension does not match the dataset");
  for (std::size_t i = 0; i < d_minus.size(); ++i) {
    const auto row = d_minus.row(i);
    if (d_minus.y[i] == challenge.y &&
        std::equal(row.begin(), row.end(), challenge.x.begin())) {
      fail(ErrorCode::invalid_argument, "challenge appears in d_minus");
    }
  }
}

double psi_argmin() {
  // v s(v) = 1 on [1, 2]; v s(v) is increasing for v > 0.
  double lo = 1.0, hi = 2.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (mid * logistic(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> stationarity_roots(double a, double bracket,
                                       double tolerance) {
  require(bracket > 0.0 && tolerance > 0.0, ErrorCode::invalid_argument,
          "bracket and tolerance must be > 0");
  static const double v0 = psi_argmin();
  std::vector<double> roots;
  // psi decreases on [-bracket, v0] and increases on [v0, bracket].
  const double split = std::min(v0, bracket);
  const auto try_branch = [&](double lo, double hi) {
    if (lo >= hi) return;
    const double f_lo = psi(lo) - a, f_hi = psi(hi) - a;
    if (f_lo == 0.0) {
      roots.push_back(lo);
    } else if (f_hi == 0.0) {
      roots.push_back(hi);
    } else if ((f_lo < 0.0) != (f_hi < 0.0)) {
      roots.push_back(bisect(a, lo, hi, tolerance));
    }
  };
  try_branch(-bracket, split);
  try_branch(split, bracket);
  if (roots.size() == 2 && std::abs(roots[1] - roots[0]) <= tolerance) {
    roots.pop_back();
  }
  return roots;
}

GlmReconstruction glm_reconstruct(std::span<const double> h,
                                  const Dataset& d_minus, int y_star,
                                  const GlmAttackParams& params) {
  require(h.size() == d_minus.dim, ErrorCode::invalid_argument,
          "release dimension does not match the dataset");
  require(y_star == 1 || y_star == -1, ErrorCode::invalid_argument,
          "label must be -1 or +1");
  require(params.lambda > 0.0 && params.n_train == d_minus.size() + 1,
          ErrorCode::invalid_argument,
          "need lambda > 0 and N = |d_minus| + 1");

  const double n = static_cast<double>(params.n_train);
  std::vector<double> g(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) g[j] = -n * params.lambda * h[j];
  for (std::size_t i = 0; i < d_minus.size(); ++i) {
    add_logistic_gradient(h, d_minus.row(i), d_minus.y[i], g, -1.0);
  }
  const double g_norm = std::sqrt(dot(g, g));
  require(g_norm >= 1e-12, ErrorCode::near_zero_gradient,
          "missing gradient vanishes; the release carries no information");

  const double a = dot(h, g);
  const auto roots = stationarity_roots(a, params.bracket, params.tolerance);
  double v;
  if (roots.size() == 1) {
    v = roots.front();
  } else if (roots.size() == 2) {
    // |x_hat| = |g| / s(-v) grows with v, so roots.front() is the smaller.
    const double limit = params.domain_radius * (1.0 + 1e-9);
    const double n1 = g_norm / logistic(-roots[0]);
    const double n2 = g_norm / logistic(-roots[1]);
    if (n2 > limit) {
      v = roots[0];
    } else {
      const double m = median_row_norm(d_minus);
      v = std::abs(n2 - m) < std::abs(n1 - m) ? roots[1] : roots[0];
    }
  } else {
    require(params.policy == RootPolicy::closest, ErrorCode::no_root,
            "no margin solves the stationarity equation");
    static const double v0 = psi_argmin();
    v = a < psi(v0) ? v0 : (a > 0.0 ? -params.bracket : params.bracket);
  }
  const double c = -y_star * logistic(-v);
  for (double& gj : g) gj /= c;
  return {std::move(g), v, roots.size()};
}

std::vector<double> glm_reconstruct_single(std::span<const double> h,
                                           const Dataset& d_minus, int y_star,
                                           double lambda, std::size_t n_train) {
  GlmAttackParams params;
  params.lambda = lambda;
  params.n_train = n_train;
  return glm_reconstruct(h, d_minus, y_star, params).x_hat;
}

AttackResult attack_average(const ThreatModel& model, const ReleaseFn& mechanism,
                            const GlmAttackParams& params, RandomStream& rng,
                            metric::NormTag norm) {
  model.validate();
  AttackResult result;
  const std::size_t d = model.d_minus.dim;
  result.z_hat.assign(d, 0.0);
  for (std::size_t i = 0; i < model.sample_count_n; ++i) {
    const auto h = mechanism(rng);
    try {
      auto est = glm_reconstruct(h, model.d_minus, model.challenge.y, params);
      for (std::size_t j = 0; j < d; ++j) result.z_hat[j] += est.x_hat[j];
      result.per_sample_estimates.push_back(std::move(est.x_hat));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_root &&
          e.code() != ErrorCode::near_zero_gradient) {
        throw;
      }
      ++result.failures;
    }
  }
  require(!result.per_sample_estimates.empty(), ErrorCode::all_failed,
          "every reconstruction attempt failed");
  const double count = static_cast<double>(result.per_sample_estimates.size());
  for (double& v : result.z_hat) v /= count;
  const double dist = metric::norm_distance(model.challenge.x, result.z_hat, norm);
  result.mse = dist * dist;
  return result;
}

std::vector<ShadowPair> shadow_interface(ThreatModel& model,
                                         const std::vector<Sample>& aux,
                                         const Trainer& trainer) {
  const std::size_t k = aux.size();
  require(k < model.query_budget_m, ErrorCode::budget_exceeded,
          "shadow targets exhaust the query budget");
  std::vector<ShadowPair> pairs;
  pairs.reserve(k);
  for (const auto& z : aux) {
    require(z.x.size() == model.d_minus.dim, ErrorCode::invalid_argument,
            "shadow target dimension does not match the dataset");
    Dataset with = model.d_minus;
    with.push_back(z.x, z.y);
    pairs.push_back({trainer(with), z});
  }
  model.shadow_count_k = k;
  model.sample_count_n = model.query_budget_m - k;
  return pairs;
}

}  // namespace reconbound::attack
