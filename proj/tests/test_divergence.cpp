#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "reconbound/divergence.hpp"
#include "reconbound/error.hpp"
#include "reconbound/quadrature.hpp"

using namespace reconbound;
using namespace reconbound::divergence;

namespace {

DivergenceBoundInput in(double eps, double rho = 1.0,
                        std::optional<double> alpha = std::nullopt) {
  DivergenceBoundInput d;
  d.eps = eps;
  d.rho = rho;
  d.alpha = alpha;
  return d;
}

AnalyticPair laplace(double delta, double b) {
  return {Family::Laplace, 0.0, delta, b};
}
AnalyticPair gaussian(double delta, double s) {
  return {Family::Gaussian, 0.0, delta, s};
}

}  // namespace

TEST_CASE("kl bound values") {
  CHECK(kl_bound(in(0.0, 5.0)).value == 0.0);
  CHECK(kl_bound(in(1.0)).value == doctest::Approx(0.46211715726000974).epsilon(1e-14));
  CHECK(kl_bound(in(2.0, 3.0)).value == doctest::Approx(6.0 * std::tanh(3.0)).epsilon(1e-14));
  CHECK(kl_bound(in(2.0, 3.0)).value == doctest::Approx(5.970329).epsilon(1e-6));
  CHECK(kl_bound(in(0.1)).approx == doctest::Approx(0.005));
  CHECK(kl_bound(in(3.0)).approx == 3.0);
}

TEST_CASE("kl bound never exceeds its min form") {
  for (double t = 0.0; t <= 20.0; t += 0.01) {
    const auto b = kl_bound(in(t));
    CHECK(b.value <= b.approx * (1.0 + 1e-12));
  }
}

TEST_CASE("renyi bound values and monotonicity") {
  CHECK(renyi_bound(in(0.0, 1.0, 2.0)) == 0.0);
  CHECK(renyi_bound(in(1.0, 1.0, 2.0)) == 1.0);
  CHECK(renyi_bound(in(0.1, 1.0, 2.0)) == doctest::Approx(0.03).epsilon(1e-14));
  try {
    renyi_bound(in(1.0));
    FAIL("expected missing_alpha");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_alpha);
  }
  double prev = 0.0;
  for (double alpha = 1.1; alpha < 50; alpha *= 1.3) {
    const double v = renyi_bound(in(0.2, 1.0, alpha));
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (double x = 0.0; x < 3.0; x += 0.05) {
    CHECK(renyi_bound(in(x, 1.0, 3.0)) >= prev);
    CHECK(renyi_bound(in(1.0, x, 3.0)) >= renyi_bound(in(1.0, std::max(0.0, x - 0.05), 3.0)));
    prev = renyi_bound(in(x, 1.0, 3.0));
  }
}

TEST_CASE("bound inputs are validated") {
  CHECK_THROWS_AS(kl_bound(in(-1.0)), Error);
  CHECK_THROWS_AS(kl_bound(in(1.0, -1.0)), Error);
  CHECK_THROWS_AS(renyi_bound(in(1.0, 1.0, 1.0)), Error);
}

TEST_CASE("analytic divergences") {
  CHECK(analytic_kl(laplace(0.0, 1.0)) == 0.0);
  CHECK(analytic_kl(gaussian(1.0, 1.0)) == 0.5);
  CHECK(analytic_kl(laplace(1.0, 1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(analytic_renyi(gaussian(0.0, 1.0), 5.0) == 0.0);
  CHECK(analytic_renyi(gaussian(1.0, 1.0), 2.0) == 1.0);
  CHECK(analytic_renyi(gaussian(2.0, 2.0), 3.0) == 1.5);
  try {
    analytic_renyi(laplace(1.0, 1.0), 2.0);
    FAIL("expected unsupported_family");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_family);
  }
  CHECK_THROWS_AS(analytic_kl(laplace(1.0, 0.0)), Error);
}

TEST_CASE("laplace kl closed form matches an independent Simpson integration") {
  // Split at the kinks 0 and 1 so Simpson's rule sees smooth pieces.
  const auto pair = laplace(1.0, 1.0);
  const auto integrand = [&](double x) {
    const double lp = pair.log_density_first(x);
    return std::exp(lp) * (lp - pair.log_density_second(x));
  };
  const double simpson = oracles::simpson(integrand, -40, 0, 200000) +
                         oracles::simpson(integrand, 0, 1, 20000) +
                         oracles::simpson(integrand, 1, 41, 200000);
  CHECK(simpson == doctest::Approx(0.36787944117144233).epsilon(1e-9));
  CHECK(analytic_kl(pair) == doctest::Approx(simpson).epsilon(1e-9));
}

TEST_CASE("gaussian renyi closed form matches Monte Carlo") {
  // D_alpha = ln E_q[(p/q)^alpha] / (alpha - 1), sampled under q.
  const auto pair = gaussian(2.0, 2.0);
  const double alpha = 3.0;
  std::mt19937_64 gen(99);
  std::normal_distribution<double> q(pair.loc2, pair.scale);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double x = q(gen);
    sum += std::exp(alpha * (pair.log_density_first(x) - pair.log_density_second(x)));
  }
  const double mc = std::log(sum / n) / (alpha - 1.0);
  CHECK(mc == doctest::Approx(1.5).epsilon(0.02));
  CHECK(analytic_renyi(pair, alpha) == doctest::Approx(mc).epsilon(0.02));
}

TEST_CASE("numeric kl of the identity cases") {
  CHECK(std::abs(numeric_kl(laplace(0.0, 1.0))) <= 1e-8);
  CHECK(std::abs(numeric_kl(gaussian(0.0, 2.0))) <= 1e-8);
  CHECK(numeric_kl(gaussian(1.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(numeric_kl(laplace(1.0, 1.0)) == doctest::Approx(0.36787944117144233).epsilon(1e-8));
}

TEST_CASE("numeric and analytic agree on random pairs") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> loc(-3.0, 3.0), scale(0.2, 3.0);
  for (int i = 0; i < 20; ++i) {
    const Family f = i % 2 ? Family::Gaussian : Family::Laplace;
    const AnalyticPair pair{f, loc(gen), loc(gen), scale(gen)};
    CHECK(std::abs(numeric_kl(pair) - analytic_kl(pair)) <= 1e-6);
    if (f == Family::Gaussian) {
      CHECK(std::abs(numeric_renyi(pair, 2.5) - analytic_renyi(pair, 2.5)) <= 1e-6);
    }
  }
}

TEST_CASE("laplace mechanism kl sits below the kl bound") {
  for (double eps = 0.0; eps <= 5.0 + 1e-12; eps += 0.05) {
    const double closed = eps + std::exp(-eps) - 1.0;
    CHECK(closed <= kl_bound(in(eps)).value);
    if (eps > 0.0) {
      CHECK(analytic_kl(laplace(1.0, 1.0 / eps)) <= kl_bound(in(eps)).value);
    }
  }
}

TEST_CASE("tv and the Bretagnolle-Huber bound") {
  CHECK(bh_tv_bound(0.0) == 0.5);
  CHECK(bh_tv_bound(std::numbers::ln2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(bh_tv_bound(1e6) == 1.0);
  CHECK_THROWS_AS(bh_tv_bound(-0.1), Error);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> loc(-2.0, 2.0), scale(0.3, 2.0);
  for (int i = 0; i < 20; ++i) {
    const AnalyticPair pair{Family::Laplace, loc(gen), loc(gen), scale(gen)};
    const double tv = numeric_tv(pair);
    // Laplace TV in closed form: 1 - exp(-|delta| / (2b)).
    const double closed = 1.0 - std::exp(-std::abs(pair.loc1 - pair.loc2) / (2.0 * pair.scale));
    CHECK(tv == doctest::Approx(closed).epsilon(1e-7));
    CHECK(tv <= bh_tv_bound(numeric_kl(pair)));
    CHECK(bh_tv_bound(numeric_kl(pair)) < 1.0);
  }
}

TEST_CASE("tensorized kl") {
  CHECK(tensorized_kl(0.5, 1) == 0.5);
  CHECK(tensorized_kl(0.5, 4) == 2.0);
  CHECK_THROWS_AS(tensorized_kl(0.5, 0), Error);
}

TEST_CASE("three-fold product laplace kl is three times the single kl") {
  // Nested adaptive quadrature over the product density.
  const auto pair = laplace(0.7, 1.0);
  const double lo = -25.0, hi = 25.7;
  const std::vector<double> kinks{0.0, 0.7};
  const auto log_ratio = [&](double x) {
    return pair.log_density_first(x) - pair.log_density_second(x);
  };
  const auto p = [&](double x) { return std::exp(pair.log_density_first(x)); };
  const double tol = 1e-10;
  const double kl3 =
      integrate([&](double x) {
        return p(x) * integrate([&](double y) {
                 return p(y) * integrate([&](double z) {
                          return p(z) * (log_ratio(x) + log_ratio(y) + log_ratio(z));
                        }, lo, hi, tol, kinks).value;
               }, lo, hi, tol, kinks).value;
      }, lo, hi, 1e-9, kinks).value;
  CHECK(kl3 == doctest::Approx(tensorized_kl(analytic_kl(pair), 3)).epsilon(1e-6));
}

TEST_CASE("quadrature basics") {
  const auto r = integrate([](double x) { return x * x; }, 0.0, 3.0);
  CHECK(r.value == doctest::Approx(9.0).epsilon(1e-14));
  const auto kink = integrate([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0);
  CHECK(kink.value == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-9));
  // A jump discontinuity cannot be resolved to 1e-30 within the depth cap.
  try {
    integrate([](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; }, 0.0, 1.0, 1e-30);
    FAIL("expected non_convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_convergence);
  }
}
