#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "reconbound/bounds.hpp"
#include "reconbound/error.hpp"
#include "reconbound/report.hpp"

using namespace reconbound;
using namespace reconbound::bounds;

namespace {

BoundQuery query(double eps, double diam = 1.0, std::size_t n = 1,
                 double delta = 0.0) {
  BoundQuery q;
  q.diam = diam;
  q.n = n;
  q.params.eps = eps;
  q.params.eps_metric = eps;
  q.params.delta = delta;
  return q;
}

}  // namespace

TEST_CASE("thm1 values") {
  for (std::size_t n : {1u, 5u, 40u}) {
    CHECK(thm1_dp_bound(query(0.0, 2.0, n)) == 0.25);
  }
  CHECK(thm1_dp_bound(query(1.0, 1.0, 1, 1.0)) == 0.0);
  CHECK(thm1_dp_bound(query(1.0)) ==
        doctest::Approx(std::exp(-std::tanh(0.5)) / 16).epsilon(1e-15));
  CHECK(thm1_dp_bound(query(1.0)) == doctest::Approx(0.03944).epsilon(1e-4));
  BoundQuery q = query(1.0);
  q.c_lecam = 0.5;
  CHECK(thm1_dp_bound(q) == doctest::Approx(8 * thm1_dp_bound(query(1.0))));
}

TEST_CASE("thm1 is capped and monotone") {
  for (double delta : {0.0, 0.3}) {
    double prev_eps = INFINITY;
    for (double eps = 0.0; eps < 8.0; eps += 0.1) {
      const double v = thm1_dp_bound(query(eps, 3.0, 2, delta));
      CHECK(v <= 9.0 / 16 * (1 - delta));
      CHECK(v <= prev_eps);
      prev_eps = v;
      CHECK(thm1_dp_bound(query(eps, 3.0, 3, delta)) <= v);
    }
  }
}

TEST_CASE("renyi dp bound") {
  BoundQuery q = query(0.0, 2.0);
  q.params.alpha = 2.0;
  CHECK(renyi_dp_bound(q) == 0.25);
  q = query(0.1);
  q.params.alpha = 2.0;
  CHECK(renyi_dp_bound(q) == doctest::Approx(std::exp(-0.03) / 16).epsilon(1e-14));
  CHECK(renyi_dp_bound(q) == doctest::Approx(0.06065).epsilon(1e-4));
  q = query(2.0, 1.0, 3);
  q.params.alpha = 2.0;
  CHECK(renyi_dp_bound(q) == doctest::Approx(std::exp(-6.0) / 16).epsilon(1e-14));
  try {
    renyi_dp_bound(query(1.0));
    FAIL("expected missing_alpha");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_alpha);
  }
}

TEST_CASE("thm2 values, sentinel and optimizer") {
  CHECK(thm2_mdp_bound(query(1.0)).value ==
        doctest::Approx(1 / (2 * std::numbers::e)).epsilon(1e-15));
  CHECK(thm2_mdp_bound(query(1.0)).value == doctest::Approx(0.18394).epsilon(1e-4));
  CHECK(thm2_mdp_bound(query(0.7, 1.0, 2)).value * 2 ==
        doctest::Approx(thm2_mdp_bound(query(0.7)).value).epsilon(1e-15));
  const auto inf = thm2_mdp_bound(query(0.0));
  CHECK(inf.unbounded);
  CHECK(std::isinf(inf.value));

  for (std::size_t n : {1u, 3u, 10u}) {
    for (double e : {0.2, 1.0, 2.5}) {
      const double nn = static_cast<double>(n);
      const auto neg = [&](double t) { return -(t * t / 4) * std::exp(-nn * e * e * t * t / 2); };
      const double t_star = oracles::golden_min(neg, 0.0, 20.0 / e);
      CHECK(t_star == doctest::Approx(std::sqrt(2.0 / nn) / e).epsilon(1e-6));
      CHECK(-neg(t_star) == doctest::Approx(thm2_mdp_bound(query(e, 1.0, n)).value).epsilon(1e-10));
    }
  }
}

TEST_CASE("thm3 closed form") {
  BoundQuery q = query(1.0, 1.0, 2);
  q.d_eff = 2 * std::numbers::ln2;
  CHECK(thm3_highdim_bound(q).value ==
        doctest::Approx(std::numbers::ln2 / (16 * 2)).epsilon(1e-14));
  q.d_eff = std::numbers::ln2;
  try {
    thm3_highdim_bound(q);
    FAIL("expected degenerate_dimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_dimension);
  }
  q.d_eff = 1e9;
  const double one = thm3_highdim_bound(q).value;
  q.d_eff = 2e9;
  CHECK(thm3_highdim_bound(q).value / one == doctest::Approx(2.0).epsilon(1e-8));
  q.params.eps_metric = 0.0;
  CHECK(thm3_highdim_bound(q).unbounded);
}

TEST_CASE("thm3 matches numeric maximization of the Fano expression") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    BoundQuery q = query(0.05 + 3 * u(gen), 1.0, 1 + static_cast<std::size_t>(20 * u(gen)));
    q.d_eff = std::numbers::ln2 + 0.01 + 50 * u(gen);
    q.params.delta = 0.2 * u(gen);
    const double t_max = std::sqrt(q.d_eff / (2 * q.n)) / q.params.eps_metric;
    const double t = oracles::golden_min([&](double s) { return -thm3_objective(q, s); }, 0.0, t_max);
    CHECK(std::abs(thm3_objective(q, t) - thm3_highdim_bound(q).value) <=
          1e-8 * std::max(1.0, thm3_highdim_bound(q).value));
  }
}

TEST_CASE("thm2 and thm3 decrease in n and eps; constant d_eff recovers thm2") {
  for (std::size_t n = 1; n < 30; ++n) {
    for (double e = 0.1; e < 4; e += 0.1) {
      BoundQuery q = query(e, 1.0, n);
      q.d_eff = 2 * std::numbers::ln2;
      BoundQuery more_n = q, more_e = q;
      more_n.n = n + 1;
      more_e.params.eps_metric = e + 0.1;
      CHECK(thm2_mdp_bound(more_n).value < thm2_mdp_bound(q).value);
      CHECK(thm2_mdp_bound(more_e).value < thm2_mdp_bound(q).value);
      CHECK(thm3_highdim_bound(more_n).value < thm3_highdim_bound(q).value);
      CHECK(thm3_highdim_bound(more_e).value < thm3_highdim_bound(q).value);
      const double ratio = thm3_highdim_bound(q).value / thm2_mdp_bound(q).value;
      CHECK(ratio >= 1 / (8 * std::numbers::e));
      CHECK(ratio <= 8 * std::numbers::e);
      CHECK(ratio == doctest::Approx(std::numbers::ln2 * std::numbers::e / 8).epsilon(1e-12));
    }
  }
}

TEST_CASE("guo bound and threshold") {
  BoundQuery q = query(std::numbers::ln2);
  q.coord_diam_sq_sum = 4;
  CHECK(guo_bound(q).value == doctest::Approx(1.0).epsilon(1e-15));
  q.params.eps = 0.0;
  CHECK(guo_bound(q).unbounded);
  q.params.eps = INFINITY;
  CHECK(guo_bound(q).value == 0.0);
  q.params.eps = 700.0;
  CHECK(guo_bound(q).value < 1e-300);

  CHECK(guo_validity_threshold(784) == doctest::Approx(std::log(197.0)).epsilon(1e-15));
  CHECK(guo_validity_threshold(784) == doctest::Approx(5.283).epsilon(1e-3));
  CHECK(guo_validity_threshold(4) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));

  BoundQuery unit = query(5.283);
  unit.coord_diam_sq_sum = 784;
  CHECK(guo_bound(unit).value == doctest::Approx(1.0).epsilon(1e-3));
  for (std::size_t d : {1u, 16u, 784u}) {
    BoundQuery b = query(guo_validity_threshold(d) - 1e-3);
    b.coord_diam_sq_sum = static_cast<double>(d);
    CHECK(guo_bound(b).value > 1.0);
    b.params.eps = guo_validity_threshold(d) + 1e-3;
    CHECK(guo_bound(b).value <= 1.0);
  }
}

TEST_CASE("validity flags") {
  CHECK(validity_check(0.5, 1.0) == Validity::valid);
  CHECK(validity_check(2.0, 1.0) == Validity::vacuous);
  CHECK(validity_check(1.0, 1.0) == Validity::valid);
  BoundQuery q = query(3.0);
  q.coord_diam_sq_sum = 784;
  CHECK(validity_check(guo_bound(q), 1.0) == Validity::vacuous);
  CHECK(validity_check(BoundValue{INFINITY, true}, 1.0) == Validity::vacuous);
  CHECK(std::string(to_string(Validity::vacuous)) == "VACUOUS");
}

TEST_CASE("dimension-over-square dominates the prior bound") {
  for (double t = 0.01; t <= 10.0; t += 0.01) {
    CHECK(16 / (t * t) >= 16 / std::expm1(t));
  }
}

TEST_CASE("queries are validated") {
  CHECK_THROWS_AS(thm1_dp_bound(query(1.0, 1.0, 0)), Error);
  CHECK_THROWS_AS(thm1_dp_bound(query(-1.0)), Error);
  CHECK_THROWS_AS(thm1_dp_bound(query(1.0, INFINITY)), Error);
  CHECK_THROWS_AS(guo_validity_threshold(0), Error);
}

TEST_CASE("bound curve csv") {
  const std::vector<report::BoundCurvePoint> pts{
      {0.0, "guo", {INFINITY, true}, Validity::vacuous},
      {1.5, "thm1", {0.125, false}, Validity::valid}};
  CHECK(report::emit_bound_curve_csv(pts) ==
        "epsilon,bound_name,value,validity_flag\n0,guo,NA,UNBOUNDED\n"
        "1.5,thm1,0.125,VALID\n");
}
