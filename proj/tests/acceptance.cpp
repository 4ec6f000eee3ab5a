#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "reconbound/attack.hpp"
#include "reconbound/bounds.hpp"
#include "reconbound/divergence.hpp"
#include "reconbound/error.hpp"
#include "reconbound/harness.hpp"
#include "reconbound/mechanisms.hpp"
#include "reconbound/metric_space.hpp"
#include "reconbound/oracle.hpp"
#include "reconbound/pnsgd.hpp"
#include "reconbound/report.hpp"
#include "reconbound/rng.hpp"

using namespace reconbound;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Records the first failing check and keeps going.
struct Checker {
  Outcome out;
  void expect(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

bounds::BoundQuery dp_query(double diam, std::size_t n, double eps) {
  bounds::BoundQuery q;
  q.diam = diam;
  q.n = n;
  q.params.eps = eps;
  return q;
}

metric::FiniteMetricSpace two_points(double sep) {
  return metric::FiniteMetricSpace::from_matrix(2, {0.0, sep, sep, 0.0});
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome guo_threshold() {
  Checker c;
  const double th = bounds::guo_validity_threshold(784);
  c.expect(std::abs(th - 5.283) <= 0.005, "threshold " + num(th));
  bounds::BoundQuery q = dp_query(1.0, 1, 1.0);
  q.coord_diam_sq_sum = 784;  // unit ball: per-coordinate diameters sum to d
  for (double eps : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    q.params.eps = eps;
    c.expect(bounds::validity_check(bounds::guo_bound(q), 1.0) == bounds::Validity::vacuous,
             "expected VACUOUS at eps=" + num(eps));
  }
  for (double eps : {5.5, 6.0}) {
    q.params.eps = eps;
    c.expect(bounds::validity_check(bounds::guo_bound(q), 1.0) == bounds::Validity::valid,
             "expected VALID at eps=" + num(eps));
  }
  if (c.out.pass) c.out.detail = "threshold " + num(th);
  return c.out;
}

Outcome oracle_dominance() {
  Checker c;
  const auto space = two_points(1.0);
  std::size_t points = 0;
  for (int k = 0; k <= 20; ++k) {
    const double eps = 0.25 * k;
    const auto mech = oracle::randomized_response(eps);
    for (std::size_t n : {1u, 2u, 3u}) {
      const double risk = oracle::exact_bayes_risk(mech, space, n);
      const double bound = bounds::thm1_dp_bound(dp_query(1.0, n, eps));
      c.expect(risk >= bound, "eps=" + num(eps) + " n=" + std::to_string(n) + ": " +
                                  num(risk) + " < " + num(bound));
      ++points;
    }
  }
  if (c.out.pass) c.out.detail = std::to_string(points) + " points";
  return c.out;
}

Outcome tightness_at_zero() {
  Checker c;
  for (double diam : {1.0, 2.0, 3.7}) {
    const double risk = oracle::exact_bayes_risk(oracle::randomized_response(0.0),
                                                 two_points(diam), 1);
    const double ratio = risk / bounds::thm1_dp_bound(dp_query(diam, 1, 0.0));
    c.expect(std::abs(ratio - 8.0) <= 1e-10, "ratio " + num(ratio) + " at diam " + num(diam));
  }
  if (c.out.pass) c.out.detail = "ratio 8";
  return c.out;
}

Outcome divergence_soundness() {
  Checker c;
  double min_margin = INFINITY;
  for (int k = 1; k <= 50; ++k) {
    const double eps = 0.1 * k;
    divergence::DivergenceBoundInput in;
    in.eps = eps;
    const double bound = divergence::kl_bound(in).value;
    // Unit sensitivity: Laplace at scale 1/eps, Gaussian at the DP calibration.
    const divergence::AnalyticPair lap{divergence::Family::Laplace, 0.0, 1.0, 1.0 / eps};
    const divergence::AnalyticPair gau{divergence::Family::Gaussian, 0.0, 1.0,
                                       mechanisms::gaussian_dp_sigma(1.0, eps, 1e-5)};
    for (const auto& pair : {lap, gau}) {
      const double kl = divergence::numeric_kl(pair);
      min_margin = std::min(min_margin, bound - kl);
      c.expect(kl <= bound, "numeric KL " + num(kl) + " > bound " + num(bound) +
                                " at eps=" + num(eps));
    }
  }
  RandomStream rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto family = i % 2 ? divergence::Family::Gaussian : divergence::Family::Laplace;
    const divergence::AnalyticPair p{family, 4 * rng.uniform() - 2, 4 * rng.uniform() - 2,
                                     0.2 + 2 * rng.uniform()};
    const double a = divergence::analytic_kl(p), n = divergence::numeric_kl(p);
    c.expect(std::abs(a - n) <= 1e-6, "analytic " + num(a) + " vs numeric " + num(n));
  }
  if (c.out.pass) c.out.detail = "min margin " + num(min_margin);
  return c.out;
}

Outcome attack_exactness() {
  Checker c;
  RandomStream pick(2718);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 20 + pick.below(181);
    const std::size_t d = 1 + pick.below(32);
    auto problem = harness::generate_synthetic(n, d, 500 + i);
    // lambda = 1 keeps |theta| below the margin where a second root can
    // enter the unit ball, so the inversion is unambiguous.
    problem.lambda = 1.0;
    problem.tolerance = 1e-12;
    const auto theta = train_logreg_exact(problem).theta;
    const std::size_t j = n - 1;
    const Dataset d_minus = problem.data.without(j);
    attack::GlmAttackParams params;
    params.lambda = problem.lambda;
    params.n_train = n;
    const auto rec = attack::glm_reconstruct(theta, d_minus, problem.data.y[j], params);
    const auto x = problem.data.row(j);
    const double err = metric::norm_distance(rec.x_hat, x, metric::NormTag::L2) /
                       metric::norm_distance(x, std::vector<double>(d, 0.0), metric::NormTag::L2);
    worst = std::max(worst, err);
    c.expect(err < 1e-6, "relative error " + num(err) + " at N=" + std::to_string(n) +
                             " d=" + std::to_string(d));
  }
  if (c.out.pass) c.out.detail = "worst relative error " + num(worst);
  return c.out;
}

harness::SweepConfig desk(harness::MechanismKind kind) {
  harness::SweepConfig c;
  c.eps_grid = harness::parse_eps_grid("0.1:5:0.35");
  c.trials = 50;
  c.mechanism_kind = kind;
  c.n_samples = 2000;
  c.dim = 16;
  c.lambda = 1e-2;
  c.attack_samples = 1;
  c.seed = 1;
  return c;
}

std::size_t column(const harness::SweepResult& r, const std::string& name) {
  for (std::size_t i = 0; i < r.bound_names.size(); ++i) {
    if (r.bound_names[i] == name) return i;
  }
  fail(ErrorCode::invalid_argument, "missing bound column " + name);
}

std::string dp_csv, mdp_csv;

Outcome figure_one_analogue() {
  Checker c;
  const auto dp = harness::run_sweep(desk(harness::MechanismKind::OUTPUT_PERTURB_DP));
  const auto mdp = harness::run_sweep(desk(harness::MechanismKind::OUTPUT_PERTURB_MDP));
  dp_csv = report::emit_csv(dp);
  mdp_csv = report::emit_csv(mdp);
  c.expect(dp.rows.size() == 14 && mdp.rows.size() == 14, "grid size");

  const std::size_t t1 = column(dp, "thm1");
  for (const auto& row : dp.rows) {
    c.expect(!std::isnan(row.mean_mse), "DP row without successes at eps=" + num(row.epsilon));
    c.expect(row.mean_mse >= row.bounds[t1].value,
             "DP mean " + num(row.mean_mse) + " < thm1 at eps=" + num(row.epsilon));
  }
  for (const auto& name : {"thm2", "thm3"}) {
    const std::size_t b = column(mdp, name);
    for (const auto& row : mdp.rows) {
      c.expect(!std::isnan(row.mean_mse), "mDP row without successes at eps=" + num(row.epsilon));
      c.expect(row.mean_mse >= row.bounds[b].value,
               "mDP mean " + num(row.mean_mse) + " < " + name + " at eps=" + num(row.epsilon));
    }
  }
  c.expect(harness::check_dominance(dp).ok() && harness::check_dominance(mdp).ok(),
           "dominance audit reported a violation");

  for (double eps : desk(harness::MechanismKind::OUTPUT_PERTURB_MDP).eps_grid) {
    bounds::BoundQuery q = dp_query(2.0, 1, 0.0);
    q.params.eps_metric = eps;
    q.d_eff = metric::effective_dimension_normed(16);
    const double t2 = bounds::thm2_mdp_bound(q).value;
    const double t3 = bounds::thm3_highdim_bound(q).value;
    c.expect(t3 >= t2, "thm3 " + num(t3) + " < thm2 " + num(t2) + " at eps=" + num(eps));
  }
  if (c.out.pass) {
    c.out.detail = "DP mean MSE " + num(dp.rows.back().mean_mse) + " at eps " +
                   num(dp.rows.back().epsilon) + " vs thm1 " +
                   num(dp.rows.back().bounds[t1].value);
  }
  return c.out;
}

Outcome pnsgd_certificate() {
  Checker c;
  const std::size_t n = 100;
  const double eta = 0.5;
  const double diam = 2.0;  // samples in [0, 2]
  const double eps_metric = 0.7;
  // f(w, x) = (w - x)^2 / 2: gradient w - x, input-Lipschitz 1, and with no
  // active projection the final iterate is Gaussian with
  //   mean difference eta (1 - eta)^(n - t) (x_t - x_t'),
  //   variance eta^2 sigma^2 sum_{k<n} (1 - eta)^(2k).
  double geometric = 0.0;
  for (std::size_t k = 0; k < n; ++k) geometric += std::pow(1 - eta, 2.0 * k);
  double worst = 0.0;
  for (double alpha : {2.0, 8.0}) {
    for (std::size_t t : {std::size_t{1}, n / 2, n}) {
      const double sigma_sq = pnsgd::noise_for_renyi_mdp(alpha, eps_metric, 1.0, diam, n, t);
      for (double delta_x : {0.1, 1.0, 2.0}) {
        const double mean_diff = eta * std::pow(1 - eta, static_cast<double>(n - t)) * delta_x;
        const double var = eta * eta * sigma_sq * geometric;
        const double renyi = alpha * mean_diff * mean_diff / (2 * var);
        const double allowed = eps_metric * delta_x * delta_x;
        worst = std::max(worst, renyi / allowed);
        c.expect(renyi <= allowed * (1 + 1e-9),
                 "D_alpha " + num(renyi) + " > " + num(allowed) + " at alpha=" + num(alpha) +
                     " t=" + std::to_string(t));
      }
      // G = diam and L_input = 1 make the DP rule exactly diam times larger.
      const double dp_sq = pnsgd::noise_for_renyi_dp(alpha, eps_metric, diam, n, t);
      c.expect(std::abs(dp_sq / sigma_sq - diam) <= 1e-9 * diam,
               "sigma ratio " + num(dp_sq / sigma_sq));
    }
  }
  if (c.out.pass) c.out.detail = "largest D_alpha / allowance " + num(worst);
  return c.out;
}

Outcome covering_sandwich() {
  Checker c;
  struct Case {
    std::size_t dim;
    double spacing;
  };
  std::string summary;
  for (const Case& k : {Case{1, 0.125}, Case{1, 0.0625}, Case{2, 0.5}, Case{2, 0.25}}) {
    const auto ball = metric::discretize_unit_ball(k.dim, metric::NormTag::L2, k.spacing);
    for (double eta : {0.5, 1.0}) {
      const auto b = metric::norm_ball_covering_bounds(k.dim, eta);
      const auto cover = metric::covering_number(ball.space, eta, ball.space.size());
      const double nc = static_cast<double>(cover);
      c.expect(b.lower <= nc && nc <= b.upper,
               "N=" + num(nc) + " outside [" + num(b.lower) + ", " + num(b.upper) + "] d=" +
                   std::to_string(k.dim) + " eta=" + num(eta));
      summary += (summary.empty() ? "" : " ") + std::to_string(cover);
    }
  }
  if (c.out.pass) c.out.detail = "covers " + summary;
  return c.out;
}

Outcome determinism() {
  Checker c;
  const auto dp = report::emit_csv(harness::run_sweep(desk(harness::MechanismKind::OUTPUT_PERTURB_DP)));
  const auto mdp = report::emit_csv(harness::run_sweep(desk(harness::MechanismKind::OUTPUT_PERTURB_MDP)));
  c.expect(!dp_csv.empty() && dp == dp_csv, "DP CSV differs between runs");
  c.expect(!mdp_csv.empty() && mdp == mdp_csv, "mDP CSV differs between runs");
  if (c.out.pass) c.out.detail = std::to_string(dp.size() + mdp.size()) + " identical bytes";
  return c.out;
}

struct Criterion {
  int id;
  const char* name;
  double seconds_limit;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "guo threshold", 1.0, guo_threshold},
      {2, "oracle dominance", 10.0, oracle_dominance},
      {3, "tightness at eps=0", 1.0, tightness_at_zero},
      {4, "divergence bound soundness", 5.0, divergence_soundness},
      {5, "attack exactness", 30.0, attack_exactness},
      {6, "desk-scale sweep dominance", 180.0, figure_one_analogue},
      {7, "pnsgd metric certificate", 5.0, pnsgd_certificate},
      {8, "covering sandwich", 20.0, covering_sandwich},
      {9, "sweep determinism", 180.0, determinism},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= cr.seconds_limit) {
      out.pass = false;
      out.detail += " (over the " + num(cr.seconds_limit) + " s budget)";
    }
    failures += !out.pass;
    std::printf("%s %d %s: %s [%.3f s]\n", out.pass ? "PASS" : "FAIL", cr.id, cr.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
