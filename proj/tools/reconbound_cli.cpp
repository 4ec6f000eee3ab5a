// Command-line front end: epsilon sweeps, bound curves, finite-channel oracle and
// covering numbers.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reconbound/bounds.hpp"
#include "reconbound/error.hpp"
#include "reconbound/harness.hpp"
#include "reconbound/metric_space.hpp"
#include "reconbound/oracle.hpp"
#include "reconbound/report.hpp"

namespace {

using namespace reconbound;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDominance = 3;
constexpr int kExitIo = 4;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::io:
    case ErrorCode::bad_format:
    case ErrorCode::digit_absent:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

struct SweepArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<std::string> mechanism;
  std::optional<std::string> eps_grid;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  bool noiseless = false;
};

int run_sweep_command(const SweepArgs& a) {
  harness::SweepConfig config;
  config.eps_grid = harness::parse_eps_grid("0.1:5:0.35");
  if (!a.config.empty()) config = harness::load_config_file(a.config, config);
  if (a.seed) config.seed = *a.seed;
  if (a.mechanism) config.mechanism_kind = harness::parse_mechanism(*a.mechanism);
  if (a.eps_grid) config.eps_grid = harness::parse_eps_grid(*a.eps_grid);
  if (a.trials) config.trials = *a.trials;
  if (a.threads) config.threads = *a.threads;
  if (a.noiseless) config.noiseless = true;

  const auto result = harness::run_sweep(config);
  const std::filesystem::path out(a.out);
  report::write_text(out / "sweep.csv", report::emit_csv(result));
  report::write_text(out / "sweep.svg", report::emit_svg(result));
  std::cout << "wrote " << (out / "sweep.csv").string() << " and "
            << (out / "sweep.svg").string() << "\n";

  if (config.noiseless) {
    std::cout << "noiseless release: privacy bounds do not apply, audit skipped\n";
    return kExitOk;
  }
  const auto dominance = harness::check_dominance(result);
  for (const auto& note : dominance.undetermined) {
    std::cerr << "warning: " << note << "\n";
  }
  for (const auto& v : dominance.violations) {
    std::cerr << "dominance violation: " << v << "\n";
  }
  if (!dominance.ok()) return kExitDominance;
  std::cout << "dominance holds at all " << result.rows.size()
            << " grid points\n";
  return kExitOk;
}

struct BoundsArgs {
  std::string eps_grid = "0.1:5:0.35";
  std::size_t dim = 16;
  std::size_t n = 1;
  double delta = 0.0;
  std::optional<double> alpha;
  double diam = 2.0;
  std::string out;
};

int run_bounds_command(const BoundsArgs& a) {
  const auto grid = harness::parse_eps_grid(a.eps_grid);
  bounds::BoundQuery q;
  q.diam = a.diam;
  // Each coordinate of a ball of diameter `diam` spans `diam`.
  q.coord_diam_sq_sum = static_cast<double>(a.dim) * a.diam * a.diam;
  q.n = a.n;
  q.params.delta = a.delta;
  q.params.alpha = a.alpha;
  q.d_eff = metric::effective_dimension_normed(a.dim);
  const double trivial = a.diam * a.diam;

  std::vector<report::BoundCurvePoint> points;
  const auto add = [&](double eps, const char* name, bounds::BoundValue v) {
    points.push_back({eps, name, v, bounds::validity_check(v, trivial)});
  };
  for (double eps : grid) {
    q.params.eps = eps;
    q.params.eps_metric = eps;
    add(eps, "thm1", {bounds::thm1_dp_bound(q), false});
    if (a.alpha) add(eps, "renyi_dp", {bounds::renyi_dp_bound(q), false});
    add(eps, "guo", bounds::guo_bound(q));
    add(eps, "thm2", bounds::thm2_mdp_bound(q));
    if (a.dim >= 2) add(eps, "thm3", bounds::thm3_highdim_bound(q));
  }
  const std::string csv = report::emit_bound_curve_csv(points);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    report::write_text(a.out, csv);
    std::cout << "wrote " << a.out << "\n";
  }
  std::printf("guo validity threshold for d=%zu: %.6f\n", a.dim,
              bounds::guo_validity_threshold(a.dim));
  return kExitOk;
}

struct OracleArgs {
  double eps = 1.0;
  std::size_t n = 1;
  double sep = 1.0;
  std::string channel;
  std::string space;
};

int run_oracle_command(const OracleArgs& a) {
  std::optional<oracle::FiniteMechanism> mech;
  if (a.channel.empty()) {
    mech = oracle::randomized_response(a.eps);
  } else {
    mech = oracle::load_channel_file(a.channel);
  }
  const std::size_t m = mech->input_count();
  metric::FiniteMetricSpace space = [&] {
    if (!a.space.empty()) return metric::load_matrix_file(a.space);
    // Discrete metric scaled by the separation.
    std::vector<double> dist(m * m, a.sep);
    for (std::size_t i = 0; i < m; ++i) dist[i * m + i] = 0.0;
    return metric::FiniteMetricSpace::from_matrix(m, std::move(dist));
  }();

  std::printf("inputs=%zu outcomes=%zu n=%zu\n", m, mech->outcome_count(), a.n);
  std::printf("dp_epsilon=%.17g\n", oracle::dp_epsilon_of(*mech));
  std::printf("exact_bayes_risk=%.17g\n", oracle::exact_bayes_risk(*mech, space, a.n));
  if (m == 2) {
    const auto r = oracle::lecam_certificate(*mech, space, a.n);
    std::printf("tv=%.17g kl=%.17g\nlecam_bound=%.17g\nbh_bound=%.17g\n"
                "thm1_bound=%.17g\nchain_holds=%s\n",
                r.tv, r.kl, r.lecam_bound, r.bh_bound, r.thm1_bound,
                r.holds ? "true" : "false");
  } else if (m >= 3) {
    const auto r = oracle::fano_certificate(*mech, space, a.n);
    std::printf("mutual_information=%.17g\nfano_bound=%.17g\n"
                "exact_identification_error=%.17g\nholds=%s\n",
                r.mutual_information, r.fano_bound, r.exact_error,
                r.holds ? "true" : "false");
  }
  return kExitOk;
}

struct CoveringArgs {
  std::string space;
  std::size_t dim = 1;
  std::string norm = "L2";
  double spacing = 0.5;
  double eta = 0.5;
  std::size_t cap = metric::kDefaultExhaustiveCap;
};

int run_covering_command(const CoveringArgs& a) {
  if (!a.space.empty()) {
    const auto space = metric::load_matrix_file(a.space);
    std::printf("points=%zu diameter=%.17g\n", space.size(), metric::diameter(space));
    std::printf("covering(%g)=%zu\n", a.eta, metric::covering_number(space, a.eta, a.cap));
    std::printf("packing(%g)=%zu\n", a.eta, metric::packing_number(space, a.eta, a.cap));
    return kExitOk;
  }
  const auto ball = metric::discretize_unit_ball(a.dim, metric::parse_norm(a.norm),
                                                 a.spacing);
  const auto& space = ball.space;
  const auto b = metric::norm_ball_covering_bounds(a.dim, a.eta);
  std::printf("grid points=%zu spacing=%g norm=%s dim=%zu\n", space.size(),
              ball.spacing, metric::to_string(ball.norm), ball.dim);
  std::printf("covering(%g)=%zu within [%.6g, %.6g]\n", a.eta,
              metric::covering_number(space, a.eta, a.cap), b.lower, b.upper);
  std::printf("packing(%g)=%zu\n", a.eta, metric::packing_number(space, a.eta, a.cap));
  const auto d_eff = metric::effective_dimension(ball, a.cap);
  std::printf("effective_dimension=%.17g (N(1/2)=%zu, closed form d ln 2 = %.17g)\n",
              d_eff.value, d_eff.covering, metric::effective_dimension_normed(a.dim));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction-risk lower bounds, attacks and audits"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "run an epsilon sweep and audit dominance");
  sweep->add_option("--config", sweep_args.config, "key = value config file");
  sweep->add_option("--seed", sweep_args.seed, "master seed");
  sweep->add_option("--out", sweep_args.out, "output directory");
  sweep->add_option("--mechanism", sweep_args.mechanism,
                    "OUTPUT_PERTURB_DP, OUTPUT_PERTURB_MDP, PNSGD_DP or PNSGD_MDP");
  sweep->add_option("--eps-grid", sweep_args.eps_grid, "a:b:step");
  sweep->add_option("--trials", sweep_args.trials, "trials per grid point");
  sweep->add_option("--threads", sweep_args.threads, "worker threads (0 = all cores)");
  sweep->add_flag("--noiseless", sweep_args.noiseless, "release the exact minimizer");

  BoundsArgs bounds_args;
  auto* bounds_cmd = app.add_subcommand("bounds", "tabulate lower bounds over epsilon");
  bounds_cmd->add_option("--eps-grid", bounds_args.eps_grid, "a:b:step");
  bounds_cmd->add_option("--dim", bounds_args.dim, "feature dimension");
  bounds_cmd->add_option("--n", bounds_args.n, "released models per attack");
  bounds_cmd->add_option("--delta", bounds_args.delta, "delta");
  bounds_cmd->add_option("--alpha", bounds_args.alpha, "Renyi order");
  bounds_cmd->add_option("--diam", bounds_args.diam, "domain diameter");
  bounds_cmd->add_option("--out", bounds_args.out, "CSV path (stdout if omitted)");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact Bayes risk of a finite channel");
  oracle_cmd->add_option("--eps", oracle_args.eps, "randomized response epsilon");
  oracle_cmd->add_option("--n", oracle_args.n, "independent channel uses");
  oracle_cmd->add_option("--sep", oracle_args.sep, "separation of the inputs");
  oracle_cmd->add_option("--channel", oracle_args.channel, "channel file (m k, then rows)");
  oracle_cmd->add_option("--space", oracle_args.space, "distance matrix file");

  CoveringArgs covering_args;
  auto* covering = app.add_subcommand("covering", "covering and packing numbers");
  covering->add_option("--space", covering_args.space, "distance matrix file");
  covering->add_option("--dim", covering_args.dim, "unit ball dimension");
  covering->add_option("--norm", covering_args.norm, "L1, L2 or LINF");
  covering->add_option("--spacing", covering_args.spacing, "grid spacing");
  covering->add_option("--eta", covering_args.eta, "radius");
  covering->add_option("--cap", covering_args.cap, "exhaustive search size limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_command(sweep_args);
    if (*bounds_cmd) return run_bounds_command(bounds_args);
    if (*oracle_cmd) return run_oracle_command(oracle_args);
    if (*covering) return run_covering_command(covering_args);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitConfig;
}
