#include "reconbound/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "reconbound/error.hpp"
#include "reconbound/idx.hpp"
#include "reconbound/mechanisms.hpp"
#include "reconbound/metric_space.hpp"
#include "reconbound/pnsgd.hpp"
#include "reconbound/rng.hpp"

namespace reconbound::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Domain of the samples: the unit L2 ball.
constexpr double kDomainRadius = 1.0;
// Stream tags for derive_seed, distinct from trial counters.
constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kBootstrapStream = 0xb007;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(ec == std::errc() && ptr == end && std::isfinite(v), ErrorCode::config,
          key + ": expected a number, got '" + text + "'");
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(ec == std::errc() && ptr == end, ErrorCode::config,
          key + ": expected a nonnegative integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCode::config, key + ": expected true or false, got '" + text + "'");
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_pnsgd(MechanismKind kind) {
  return kind == MechanismKind::PNSGD_DP || kind == MechanismKind::PNSGD_MDP;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Constants of f(w, (x, y)) = ln(1 + e^{-y w.x}) + (lambda/2)|w|^2 over the
// ball |w| <= radius with |x| <= 1.
struct PnsgdSetup {
  double beta;
  double G;
  double L_input;
  double diam;
};

PnsgdSetup pnsgd_setup(const SweepConfig& c) {
  return {0.25 + c.lambda, 1.0 + c.lambda * c.pnsgd_radius,
          1.0 + 0.25 * c.pnsgd_radius, 2.0 * kDomainRadius};
}

}  // namespace

MechanismKind parse_mechanism(const std::string& name) {
  std::string up = name;
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto kind : {MechanismKind::OUTPUT_PERTURB_DP, MechanismKind::OUTPUT_PERTURB_MDP,
                    MechanismKind::PNSGD_DP, MechanismKind::PNSGD_MDP}) {
    if (up == to_string(kind)) return kind;
  }
  fail(ErrorCode::config, "unknown mechanism '" + name + "'");
}

const char* to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::OUTPUT_PERTURB_DP: return "OUTPUT_PERTURB_DP";
    case MechanismKind::OUTPUT_PERTURB_MDP: return "OUTPUT_PERTURB_MDP";
    case MechanismKind::PNSGD_DP: return "PNSGD_DP";
    case MechanismKind::PNSGD_MDP: return "PNSGD_MDP";
  }
  return "?";
}

bool is_metric(MechanismKind kind) {
  return kind == MechanismKind::OUTPUT_PERTURB_MDP ||
         kind == MechanismKind::PNSGD_MDP;
}

void SweepConfig::validate() const {
  require(!eps_grid.empty(), ErrorCode::config, "eps grid is empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    require(std::isfinite(eps_grid[i]) && eps_grid[i] > 0.0, ErrorCode::config,
            "eps grid values must be finite and > 0");
    require(i == 0 || eps_grid[i] > eps_grid[i - 1], ErrorCode::config,
            "eps grid must be strictly increasing");
  }
  require(trials >= 1, ErrorCode::config, "trials must be >= 1");
  require(n_samples >= 2, ErrorCode::config, "n_samples must be >= 2");
  require(dim >= 1, ErrorCode::config, "dim must be >= 1");
  require(lambda > 0.0, ErrorCode::config, "lambda must be > 0");
  require(delta >= 0.0 && delta < 1.0, ErrorCode::config,
          "delta must lie in [0, 1)");
  require(!is_pnsgd(mechanism_kind) || delta > 0.0, ErrorCode::config,
          "PNSGD calibration needs delta > 0");
  require(!alpha || *alpha > 1.0, ErrorCode::config, "alpha must be > 1");
  require(attack_samples >= 1, ErrorCode::config, "attack_samples must be >= 1");
  require(train_tolerance > 0.0, ErrorCode::config,
          "train_tolerance must be > 0");
  require(bootstrap_resamples >= 1, ErrorCode::config,
          "bootstrap_resamples must be >= 1");
  require(pnsgd_radius > 0.0, ErrorCode::config, "pnsgd_radius must be > 0");
  require(challenge_position <= n_samples, ErrorCode::config,
          "challenge_position exceeds n_samples");
  if (dataset_source == DatasetSource::IDX_FILES) {
    require(!idx_images.empty() && !idx_labels.empty(), ErrorCode::config,
            "IDX source needs idx_images and idx_labels");
  }
}

std::vector<double> parse_eps_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream in(spec);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(trim(part));
  require(parts.size() == 3, ErrorCode::config,
          "eps grid must look like a:b:step, got '" + spec + "'");
  const double a = to_double("eps-grid", parts[0]);
  const double b = to_double("eps-grid", parts[1]);
  const double step = to_double("eps-grid", parts[2]);
  require(a > 0.0 && step > 0.0 && a < b, ErrorCode::config,
          "eps grid needs 0 < a < b and step > 0");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double v = a + static_cast<double>(k) * step;
    if (v >= b - 1e-9 * step) break;
    grid.push_back(v);
  }
  return grid;
}

void apply_setting(SweepConfig& c, const std::string& raw_key,
                   const std::string& raw_value) {
  const std::string key = lower(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "eps_grid") {
    c.eps_grid = parse_eps_grid(value);
  } else if (key == "trials") {
    c.trials = to_integer<std::size_t>(key, value);
  } else if (key == "mechanism") {
    c.mechanism_kind = parse_mechanism(value);
  } else if (key == "dataset") {
    const std::string v = lower(value);
    if (v == "synthetic") {
      c.dataset_source = DatasetSource::SYNTHETIC;
    } else if (v == "idx" || v == "idx_files") {
      c.dataset_source = DatasetSource::IDX_FILES;
    } else {
      fail(ErrorCode::config, "dataset must be synthetic or idx");
    }
  } else if (key == "n_samples") {
    c.n_samples = to_integer<std::size_t>(key, value);
  } else if (key == "dim") {
    c.dim = to_integer<std::size_t>(key, value);
  } else if (key == "seed") {
    c.seed = to_integer<std::uint64_t>(key, value);
  } else if (key == "lambda") {
    c.lambda = to_double(key, value);
  } else if (key == "delta") {
    c.delta = to_double(key, value);
  } else if (key == "alpha") {
    if (lower(value) == "none") {
      c.alpha.reset();
    } else {
      c.alpha = to_double(key, value);
    }
  } else if (key == "noiseless") {
    c.noiseless = to_bool(key, lower(value));
  } else if (key == "attack_samples") {
    c.attack_samples = to_integer<std::size_t>(key, value);
  } else if (key == "root_policy") {
    const std::string v = lower(value);
    if (v == "strict") {
      c.root_policy = attack::RootPolicy::strict;
    } else if (v == "closest") {
      c.root_policy = attack::RootPolicy::closest;
    } else {
      fail(ErrorCode::config, "root_policy must be strict or closest");
    }
  } else if (key == "train_tolerance") {
    c.train_tolerance = to_double(key, value);
  } else if (key == "bootstrap_resamples") {
    c.bootstrap_resamples = to_integer<std::size_t>(key, value);
  } else if (key == "threads") {
    c.threads = to_integer<std::size_t>(key, value);
  } else if (key == "idx_images") {
    c.idx_images = value;
  } else if (key == "idx_labels") {
    c.idx_labels = value;
  } else if (key == "digits") {
    const auto comma = value.find(',');
    require(comma != std::string::npos, ErrorCode::config,
            "digits must look like 0,1");
    c.digits = {to_integer<int>(key, trim(value.substr(0, comma))),
                to_integer<int>(key, trim(value.substr(comma + 1)))};
  } else if (key == "pnsgd_radius") {
    c.pnsgd_radius = to_double(key, value);
  } else if (key == "challenge_position") {
    c.challenge_position = to_integer<std::size_t>(key, value);
  } else {
    fail(ErrorCode::config, "unknown config key '" + raw_key + "'");
  }
}

SweepConfig parse_config_text(const std::string& text, SweepConfig base) {
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::config,
            "line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorCode::config,
           "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

SweepConfig load_config_file(const std::filesystem::path& path,
                             SweepConfig base) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), std::move(base));
}

LogRegProblem generate_synthetic(std::size_t n, std::size_t d,
                                 std::uint64_t seed) {
  require(d >= 1, ErrorCode::invalid_argument, "d must be >= 1");
  RandomStream rng(derive_seed(seed, kDataStream));
  std::vector<double> mu(d);
  rng.unit_vector(mu);
  LogRegProblem problem;
  problem.data.dim = d;
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.uniform() < 0.5 ? -1 : 1;
    for (std::size_t j = 0; j < d; ++j) x[j] = 0.5 * y * mu[j] + 0.3 * rng.normal();
    const double scale = 1.0 / std::max(1.0, std::sqrt(dot(x, x)));
    for (double& v : x) v *= scale;
    problem.data.push_back(x, y);
  }
  return problem;
}

std::vector<std::string> bound_names_for(MechanismKind kind, bool has_alpha) {
  if (is_metric(kind)) return {"thm2", "thm3"};
  std::vector<std::string> names{"thm1", "guo"};
  if (has_alpha) names.push_back("renyi_dp");
  return names;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                       std::size_t resamples, double level,
                                       std::uint64_t seed) {
  require(!samples.empty() && resamples >= 1, ErrorCode::invalid_argument,
          "bootstrap needs samples and at least one resample");
  require(level > 0.0 && level < 1.0, ErrorCode::invalid_argument,
          "confidence level must lie in (0, 1)");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  RandomStream rng(seed);
  std::vector<double> means(resamples);
  for (double& m : means) {
    double sum = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      sum += samples[rng.below(samples.size())];
    }
    m = sum / n;
  }
  std::sort(means.begin(), means.end());
  const auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  const double tail = 0.5 * (1.0 - level);
  return {std::min(quantile(tail), mean), std::max(quantile(1.0 - tail), mean)};
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const MechanismKind kind = config.mechanism_kind;

  LogRegProblem problem =
      config.dataset_source == DatasetSource::SYNTHETIC
          ? generate_synthetic(config.n_samples, config.dim, config.seed)
          : idx::load_idx(config.idx_images, config.idx_labels, config.digits);
  problem.lambda = config.lambda;
  problem.tolerance = config.train_tolerance;
  const Dataset& data = problem.data;
  const std::size_t N = data.size();
  const std::size_t d = data.dim;
  require(N >= 2, ErrorCode::config, "dataset has fewer than two samples");
  const std::size_t position =
      config.challenge_position == 0 ? N : std::min(config.challenge_position, N);

  // The full dataset is the same in every trial, so the exact minimizer is too.
  std::vector<double> theta;
  if (!is_pnsgd(kind)) theta = train_logreg_exact(problem).theta;

  const PnsgdSetup setup = pnsgd_setup(config);
  std::vector<std::optional<pnsgd::NoiseChoice>> noise(config.eps_grid.size());
  if (is_pnsgd(kind) && !config.noiseless) {
    for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
      const auto rule = [&](double alpha, double eps_r) {
        return kind == MechanismKind::PNSGD_DP
                   ? pnsgd::noise_for_renyi_dp(alpha, eps_r, setup.G, N, position)
                   : pnsgd::noise_for_renyi_mdp(alpha, eps_r, setup.L_input,
                                                setup.diam, N, position);
      };
      try {
        noise[e] = pnsgd::calibrate_noise(config.eps_grid[e], config.delta, rule);
      } catch (const Error&) {
        // No alpha on the grid reaches this eps; every trial here fails.
      }
    }
  }

  attack::GlmAttackParams attack_params;
  attack_params.lambda = config.lambda;
  attack_params.n_train = N;
  attack_params.policy = config.root_policy;
  attack_params.domain_radius = kDomainRadius;

  const auto run_trial = [&](std::size_t e, std::size_t t) -> double {
    const double eps = config.eps_grid[e];
    RandomStream rng(derive_seed(config.seed, e + 1, t));
    const std::size_t j = rng.below(N);
    attack::Sample challenge{{data.row(j).begin(), data.row(j).end()}, data.y[j]};
    auto model = attack::ThreatModel::make(data.without(j), std::move(challenge),
                                           config.attack_samples);

    attack::ReleaseFn release;
    if (!is_pnsgd(kind)) {
      const mechanisms::OutputPerturbationConfig op{N, config.lambda,
                                                    config.noiseless};
      release = [&, op, eps](RandomStream& r) {
        if (kind == MechanismKind::OUTPUT_PERTURB_DP) {
          PrivacyParams p;
          p.eps = eps;
          return mechanisms::output_perturb_dp(theta, p, op, r).value();
        }
        return mechanisms::output_perturb_mdp_euclidean(theta, eps, op, r).value();
      };
    } else {
      require(config.noiseless || noise[e].has_value(), ErrorCode::invalid_argument,
              "no alpha on the grid calibrates this eps");
      // Training order: d_minus with the challenge inserted at `position`.
      std::vector<std::size_t> order(N);
      for (std::size_t k = 0, src = 0; k < N; ++k) {
        if (k + 1 == position) {
          order[k] = j;
        } else {
          if (src == j) ++src;
          order[k] = src++;
        }
      }
      pnsgd::PNSGDConfig pc;
      pc.eta = 1.0 / setup.beta;
      pc.sigma = config.noiseless ? 0.0 : std::sqrt(noise[e]->sigma_sq);
      pc.w0.assign(d, 0.0);
      pc.constraint_radius = config.pnsgd_radius;
      pc.beta = setup.beta;
      pc.G = setup.G;
      pc.L_input = setup.L_input;
      pc.domain_diam = setup.diam;
      const double lambda = config.lambda;
      release = [&, pc, order = std::move(order), lambda](RandomStream& r) {
        const pnsgd::GradientFn grad = [&](std::span<const double> w,
                                           std::size_t s, std::span<double> out) {
          const std::size_t row = order[s];
          for (std::size_t k = 0; k < w.size(); ++k) out[k] = lambda * w[k];
          add_logistic_gradient(w, data.row(row), data.y[row], out);
        };
        return pnsgd::pnsgd_run(pc, N, grad, r);
      };
    }
    return attack::attack_average(model, release, attack_params, rng).mse;
  };

  // Worker pool over (eps index, trial index); results land in fixed slots.
  const std::size_t tasks = config.eps_grid.size() * config.trials;
  std::vector<double> mse(tasks, kNaN);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks;) {
      try {
        mse[k] = run_trial(k / config.trials, k % config.trials);
      } catch (const Error&) {
        // Recorded as a failure (NaN slot).
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads ? config.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
  }
  if (fatal) std::rethrow_exception(fatal);

  SweepResult result;
  result.bound_names = bound_names_for(kind, config.alpha.has_value());
  const double diam = 2.0 * kDomainRadius;
  const double trivial = diam * diam;
  const double delta_bound = is_pnsgd(kind) ? config.delta : 0.0;
  for (std::size_t e = 0; e < config.eps_grid.size(); ++e) {
    SweepRow row;
    row.epsilon = config.eps_grid[e];
    row.mechanism = kind;
    std::vector<double> ok;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const double v = mse[e * config.trials + t];
      if (std::isnan(v)) {
        ++row.failures;
      } else {
        ok.push_back(v);
      }
    }
    if (ok.empty()) {
      row.mean_mse = row.ci_low = row.ci_high = kNaN;
    } else {
      row.mean_mse = std::accumulate(ok.begin(), ok.end(), 0.0) /
                     static_cast<double>(ok.size());
      std::tie(row.ci_low, row.ci_high) =
          bootstrap_ci(ok, config.bootstrap_resamples, 0.95,
                       derive_seed(config.seed, kBootstrapStream, e));
    }

    bounds::BoundQuery q;
    q.diam = diam;
    q.coord_diam_sq_sum = static_cast<double>(d) * diam * diam;
    q.n = config.attack_samples;
    q.params.eps = row.epsilon;
    q.params.eps_metric = row.epsilon;
    q.params.delta = delta_bound;
    q.d_eff = metric::effective_dimension_normed(d);
    for (const std::string& name : result.bound_names) {
      BoundEntry b;
      if (name == "thm1") {
        b.value = bounds::thm1_dp_bound(q);
      } else if (name == "guo") {
        const auto v = bounds::guo_bound(q);
        b = {v.value, v.unbounded};
      } else if (name == "renyi_dp") {
        bounds::BoundQuery rq = q;
        rq.params.alpha = config.alpha;
        if (kind == MechanismKind::PNSGD_DP && noise[e]) {
          // The release is (alpha, eps_R)-Renyi DP at the calibrated order.
          rq.params.alpha = noise[e]->alpha;
          rq.params.eps = noise[e]->eps_renyi;
        }
        b.value = bounds::renyi_dp_bound(rq);
      } else if (name == "thm2") {
        const auto v = bounds::thm2_mdp_bound(q);
        b = {v.value, v.unbounded};
      } else if (name == "thm3") {
        if (q.d_eff > std::numbers::ln2) {
          const auto v = bounds::thm3_highdim_bound(q);
          b = {v.value, v.unbounded};
        } else {
          b = {kNaN, true};
        }
      }
      b.validity = b.unbounded ? bounds::Validity::vacuous
                               : bounds::validity_check(b.value, trivial);
      row.bounds.push_back(b);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

DominanceReport check_dominance(const SweepResult& result) {
  DominanceReport report;
  for (const SweepRow& row : result.rows) {
    std::ostringstream where;
    where << "eps=" << row.epsilon << " " << to_string(row.mechanism);
    if (std::isnan(row.mean_mse)) {
      report.undetermined.push_back(where.str() + ": every trial failed");
      continue;
    }
    for (std::size_t b = 0; b < row.bounds.size(); ++b) {
      const BoundEntry& entry = row.bounds[b];
      if (entry.unbounded || entry.validity != bounds::Validity::valid) continue;
      if (row.mean_mse < entry.value) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where.str() << ": mean " << row.mean_mse << " < "
            << result.bound_names[b] << " " << entry.value;
        report.violations.push_back(msg.str());
      }
    }
  }
  return report;
}

}  // namespace reconbound::harness
