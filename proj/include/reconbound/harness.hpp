#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reconbound/attack.hpp"
#include "reconbound/bounds.hpp"
#include "reconbound/logreg.hpp"

namespace reconbound::harness {

enum class MechanismKind {
  OUTPUT_PERTURB_DP,
  OUTPUT_PERTURB_MDP,
  PNSGD_DP,
  PNSGD_MDP,
};

MechanismKind parse_mechanism(const std::string& name);
const char* to_string(MechanismKind kind);
bool is_metric(MechanismKind kind);

enum class DatasetSource { SYNTHETIC, IDX_FILES };

struct SweepConfig {
  std::vector<double> eps_grid;
  std::size_t trials = 50;
  MechanismKind mechanism_kind = MechanismKind::OUTPUT_PERTURB_DP;
  DatasetSource dataset_source = DatasetSource::SYNTHETIC;
  std::size_t n_samples = 2000;
  std::size_t dim = 16;
  std::uint64_t seed = 1;
  double lambda = 1e-2;
  double delta = 1e-5;  ///< used by the PNSGD kinds; output perturbation is pure
  std::optional<double> alpha = 2.0;  ///< order for the Renyi DP bound

  bool noiseless = false;
  std::size_t attack_samples = 1;  ///< n releases per trial
  attack::RootPolicy root_policy = attack::RootPolicy::closest;
  double train_tolerance = 1e-13;
  std::size_t bootstrap_resamples = 10000;
  std::size_t threads = 0;  ///< 0 picks the hardware concurrency

  std::string idx_images;
  std::string idx_labels;
  std::pair<int, int> digits{0, 1};

  double pnsgd_radius = 1.0;              ///< constraint ball for the weights
  std::size_t challenge_position = 0;     ///< 1-based; 0 means last

  /// Throws Error(config) on any inconsistency.
  void validate() const;
};

/// "a:b:step" -> a, a + step, ... strictly below b.
std::vector<double> parse_eps_grid(const std::string& spec);

/// Applies one "key = value" setting; unknown keys are config errors.
void apply_setting(SweepConfig& config, const std::string& key,
                   const std::string& value);

/// Flat "key = value" lines; '#' starts a comment.
SweepConfig parse_config_text(const std::string& text,
                              SweepConfig base = SweepConfig{});
SweepConfig load_config_file(const std::filesystem::path& path,
                             SweepConfig base = SweepConfig{});

/// Two Gaussian blobs at +-0.5 mu/|mu| with isotropic spread 0.3, labels
/// Bernoulli(1/2), rows rescaled to L2 norm at most 1.
LogRegProblem generate_synthetic(std::size_t n, std::size_t d,
                                 std::uint64_t seed);

struct BoundEntry {
  double value = 0.0;
  bool unbounded = false;
  bounds::Validity validity = bounds::Validity::valid;
};

struct SweepRow {
  double epsilon = 0.0;
  MechanismKind mechanism = MechanismKind::OUTPUT_PERTURB_DP;
  double mean_mse = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<BoundEntry> bounds;  ///< parallel to SweepResult::bound_names
  std::size_t failures = 0;
};

struct SweepResult {
  std::vector<std::string> bound_names;
  std::vector<SweepRow> rows;
};

/// Bound columns reported for a mechanism kind.
std::vector<std::string> bound_names_for(MechanismKind kind, bool has_alpha);

/// Percentile bootstrap interval for the mean, clamped to contain the mean.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                       std::size_t resamples, double level,
                                       std::uint64_t seed);

SweepResult run_sweep(const SweepConfig& config);

struct DominanceReport {
  std::vector<std::string> violations;  ///< mean below a VALID bound
  std::vector<std::string> undetermined;  ///< rows where every trial failed
  bool ok() const noexcept { return violations.empty(); }
};

/// Empirical mean against every VALID bound in the row; VACUOUS bounds are
/// skipped.
DominanceReport check_dominance(const SweepResult& result);

}  // namespace reconbound::harness
