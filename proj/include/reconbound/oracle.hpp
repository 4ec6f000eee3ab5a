#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "reconbound/metric_space.hpp"

namespace reconbound::oracle {

/// A channel P(outcome | input) on finite alphabets. `inputs[i]` is the index
/// of input i in the metric space the mechanism is evaluated on.
class FiniteMechanism {
 public:
  /// `channel` is row-major, inputs.size() rows by `outcomes` columns.
  FiniteMechanism(std::vector<std::size_t> inputs, std::size_t outcomes,
                  std::vector<double> channel);

  /// Inputs 0..rows-1.
  static FiniteMechanism from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t input_count() const noexcept { return inputs_.size(); }
  std::size_t outcome_count() const noexcept { return outcomes_; }
  const std::vector<std::size_t>& inputs() const noexcept { return inputs_; }
  double operator()(std::size_t input, std::size_t outcome) const {
    return channel_[input * outcomes_ + outcome];
  }

  /// Post-processing that maps outcome b onto outcome a.
  FiniteMechanism merge_outcomes(std::size_t a, std::size_t b) const;

 private:
  std::vector<std::size_t> inputs_;
  std::size_t outcomes_;
  std::vector<double> channel_;
};

/// Binary randomized response, flip probability 1 / (1 + e^eps). eps may be
/// +infinity (identity channel).
FiniteMechanism randomized_response(double eps);

/// M-ary randomized response: keep with probability e^eps / (e^eps + M - 1).
FiniteMechanism randomized_response(std::size_t m, double eps);

/// Uniform channel over `outcomes` outcomes for `m` inputs.
FiniteMechanism uniform_channel(std::size_t m, std::size_t outcomes);

/// Largest |ln P(o|z) - ln P(o|z')| over input pairs and outcomes; +infinity
/// when some outcome is possible under one input and not another.
double dp_epsilon_of(const FiniteMechanism& mech);

inline constexpr std::size_t kEnumerationCap = 1'000'000;

/// Exact Bayes risk under a uniform prior on the inputs after n independent
/// uses of the channel. The estimate for each outcome tuple is the space point
/// minimizing posterior expected squared distance.
double exact_bayes_risk(const FiniteMechanism& mech,
                        const metric::FiniteMetricSpace& space, std::size_t n,
                        std::size_t cap = kEnumerationCap);

double channel_tv(const FiniteMechanism& mech, std::size_t i, std::size_t j);
double channel_kl(const FiniteMechanism& mech, std::size_t i, std::size_t j);
double channel_renyi(const FiniteMechanism& mech, std::size_t i, std::size_t j,
                     double alpha);

/// TV between the n-fold product distributions of inputs i and j.
double product_tv(const FiniteMechanism& mech, std::size_t i, std::size_t j,
                  std::size_t n, std::size_t cap = kEnumerationCap);

struct LeCamReport {
  double separation;
  double tv;           ///< between n-fold products
  double kl;           ///< single use
  double eps;          ///< dp_epsilon_of
  double exact_risk;
  double lecam_bound;  ///< (t^2/2)(1 - TV), t = separation / 2
  double bh_bound;     ///< (t^2/4) e^{-n KL}
  double thm1_bound;   ///< (separation^2/16) e^{-n eps tanh(eps/2)}
  bool holds;          ///< exact >= lecam >= bh >= thm1 (1e-12 relative)
};

/// Two-point certificate. Throws wrong_arity unless there are two inputs.
LeCamReport lecam_certificate(const FiniteMechanism& mech,
                              const metric::FiniteMetricSpace& space,
                              std::size_t n, std::size_t cap = kEnumerationCap);

struct FanoReport {
  double mutual_information;  ///< I(V; outcomes^n), nats
  double fano_bound;          ///< 1 - (I + ln 2) / ln M
  double exact_error;         ///< Bayes misidentification probability
  bool holds;                 ///< exact >= fano (1e-12 slack)
};

/// Multi-hypothesis certificate. Throws wrong_arity for fewer than 3 inputs.
/// The space is only used to check that the inputs belong to it.
FanoReport fano_certificate(const FiniteMechanism& mech,
                            const metric::FiniteMetricSpace& space,
                            std::size_t n, std::size_t cap = kEnumerationCap);

/// "m k" followed by m rows of k probabilities.
FiniteMechanism parse_channel_text(const std::string& text);
FiniteMechanism load_channel_file(const std::filesystem::path& path);

}  // namespace reconbound::oracle
