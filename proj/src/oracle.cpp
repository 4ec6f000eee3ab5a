#include "reconbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "reconbound/error.hpp"

namespace reconbound::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t tuple_count(std::size_t outcomes, std::size_t n, std::size_t cap) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be >= 1");
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) {
    require(total <= cap / outcomes, ErrorCode::enumeration_cap,
            "outcome tuples exceed the enumeration cap of " +
                std::to_string(cap));
    total *= outcomes;
  }
  return total;
}

// Calls visit(likelihoods) for every outcome tuple in lexicographic order,
// where likelihoods[i] = prod_k P(o_k | input i).
template <typename Visit>
void for_each_tuple(const FiniteMechanism& mech, std::size_t n, std::size_t cap,
                    Visit&& visit) {
  const std::size_t total = tuple_count(mech.outcome_count(), n, cap);
  const std::size_t m = mech.input_count();
  std::vector<std::size_t> digits(n, 0);
  std::vector<double> like(m);
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      double p = 1.0;
      for (std::size_t o : digits) p *= mech(i, o);
      like[i] = p;
    }
    visit(like);
    for (std::size_t k = n; k-- > 0;) {
      if (++digits[k] < mech.outcome_count()) break;
      digits[k] = 0;
    }
  }
}

void check_pair(const FiniteMechanism& mech, std::size_t i, std::size_t j) {
  require(i < mech.input_count() && j < mech.input_count(),
          ErrorCode::invalid_argument, "input index out of range");
}

void check_inputs_in(const FiniteMechanism& mech,
                     const metric::FiniteMetricSpace& space) {
  for (std::size_t z : mech.inputs()) {
    require(z < space.size(), ErrorCode::invalid_argument,
            "mechanism input is not a point of the space");
  }
}

}  // namespace

FiniteMechanism::FiniteMechanism(std::vector<std::size_t> inputs,
                                 std::size_t outcomes,
                                 std::vector<double> channel)
    : inputs_(std::move(inputs)), outcomes_(outcomes), channel_(std::move(channel)) {
  require(!inputs_.empty() && outcomes_ >= 1, ErrorCode::invalid_argument,
          "a channel needs at least one input and one outcome");
  require(channel_.size() == inputs_.size() * outcomes_,
          ErrorCode::invalid_argument, "channel size does not match its shape");
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    double sum = 0.0;
    for (std::size_t o = 0; o < outcomes_; ++o) {
      const double p = channel_[i * outcomes_ + o];
      require(std::isfinite(p) && p >= 0.0, ErrorCode::invalid_argument,
              "channel entries must be finite and >= 0");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::invalid_argument,
            "channel row " + std::to_string(i) + " does not sum to 1");
  }
}

FiniteMechanism FiniteMechanism::from_rows(
    const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), ErrorCode::invalid_argument, "no channel rows");
  std::vector<std::size_t> inputs(rows.size());
  std::vector<double> channel;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows[0].size(), ErrorCode::invalid_argument,
            "channel rows differ in length");
    inputs[i] = i;
    channel.insert(channel.end(), rows[i].begin(), rows[i].end());
  }
  return FiniteMechanism(std::move(inputs), rows[0].size(), std::move(channel));
}

FiniteMechanism FiniteMechanism::merge_outcomes(std::size_t a,
                                                std::size_t b) const {
  require(a < outcomes_ && b < outcomes_ && a != b, ErrorCode::invalid_argument,
          "merge needs two distinct valid outcomes");
  std::vector<double> merged;
  merged.reserve(inputs_.size() * (outcomes_ - 1));
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    for (std::size_t o = 0; o < outcomes_; ++o) {
      if (o == b) continue;
      double p = (*this)(i, o);
      if (o == a) p += (*this)(i, b);
      merged.push_back(p);
    }
  }
  return FiniteMechanism(inputs_, outcomes_ - 1, std::move(merged));
}

FiniteMechanism randomized_response(double eps) {
  return randomized_response(2, eps);
}

FiniteMechanism randomized_response(std::size_t m, double eps) {
  require(m >= 2, ErrorCode::invalid_argument, "need at least two inputs");
  require(eps >= 0.0, ErrorCode::invalid_argument, "eps must be >= 0");
  const double others = static_cast<double>(m - 1);
  // 1 / (e^eps + m - 1) written to stay exact at eps = +infinity.
  const double off = std::exp(-eps) / (1.0 + others * std::exp(-eps));
  const double keep = 1.0 - others * off;
  std::vector<double> channel(m * m, off);
  for (std::size_t i = 0; i < m; ++i) channel[i * m + i] = keep;
  std::vector<std::size_t> inputs(m);
  for (std::size_t i = 0; i < m; ++i) inputs[i] = i;
  return FiniteMechanism(std::move(inputs), m, std::move(channel));
}

FiniteMechanism uniform_channel(std::size_t m, std::size_t outcomes) {
  require(m >= 1 && outcomes >= 1, ErrorCode::invalid_argument,
          "need at least one input and one outcome");
  std::vector<std::size_t> inputs(m);
  for (std::size_t i = 0; i < m; ++i) inputs[i] = i;
  return FiniteMechanism(std::move(inputs), outcomes,
                         std::vector<double>(m * outcomes, 1.0 / outcomes));
}

double dp_epsilon_of(const FiniteMechanism& mech) {
  double eps = 0.0;
  for (std::size_t o = 0; o < mech.outcome_count(); ++o) {
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < mech.input_count(); ++i) {
      lo = std::min(lo, mech(i, o));
      hi = std::max(hi, mech(i, o));
    }
    if (hi == 0.0) continue;  // outcome never occurs
    if (lo == 0.0) return kInf;
    eps = std::max(eps, std::log(hi) - std::log(lo));
  }
  return eps;
}

double exact_bayes_risk(const FiniteMechanism& mech,
                        const metric::FiniteMetricSpace& space, std::size_t n,
                        std::size_t cap) {
  check_inputs_in(mech, space);
  const std::size_t m = mech.input_count();
  const double prior = 1.0 / static_cast<double>(m);
  double risk = 0.0;
  for_each_tuple(mech, n, cap, [&](const std::vector<double>& like) {
    // Unnormalized posterior loss of each candidate; the normalizer cancels.
    double best = kInf;
    for (std::size_t c = 0; c < space.size(); ++c) {
      double loss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = space(mech.inputs()[i], c);
        loss += like[i] * d * d;
      }
      best = std::min(best, loss);
    }
    risk += prior * best;
  });
  return risk;
}

double channel_tv(const FiniteMechanism& mech, std::size_t i, std::size_t j) {
  check_pair(mech, i, j);
  double sum = 0.0;
  for (std::size_t o = 0; o < mech.outcome_count(); ++o) {
    sum += std::abs(mech(i, o) - mech(j, o));
  }
  return 0.5 * sum;
}

double channel_kl(const FiniteMechanism& mech, std::size_t i, std::size_t j) {
  check_pair(mech, i, j);
  double kl = 0.0;
  for (std::size_t o = 0; o < mech.outcome_count(); ++o) {
    const double p = mech(i, o), q = mech(j, o);
    if (p == 0.0) continue;
    if (q == 0.0) return kInf;
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

double channel_renyi(const FiniteMechanism& mech, std::size_t i, std::size_t j,
                     double alpha) {
  check_pair(mech, i, j);
  require(alpha > 1.0, ErrorCode::invalid_argument, "alpha must be > 1");
  double sum = 0.0;
  for (std::size_t o = 0; o < mech.outcome_count(); ++o) {
    const double p = mech(i, o), q = mech(j, o);
    if (p == 0.0) continue;
    if (q == 0.0) return kInf;
    sum += q * std::pow(p / q, alpha);
  }
  return std::max(std::log(sum) / (alpha - 1.0), 0.0);
}

double product_tv(const FiniteMechanism& mech, std::size_t i, std::size_t j,
                  std::size_t n, std::size_t cap) {
  check_pair(mech, i, j);
  double sum = 0.0;
  for_each_tuple(mech, n, cap, [&](const std::vector<double>& like) {
    sum += std::abs(like[i] - like[j]);
  });
  return std::min(0.5 * sum, 1.0);
}

LeCamReport lecam_certificate(const FiniteMechanism& mech,
                              const metric::FiniteMetricSpace& space,
                              std::size_t n, std::size_t cap) {
  require(mech.input_count() == 2, ErrorCode::wrong_arity,
          "the two-point certificate needs exactly two inputs");
  check_inputs_in(mech, space);
  LeCamReport r{};
  r.separation = space(mech.inputs()[0], mech.inputs()[1]);
  const double t = 0.5 * r.separation;
  const double nn = static_cast<double>(n);
  r.tv = product_tv(mech, 0, 1, n, cap);
  r.kl = std::max(channel_kl(mech, 0, 1), channel_kl(mech, 1, 0));
  r.eps = dp_epsilon_of(mech);
  r.exact_risk = exact_bayes_risk(mech, space, n, cap);
  r.lecam_bound = 0.5 * t * t * (1.0 - r.tv);
  r.bh_bound = 0.25 * t * t * std::exp(-nn * r.kl);
  r.thm1_bound = r.separation * r.separation / 16.0 *
                 std::exp(-nn * r.eps * std::tanh(0.5 * r.eps));
  // bh and thm1 coincide in exact arithmetic for randomized response, so
  // each link gets a relative slack of 1e-12.
  const auto geq = [](double a, double b) { return a >= b * (1.0 - 1e-12); };
  r.holds = geq(r.exact_risk, r.lecam_bound) && geq(r.lecam_bound, r.bh_bound) &&
            geq(r.bh_bound, r.thm1_bound);
  return r;
}

FanoReport fano_certificate(const FiniteMechanism& mech,
                            const metric::FiniteMetricSpace& space,
                            std::size_t n, std::size_t cap) {
  require(mech.input_count() >= 3, ErrorCode::wrong_arity,
          "the Fano certificate needs at least three inputs");
  check_inputs_in(mech, space);
  const std::size_t m = mech.input_count();
  const double prior = 1.0 / static_cast<double>(m);
  double info = 0.0, correct = 0.0;
  for_each_tuple(mech, n, cap, [&](const std::vector<double>& like) {
    double marginal = 0.0, top = 0.0;
    for (double p : like) {
      marginal += prior * p;
      top = std::max(top, p);
    }
    if (marginal == 0.0) return;
    for (double p : like) {
      if (p > 0.0) info += prior * p * std::log(p / marginal);
    }
    correct += prior * top;
  });
  FanoReport r{};
  r.mutual_information = std::max(info, 0.0);
  r.fano_bound = 1.0 - (r.mutual_information + std::numbers::ln2) /
                           std::log(static_cast<double>(m));
  r.exact_error = std::max(1.0 - correct, 0.0);
  r.holds = r.exact_error >= r.fano_bound - 1e-12;
  return r;
}

FiniteMechanism parse_channel_text(const std::string& text) {
  std::istringstream in(text);
  long long m = 0, k = 0;
  require(static_cast<bool>(in >> m >> k) && m > 0 && k > 0,
          ErrorCode::bad_format,
          "channel file: expected positive input and outcome counts");
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m),
                                        std::vector<double>(static_cast<std::size_t>(k)));
  for (auto& row : rows) {
    for (double& v : row) {
      require(static_cast<bool>(in >> v), ErrorCode::bad_format,
              "channel file: expected " + std::to_string(m * k) +
                  " probabilities");
    }
  }
  std::string trailing;
  require(!(in >> trailing), ErrorCode::bad_format,
          "channel file: trailing content '" + trailing + "'");
  return FiniteMechanism::from_rows(rows);
}

FiniteMechanism load_channel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_channel_text(buffer.str());
}

}  // namespace reconbound::oracle
