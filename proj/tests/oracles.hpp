#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the metric space container.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "reconbound/metric_space.hpp"

namespace oracles {

inline bool covers(const reconbound::metric::FiniteMetricSpace& s,
                   unsigned mask, double eta) {
  for (std::size_t p = 0; p < s.size(); ++p) {
    bool hit = false;
    for (std::size_t c = 0; c < s.size() && !hit; ++c) {
      hit = (mask >> c & 1u) && s(p, c) <= eta;
    }
    if (!hit) return false;
  }
  return true;
}

/// Smallest internal cover by enumerating every subset.
inline std::size_t covering_by_subsets(
    const reconbound::metric::FiniteMetricSpace& s, double eta) {
  std::size_t best = s.size();
  for (unsigned mask = 1; mask < (1u << s.size()); ++mask) {
    const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k < best && covers(s, mask, eta)) best = k;
  }
  return best;
}

/// Largest eta-separated subset by enumerating every subset.
inline std::size_t packing_by_subsets(
    const reconbound::metric::FiniteMetricSpace& s, double eta) {
  std::size_t best = 1;
  for (unsigned mask = 1; mask < (1u << s.size()); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < s.size() && ok; ++j) {
        ok = !((mask >> i & 1u) && (mask >> j & 1u)) || s(i, j) >= eta;
      }
    }
    const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (ok && k > best) best = k;
  }
  return best;
}

/// Golden-section minimization of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a,
                         double b, int iterations = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < iterations; ++i) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  }
  return sum * h / 3.0;
}

}  // namespace oracles
