#include "reconbound/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "reconbound/error.hpp"

namespace reconbound {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed nodes above (1, 3, 5, 7).
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b,
               int depth, long& evaluations) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < kNodes.size(); ++i) {
    const bool on_gauss = (i % 2 == 1);
    if (kNodes[i] == 0.0) {
      const double fc = f(center);
      kronrod += kKronrod[i] * fc;
      gauss += kGauss[i / 2] * fc;
      magnitude += kKronrod[i] * std::abs(fc);
      evaluations += 1;
      continue;
    }
    const double dx = half * kNodes[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrod[i] * (f1 + f2);
    magnitude += kKronrod[i] * (std::abs(f1) + std::abs(f2));
    if (on_gauss) gauss += kGauss[i / 2] * (f1 + f2);
    evaluations += 2;
  }
  kronrod *= half;
  gauss *= half;
  magnitude *= std::abs(half);
  double error = std::abs(kronrod - gauss);
  // An estimate at the rounding floor cannot be improved by bisection.
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * magnitude;
  if (error < floor) error = 0.0;
  require(std::isfinite(kronrod), ErrorCode::non_convergence,
          "integrand is not finite on the panel");
  return {a, b, kronrod, error, depth};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol,
                           std::span<const double> breakpoints, int max_depth) {
  require(std::isfinite(a) && std::isfinite(b) && a <= b,
          ErrorCode::invalid_argument, "integration bounds must be finite");
  require(abs_tol > 0.0, ErrorCode::invalid_argument,
          "tolerance must be positive");
  QuadratureResult result;
  if (a == b) return result;

  std::vector<double> cuts = {a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> open;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = evaluate(f, cuts[i], cuts[i + 1], 0, result.evaluations);
    total += p.value;
    error += p.error;
    open.push(p);
  }
  while (error > abs_tol) {
    const Panel worst = open.top();
    open.pop();
    require(worst.depth < max_depth, ErrorCode::non_convergence,
            "adaptive quadrature exceeded the bisection depth limit");
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate(f, worst.a, mid, worst.depth + 1, result.evaluations);
    Panel right = evaluate(f, mid, worst.b, worst.depth + 1, result.evaluations);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }
  // Re-sum to shed drift from the incremental updates.
  total = 0.0;
  error = 0.0;
  while (!open.empty()) {
    total += open.top().value;
    error += open.top().error;
    open.pop();
  }
  result.value = total;
  result.error = error;
  return result;
}

}  // namespace reconbound
