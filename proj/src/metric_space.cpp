#include "reconbound/metric_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "reconbound/error.hpp"

namespace reconbound::metric {

namespace {

using Mask = std::uint64_t;

void check_exhaustive_size(std::size_t n, std::size_t cap) {
  require(n <= cap, ErrorCode::size_guard,
          "exhaustive search refused: " + std::to_string(n) +
              " points exceeds cap " + std::to_string(cap));
  require(n <= 64, ErrorCode::size_guard,
          "exhaustive search supports at most 64 points");
}

Mask full_mask(std::size_t n) {
  return n == 64 ? ~Mask{0} : ((Mask{1} << n) - 1);
}

// Is there a cover of `uncovered` using at most `budget` more centers?
// Branches on the centers that can cover the lowest uncovered point.
bool cover_within(Mask uncovered, int budget, const std::vector<Mask>& reach,
                  const std::vector<Mask>& covered_by) {
  if (uncovered == 0) return true;
  if (budget == 0) return false;
  const int p = std::countr_zero(uncovered);
  Mask candidates = covered_by[p];
  while (candidates) {
    const int c = std::countr_zero(candidates);
    candidates &= candidates - 1;
    if (cover_within(uncovered & ~reach[c], budget - 1, reach, covered_by)) {
      return true;
    }
  }
  return false;
}

// Branch and bound for a maximum independent set of the conflict graph.
void best_packing(Mask candidates, int chosen, int& best,
                  const std::vector<Mask>& conflicts) {
  if (candidates == 0) {
    best = std::max(best, chosen);
    return;
  }
  if (chosen + std::popcount(candidates) <= best) return;
  const int v = std::countr_zero(candidates);
  const Mask rest = candidates & ~(Mask{1} << v);
  best_packing(rest & ~conflicts[v], chosen + 1, best, conflicts);
  best_packing(rest, chosen, best, conflicts);
}

}  // namespace

NormTag parse_norm(const std::string& name) {
  if (name == "L1" || name == "l1") return NormTag::L1;
  if (name == "L2" || name == "l2") return NormTag::L2;
  if (name == "LINF" || name == "linf" || name == "Linf") return NormTag::LINF;
  fail(ErrorCode::invalid_argument, "unknown norm '" + name + "'");
}

const char* to_string(NormTag norm) {
  switch (norm) {
    case NormTag::L1: return "L1";
    case NormTag::L2: return "L2";
    case NormTag::LINF: return "LINF";
  }
  return "?";
}

double norm_distance(std::span<const double> a, std::span<const double> b,
                     NormTag norm) {
  require(a.size() == b.size(), ErrorCode::invalid_argument,
          "norm_distance: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    switch (norm) {
      case NormTag::L1: acc += diff; break;
      case NormTag::L2: acc += diff * diff; break;
      case NormTag::LINF: acc = std::max(acc, diff); break;
    }
  }
  return norm == NormTag::L2 ? std::sqrt(acc) : acc;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> points,
                                     std::vector<double> dist)
    : points_(std::move(points)), dist_(std::move(dist)) {
  const std::size_t n = points_.size();
  require(n >= 1, ErrorCode::invalid_argument, "metric space needs a point");
  require(dist_.size() == n * n, ErrorCode::invalid_argument,
          "distance matrix must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    require(dist_[i * n + i] == 0.0, ErrorCode::invalid_argument,
            "distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist_[i * n + j];
      require(std::isfinite(d) && d >= 0.0, ErrorCode::invalid_argument,
              "distances must be finite and nonnegative");
      require(d == dist_[j * n + i], ErrorCode::invalid_argument,
              "distance matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double direct = dist_[i * n + k];
        const double via = dist_[i * n + j] + dist_[j * n + k];
        require(direct <= via * (1.0 + 1e-12) + 1e-300,
                ErrorCode::invalid_argument,
                "triangle inequality violated at (" + std::to_string(i) + "," +
                    std::to_string(j) + "," + std::to_string(k) + ")");
      }
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::size_t n,
                                                 std::vector<double> dist) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return FiniteMetricSpace(std::move(names), std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::from_coordinates(
    const std::vector<std::vector<double>>& coords, NormTag norm) {
  const std::size_t n = coords.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = norm_distance(coords[i], coords[j], norm);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return from_matrix(n, std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::scaled(double c) const {
  require(c > 0.0, ErrorCode::invalid_argument, "scale must be positive");
  std::vector<double> d = dist_;
  for (double& v : d) v *= c;
  return FiniteMetricSpace(points_, std::move(d));
}

FiniteMetricSpace parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  long long n = 0;
  require(static_cast<bool>(in >> n) && n > 0, ErrorCode::bad_format,
          "matrix file: expected a positive point count on the first line");
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> dist(count * count);
  for (double& v : dist) {
    require(static_cast<bool>(in >> v), ErrorCode::bad_format,
            "matrix file: expected " + std::to_string(count * count) +
                " distances");
  }
  std::string trailing;
  require(!(in >> trailing), ErrorCode::bad_format,
          "matrix file: trailing content '" + trailing + "'");
  return FiniteMetricSpace::from_matrix(count, std::move(dist));
}

FiniteMetricSpace load_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix_text(buffer.str());
}

void NormedSpaceSpec::validate() const {
  require(dim >= 1, ErrorCode::invalid_argument, "dim must be >= 1");
  if (box) {
    require(box->size() == dim, ErrorCode::invalid_argument,
            "box must have one interval per coordinate");
    for (const Interval& iv : *box) {
      require(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi,
              ErrorCode::invalid_argument,
              "box intervals must be finite and nonempty");
    }
  }
}

NormedSpaceSpec NormedSpaceSpec::cube(std::size_t dim, NormTag norm, double lo,
                                      double hi) {
  NormedSpaceSpec spec{dim, norm, std::vector<Interval>(dim, Interval{lo, hi})};
  spec.validate();
  return spec;
}

double diameter(const FiniteMetricSpace& space) {
  return *std::max_element(space.matrix().begin(), space.matrix().end());
}

double diameter(const NormedSpaceSpec& space) {
  const std::vector<double> widths = coordinate_diameters(space);
  const std::vector<double> zero(widths.size(), 0.0);
  return norm_distance(widths, zero, space.norm);
}

double diameter(const SampleSpace& space) {
  return std::visit([](const auto& s) { return diameter(s); }, space);
}

std::vector<double> coordinate_diameters(const NormedSpaceSpec& space) {
  space.validate();
  require(space.box.has_value(), ErrorCode::unbounded_domain,
          "normed space without box bounds has no finite diameter");
  std::vector<double> widths;
  widths.reserve(space.dim);
  for (const Interval& iv : *space.box) widths.push_back(iv.width());
  return widths;
}

std::size_t covering_number(const FiniteMetricSpace& space, double eta,
                            std::size_t cap) {
  require(eta > 0.0, ErrorCode::invalid_argument, "eta must be positive");
  const std::size_t n = space.size();
  check_exhaustive_size(n, cap);

  // reach[c]: points within eta of center c; covered_by[p]: centers reaching p.
  std::vector<Mask> reach(n, 0), covered_by(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < n; ++p) {
      if (space(c, p) <= eta) {
        reach[c] |= Mask{1} << p;
        covered_by[p] |= Mask{1} << c;
      }
    }
  }
  for (int k = 1;; ++k) {
    if (cover_within(full_mask(n), k, reach, covered_by)) {
      return static_cast<std::size_t>(k);
    }
  }
}

std::size_t packing_number(const FiniteMetricSpace& space, double eta,
                           std::size_t cap) {
  require(eta > 0.0, ErrorCode::invalid_argument, "eta must be positive");
  const std::size_t n = space.size();
  check_exhaustive_size(n, cap);

  std::vector<Mask> conflicts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && space(i, j) < eta) conflicts[i] |= Mask{1} << j;
    }
  }
  int best = 0;
  best_packing(full_mask(n), 0, best, conflicts);
  return static_cast<std::size_t>(best);
}

CoveringBounds norm_ball_covering_bounds(std::size_t dim, double eta) {
  require(eta > 0.0, ErrorCode::invalid_argument, "eta must be positive");
  require(dim >= 1, ErrorCode::invalid_argument, "dim must be >= 1");
  const double d = static_cast<double>(dim);
  const double log_lower = -d * std::log(eta);
  const double log_upper = d * std::log1p(2.0 / eta);
  return {std::pow(1.0 / eta, d), std::pow(1.0 + 2.0 / eta, d), log_lower,
          log_upper};
}

UnitBallDiscretization discretize_unit_ball(std::size_t dim, NormTag norm,
                                            double spacing) {
  require(dim >= 1, ErrorCode::invalid_argument, "dim must be >= 1");
  require(spacing > 0.0 && spacing <= 1.0, ErrorCode::invalid_argument,
          "spacing must lie in (0, 1]");
  // Integer grid indices keep the coordinates exact multiples of spacing.
  const long long half = static_cast<long long>(std::floor(1.0 / spacing + 1e-9));
  const long long side = 2 * half + 1;
  long long total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    total *= side;
    require(total <= 4096, ErrorCode::size_guard,
            "unit ball grid too large");
  }
  std::vector<std::vector<double>> coords;
  const std::vector<double> origin(dim, 0.0);
  std::vector<double> point(dim);
  for (long long code = 0; code < total; ++code) {
    long long rest = code;
    for (std::size_t i = 0; i < dim; ++i) {
      point[i] = static_cast<double>(rest % side - half) * spacing;
      rest /= side;
    }
    if (norm_distance(point, origin, norm) <= 1.0 + 1e-12) coords.push_back(point);
  }
  FiniteMetricSpace space = FiniteMetricSpace::from_coordinates(coords, norm);
  return {dim, norm, spacing, std::move(coords), std::move(space)};
}

UnitBallDiscretization tag_unit_ball(FiniteMetricSpace space) {
  return {0, NormTag::L2, 0.0, {}, std::move(space)};
}

EffectiveDimension effective_dimension(const UnitBallDiscretization& ball,
                                       std::size_t cap) {
  const std::size_t n = covering_number(ball.space, 0.5, cap);
  return {std::log(static_cast<double>(n)), ball.spacing, n};
}

double effective_dimension_normed(std::size_t dim) {
  require(dim >= 1, ErrorCode::invalid_argument, "dim must be >= 1");
  return static_cast<double>(dim) * std::log(2.0);
}

double dataset_distance(const FiniteMetricSpace& space,
                        std::span<const std::size_t> a,
                        std::span<const std::size_t> b) {
  require(a.size() == b.size(), ErrorCode::invalid_argument,
          "datasets must have the same number of samples");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i] < space.size() && b[i] < space.size(),
            ErrorCode::invalid_argument, "sample index out of range");
    total += space(a[i], b[i]);
  }
  return total;
}

double dataset_distance(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b,
                        NormTag norm) {
  require(a.size() == b.size(), ErrorCode::invalid_argument,
          "datasets must have the same number of samples");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += norm_distance(a[i], b[i], norm);
  }
  return total;
}

}  // namespace reconbound::metric
