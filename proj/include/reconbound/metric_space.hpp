#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace reconbound::metric {

enum class NormTag { L1, L2, LINF };

NormTag parse_norm(const std::string& name);
const char* to_string(NormTag norm);

/// ||a - b|| under the given norm. Sizes must match.
double norm_distance(std::span<const double> a, std::span<const double> b,
                     NormTag norm);

/// A finite metric space given by its full pairwise distance matrix.
///
/// Construction validates symmetry, zero diagonal, finiteness, nonnegativity
/// and the triangle inequality (with a relative slack of 1e-12).
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> points, std::vector<double> dist);

  /// Points labelled "0".."n-1".
  static FiniteMetricSpace from_matrix(std::size_t n, std::vector<double> dist);

  /// Distances between coordinate vectors under `norm`.
  static FiniteMetricSpace from_coordinates(
      const std::vector<std::vector<double>>& coords, NormTag norm);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<std::string>& points() const noexcept { return points_; }
  double operator()(std::size_t i, std::size_t j) const {
    return dist_[i * size() + j];
  }
  const std::vector<double>& matrix() const noexcept { return dist_; }

  /// Same points with every distance multiplied by c > 0.
  FiniteMetricSpace scaled(double c) const;

 private:
  std::vector<std::string> points_;
  std::vector<double> dist_;
};

/// Loads "n" followed by n rows of n whitespace-separated decimals.
FiniteMetricSpace load_matrix_file(const std::filesystem::path& path);
FiniteMetricSpace parse_matrix_text(const std::string& text);

struct Interval {
  double lo;
  double hi;
  double width() const noexcept { return hi - lo; }
};

/// R^d under a norm, optionally restricted to an axis-aligned box.
struct NormedSpaceSpec {
  std::size_t dim = 1;
  NormTag norm = NormTag::L2;
  std::optional<std::vector<Interval>> box;

  void validate() const;

  static NormedSpaceSpec cube(std::size_t dim, NormTag norm, double lo,
                              double hi);
};

using SampleSpace = std::variant<FiniteMetricSpace, NormedSpaceSpec>;

double diameter(const FiniteMetricSpace& space);
/// Corner-to-corner distance of the box; unbounded_domain without a box.
double diameter(const NormedSpaceSpec& space);
double diameter(const SampleSpace& space);

/// Width of each box interval.
std::vector<double> coordinate_diameters(const NormedSpaceSpec& space);

/// Exhaustive searches refuse spaces larger than this many points.
inline constexpr std::size_t kDefaultExhaustiveCap = 20;

/// Minimum number of centers, chosen among the points themselves, such that
/// every point lies within eta of a center.
std::size_t covering_number(const FiniteMetricSpace& space, double eta,
                            std::size_t cap = kDefaultExhaustiveCap);

/// Largest subset whose pairwise distances are all >= eta.
std::size_t packing_number(const FiniteMetricSpace& space, double eta,
                           std::size_t cap = kDefaultExhaustiveCap);

struct CoveringBounds {
  double lower;
  double upper;
  double log_lower;
  double log_upper;
};

/// (1/eta)^dim <= N(eta, unit ball, any norm) <= (1 + 2/eta)^dim. The log
/// fields stay finite when the plain values overflow.
CoveringBounds norm_ball_covering_bounds(std::size_t dim, double eta);

/// Axis-aligned grid restricted to the closed unit ball of `norm` in R^dim.
/// The spacing is kept because the effective dimension depends on it.
struct UnitBallDiscretization {
  std::size_t dim;
  NormTag norm;
  double spacing;
  std::vector<std::vector<double>> coords;
  FiniteMetricSpace space;
};

UnitBallDiscretization discretize_unit_ball(std::size_t dim, NormTag norm,
                                            double spacing);

/// Wraps an arbitrary finite space that the caller asserts is a unit ball
/// discretization (spacing reported as 0).
UnitBallDiscretization tag_unit_ball(FiniteMetricSpace space);

struct EffectiveDimension {
  double value;    ///< ln N(1/2, ball, rho)
  double spacing;  ///< grid spacing it was computed at
  std::size_t covering;
};

EffectiveDimension effective_dimension(const UnitBallDiscretization& ball,
                                       std::size_t cap = kDefaultExhaustiveCap);

/// Closed-form shortcut for a d-dimensional normed space: d ln 2.
double effective_dimension_normed(std::size_t dim);

/// Dataset distance: per-sample distances summed over aligned samples.
double dataset_distance(const FiniteMetricSpace& space,
                        std::span<const std::size_t> a,
                        std::span<const std::size_t> b);
double dataset_distance(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b,
                        NormTag norm);

}  // namespace reconbound::metric
