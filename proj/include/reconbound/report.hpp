#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "reconbound/bounds.hpp"
#include "reconbound/harness.hpp"

namespace reconbound::report {

/// epsilon,mechanism,mean_mse,ci_low,ci_high,<bound columns>,failures with
/// %.17g numbers. Unbounded bounds are written as NA. Refuses empty results.
std::string emit_csv(const harness::SweepResult& result);

/// Inverse of emit_csv. Validity flags are not stored in the CSV; parsed
/// bounds are VALID unless NA.
harness::SweepResult parse_csv(const std::string& text);

/// Line chart with a log y-axis: one polyline per bound, one for the
/// empirical mean, and a shaded polygon for the confidence band.
std::string emit_svg(const harness::SweepResult& result);

struct BoundCurvePoint {
  double epsilon;
  std::string bound_name;
  bounds::BoundValue value;
  bounds::Validity validity;
};

/// epsilon,bound_name,value,validity_flag. Unbounded values are NA with
/// flag UNBOUNDED.
std::string emit_bound_curve_csv(const std::vector<BoundCurvePoint>& points);

/// Writes text to a file, creating parent directories. Errors name the path.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace reconbound::report
