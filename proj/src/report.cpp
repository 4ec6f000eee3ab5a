#include "reconbound/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "reconbound/error.hpp"

namespace reconbound::report {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream in(line);
  for (std::string cell; std::getline(in, cell, sep);) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& cell) {
  if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  require(!cell.empty() && end == cell.c_str() + cell.size(), ErrorCode::bad_format,
          "CSV: expected a number, got '" + cell + "'");
  return v;
}

const char* kPalette[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f"};

}  // namespace

std::string emit_csv(const harness::SweepResult& result) {
  require(!result.rows.empty(), ErrorCode::invalid_argument,
          "refusing to write an empty sweep result");
  std::string out = "epsilon,mechanism,mean_mse,ci_low,ci_high";
  for (const auto& name : result.bound_names) out += "," + name;
  out += ",failures\n";
  for (const auto& row : result.rows) {
    require(row.bounds.size() == result.bound_names.size(),
            ErrorCode::invalid_argument, "row has the wrong number of bounds");
    out += num(row.epsilon) + "," + harness::to_string(row.mechanism) + "," +
           num(row.mean_mse) + "," + num(row.ci_low) + "," + num(row.ci_high);
    for (const auto& b : row.bounds) out += "," + (b.unbounded ? "NA" : num(b.value));
    out += "," + std::to_string(row.failures) + "\n";
  }
  return out;
}

harness::SweepResult parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::bad_format,
          "CSV: missing header");
  const auto header = split(line, ',');
  require(header.size() >= 6 && header[0] == "epsilon" &&
              header[1] == "mechanism" && header[2] == "mean_mse" &&
              header[3] == "ci_low" && header[4] == "ci_high" &&
              header.back() == "failures",
          ErrorCode::bad_format, "CSV: unexpected header");
  harness::SweepResult result;
  result.bound_names.assign(header.begin() + 5, header.end() - 1);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    require(cells.size() == header.size(), ErrorCode::bad_format,
            "CSV: row has " + std::to_string(cells.size()) + " cells, expected " +
                std::to_string(header.size()));
    harness::SweepRow row;
    row.epsilon = parse_number(cells[0]);
    row.mechanism = harness::parse_mechanism(cells[1]);
    row.mean_mse = parse_number(cells[2]);
    row.ci_low = parse_number(cells[3]);
    row.ci_high = parse_number(cells[4]);
    for (std::size_t b = 0; b < result.bound_names.size(); ++b) {
      const std::string& cell = cells[5 + b];
      harness::BoundEntry entry;
      if (cell == "NA") {
        entry = {std::numeric_limits<double>::infinity(), true,
                 bounds::Validity::vacuous};
      } else {
        entry.value = parse_number(cell);
      }
      row.bounds.push_back(entry);
    }
    row.failures = static_cast<std::size_t>(parse_number(cells.back()));
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string emit_svg(const harness::SweepResult& result) {
  require(!result.rows.empty(), ErrorCode::invalid_argument,
          "refusing to plot an empty sweep result");
  constexpr double W = 800, H = 500, left = 80, right = 200, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  double x_min = result.rows.front().epsilon, x_max = result.rows.back().epsilon;
  if (x_max <= x_min) x_max = x_min + 1.0;
  double y_min = std::numeric_limits<double>::infinity(), y_max = 0.0;
  const auto widen = [&](double v) {
    if (!positive(v)) return;
    y_min = std::min(y_min, v);
    y_max = std::max(y_max, v);
  };
  for (const auto& row : result.rows) {
    widen(row.mean_mse);
    widen(row.ci_low);
    widen(row.ci_high);
    for (const auto& b : row.bounds) {
      if (!b.unbounded) widen(b.value);
    }
  }
  if (!(y_max > 0.0)) {
    y_min = 0.1;
    y_max = 10.0;
  }
  const double lo_dec = std::floor(std::log10(y_min));
  double hi_dec = std::ceil(std::log10(y_max));
  if (hi_dec <= lo_dec) hi_dec = lo_dec + 1.0;

  const auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
  const auto py = [&](double y) {
    return top + (hi_dec - std::log10(y)) / (hi_dec - lo_dec) * ph;
  };
  const auto pt = [&](double x, double y) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(x), py(y));
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
      << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and decade gridlines.
  svg << "<g stroke=\"#cccccc\">\n";
  for (double dec = lo_dec; dec <= hi_dec; dec += 1.0) {
    const double y = py(std::pow(10.0, dec));
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw
        << "\" y2=\"" << y << "\"/>\n";
  }
  svg << "</g>\n<g fill=\"black\">\n";
  for (double dec = lo_dec; dec <= hi_dec; dec += 1.0) {
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py(std::pow(10.0, dec)) + 4
        << "\" text-anchor=\"end\">1e" << dec << "</text>\n";
  }
  for (const auto& row : result.rows) {
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", row.epsilon);
    svg << "<text x=\"" << px(row.epsilon) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << label << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">epsilon</text>\n"
      << "<text x=\"20\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 20 "
      << top + ph / 2 << ")\" text-anchor=\"middle\">MSE (log scale)</text>\n"
      << "</g>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Confidence band.
  std::string band;
  for (const auto& row : result.rows) {
    if (positive(row.ci_high)) band += pt(row.epsilon, row.ci_high) + " ";
  }
  for (auto it = result.rows.rbegin(); it != result.rows.rend(); ++it) {
    if (positive(it->ci_low)) band += pt(it->epsilon, it->ci_low) + " ";
  }
  svg << "<polygon class=\"ci\" points=\"" << band
      << "\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";

  const auto series = [&](const std::string& name, const std::string& color,
                          const auto& value_of, std::size_t slot) {
    std::string points;
    for (const auto& row : result.rows) {
      const double v = value_of(row);
      if (positive(v)) points += pt(row.epsilon, v) + " ";
    }
    svg << "<polyline class=\"series\" data-name=\"" << name << "\" points=\""
        << points << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(slot);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\""
        << left + pw + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n<text x=\"" << left + pw + 45 << "\" y=\""
        << ly + 4 << "\">" << name << "</text>\n";
  };

  series("empirical mean", "#1f77b4",
         [](const harness::SweepRow& r) { return r.mean_mse; }, 0);
  for (std::size_t b = 0; b < result.bound_names.size(); ++b) {
    series(result.bound_names[b], kPalette[b % std::size(kPalette)],
           [b](const harness::SweepRow& r) {
             return r.bounds[b].unbounded ? std::nan("") : r.bounds[b].value;
           },
           b + 1);
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string emit_bound_curve_csv(const std::vector<BoundCurvePoint>& points) {
  std::string out = "epsilon,bound_name,value,validity_flag\n";
  for (const auto& p : points) {
    out += num(p.epsilon) + "," + p.bound_name + ",";
    if (p.value.unbounded) {
      out += "NA,UNBOUNDED\n";
    } else {
      out += num(p.value.value) + "," + bounds::to_string(p.validity) + "\n";
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  require(!ec, ErrorCode::io,
          "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out << text;
  out.flush();
  require(out.good(), ErrorCode::io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace reconbound::report
