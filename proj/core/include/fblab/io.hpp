#pragma once

#include "fblab/chart.hpp"
#include "fblab/free_boundary.hpp"
#include "fblab/grid.hpp"

#include <string>
#include <vector>

namespace fblab {

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

/// Text field format: header "n1 n2 x1_min x1_max x2_min x2_max", then n2
/// rows of n1 comma-separated values, row-major from x2_min upward.
void write_field(const GridField& f, const std::string& path);
GridField read_field(const std::string& path);

/// Orbit/chart table: w, t, x1, x2, Yh_formula, Yh_fd.
void write_chart_table(const Chart& chart, const std::string& path);

/// Profile table: w, phi, empty_flag, x1_at_phi, x2_at_phi.
void write_profile(const FreeBoundaryProfile& p, const std::string& path);

/// Continuity table: w0, r, osc, decay_flag.
void write_continuity(const ContinuityReport& r, const std::string& path);

/// Generic CSV helper: one header line, rows of formatted doubles.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

/// Filled contour map of the field with iso-lines, the free-boundary
/// polyline, and the chart's orbit fan, as a standalone SVG.
void write_contour_svg(const GridField& u, const FreeBoundaryProfile* profile,
                       const Chart* chart, const std::string& path, int iso_count = 9);

} // namespace fblab
