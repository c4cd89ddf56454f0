#pragma once

#include <string>

#include "embedsim/metrics.hpp"

namespace embedsim {

// SVG charts rendered from CSV-shaped data, so re-rendering from a saved
// metrics.csv reproduces the original files byte for byte.

// Per-operator mass-weighted rejection per round: raw traces plus a
// centered moving average, emergency rounds shaded.
std::string render_rejection_chart(const MetricsTable& table, int window);

// Total occupancy per round stacked by operator.
std::string render_occupancy_by_vo(const MetricsTable& table);

// Total occupancy per round stacked by service.
std::string render_occupancy_by_service(const MetricsTable& table);

// Writes rejection.svg, occupancy_by_vo.svg and occupancy_by_service.svg
// into dir (which must exist). Throws Error on I/O failure.
void write_plots(const std::string& dir, const MetricsTable& table,
                 int window);

}  // namespace embedsim
