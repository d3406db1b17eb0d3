#pragma once

// Trajectory CSV I/O: header row `t,h1,...,hD`, one row per iterate, full
// double precision.

#include <string>

#include "toruskit/dynamics.hpp"

namespace toruskit::csv {

using dynamics::ObservableSeries;

/// Format a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

void write_series(const std::string& path, const ObservableSeries& series);

/// Reads a trajectory written by write_series (or any conforming file);
/// the t column is validated to be 0..N-1.
ObservableSeries read_series(const std::string& path);

}  // namespace toruskit::csv
