#pragma once

#include <string>

#include "carfin/definetti.hpp"
#include "carfin/states.hpp"

namespace carfin {

/// StateFile: JSON object {"n_modes": n, "density": [[[re,im], ...], ...]},
/// density row-major 2^n x 2^n. Validated on load.
State load_state(const std::string& path, double tol = 1e-8);
void save_state(const State& phi, const std::string& path);

/// MeasureFile: CSV with header "mu,weight", plain decimal notation with at
/// least 12 significant digits.
MixingMeasure load_measure(const std::string& path);
void save_measure(const MixingMeasure& measure, const std::string& path);

/// Plain-decimal formatting with >= 12 significant digits (never exponent
/// notation), used by the CSV writers.
std::string format_decimal(double value);

}  // namespace carfin
