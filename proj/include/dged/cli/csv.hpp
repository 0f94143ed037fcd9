#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dged/analysis.hpp"
#include "dged/integrate.hpp"
#include "dged/state.hpp"

namespace dged::cli {

// Shortest decimal representation that round-trips the exact double, so
// fixture files are stable across platforms.
std::string format_double(double value);
double parse_double(const std::string& text);

// Time-series CSV, header "t,c_0,...,c_N", one row per sample.
void write_series_csv(const std::filesystem::path& path, const Trajectory& trajectory);
std::vector<ConcentrationState> read_series_csv(const std::filesystem::path& path,
                                                Variant variant);

// Sweep CSV, header "i,t,N,c,delta_prev" (delta_prev empty for the first N).
void write_sweep_csv(const std::filesystem::path& path, const TruncationTable& table);

}  // namespace dged::cli
