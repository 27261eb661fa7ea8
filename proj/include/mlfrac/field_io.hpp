#pragma once

#include "mlfrac/grid.hpp"

#include <filesystem>
#include <string>

namespace mlfrac {

/// Binary field file: one header line
///   MLFRAC-FIELD v1; n=..; m=..; points=..; extent=..; space=..
/// followed by little-endian float64 (re, im) pairs, component by component,
/// each component in row-major lattice order.
void write_field(const std::filesystem::path& path, const StateField& f);
StateField read_field(const std::filesystem::path& path);

/// One row per lattice point: coordinates (or frequencies), then re/im per component.
void write_field_csv(const std::filesystem::path& path, const StateField& f);

/// Whitespace-separated columns for gnuplot. 1D: x then re/im per component.
/// 2D/3D: x y re/im ..., blank line between rows; 3D writes the middle z slice.
void write_gnuplot_columns(const std::filesystem::path& path, const StateField& f);

} // namespace mlfrac
