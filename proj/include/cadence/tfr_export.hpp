#pragma once

// TFR matrix export for external plotting.
//
//   csv    "# kind=... fs=... fft_size=... first_bin=... hop=... first_sample=... rows=... cols=..."
//          then a header "time_s,<freq_0>,<freq_1>,..." and one magnitude row per frame.
//   pgm    binary 8-bit greyscale (P5). Columns are frames, rows are frequency
//          bins with the highest bin on top; intensity = 255 min(|v| / q99, 1),
//          q99 the 99% quantile of all magnitudes.
//   f64le  one JSON line {"rows","cols","fs","fft_size","first_bin","hop","first_sample","kind"},
//          then rows * cols little-endian doubles in row-major order.

#include "cadence/config.hpp"
#include "cadence/tfr.hpp"

#include <filesystem>

namespace cadence {

/// Magnitude view of a grid; real grids keep their values.
RealTfr magnitude(const ComplexTfr& tfr);

void export_tfr(const RealTfr& values, const std::filesystem::path& path, TfrFormat format);
void export_tfr(const ComplexTfr& tfr, const std::filesystem::path& path, TfrFormat format);

/// Reads an f64le export back.
RealTfr read_tfr_f64le(const std::filesystem::path& path);

/// Linear-interpolation quantile (p in [0, 1]) of the values.
double quantile(std::span<const double> values, double p);

}  // namespace cadence
