#pragma once

#include "cadence/tfr.hpp"

#include <cstddef>
#include <limits>
#include <utility>
#include <span>
#include <vector>

namespace cadence {

/// Frequency band restricting the ridge search, in Hz. `full()` covers every bin.
struct BandHz {
    double low = 0.3;
    double high = 2.5;

    static BandHz full() { return {0.0, std::numeric_limits<double>::infinity()}; }
};

/// Dense frames x bins block of non-negative magnitudes (row-major).
struct MagnitudeBlock {
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::vector<double> values;

    double operator()(std::size_t t, std::size_t b) const noexcept { return values[t * bins + b]; }
};

enum class RidgeStatus { ok, degenerate };

/// Best-path bins through a TFR block. `bins` are zero-based FFT bin indices
/// (bin b is b * fs / 2M Hz), one per frame from first_row to first_row + size - 1.
struct RidgeCurve {
    std::vector<std::size_t> bins;
    std::size_t first_row = 0;
    std::size_t band_low_bin = 0;
    std::size_t band_high_bin = 0;  // inclusive
    double lambda = 0.0;
    double objective = 0.0;
    RidgeStatus status = RidgeStatus::ok;
};

/// Path c(0..T-1) over columns 0..bins-1 of `block` maximising
///   sum_t log(max(A(t, c_t), eps Z) / Z) - lambda sum_t (c_t - c_{t-1})^2,
/// Z the total of the block, eps = 1e-12. Ties go to the lower column at every
/// step, which picks the optimal path that is smallest read from the last frame
/// backwards. An all-zero block returns column 0 throughout with status
/// `degenerate`. The returned bins are block columns.
RidgeCurve extract_ridge(const MagnitudeBlock& block, double lambda);

/// Score of a given path under the same objective, accumulated frame by frame
/// in the order extract_ridge uses.
double ridge_objective(const MagnitudeBlock& block, std::span<const std::size_t> path, double lambda);

/// Band-limited magnitude block of grid rows [row_begin, row_end].
MagnitudeBlock magnitude_block(const ComplexTfr& tfr, std::size_t row_begin, std::size_t row_end,
                               std::size_t col_begin, std::size_t col_end);

/// Columns of `tfr` whose frequency lies in the band. Throws ParameterError when empty.
std::pair<std::size_t, std::size_t> band_columns(const ComplexTfr& tfr, const BandHz& band);

/// Ridge over grid rows [row_begin, row_end] (zero-based, inclusive) restricted
/// to `band`; the returned bins are absolute FFT bins.
RidgeCurve extract_ridge(const ComplexTfr& tfr, std::size_t row_begin, std::size_t row_end, const BandHz& band,
                         double lambda);

/// Instantaneous frequency and cadence (= 2 x IF) per frame.
struct CadenceTrace {
    std::vector<double> times;
    std::vector<double> if_hz;
    std::vector<double> cadence_hz;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

/// if = bin * fs / 2M, cadence = 2 if, time of grid row r = t0 + (first + r * hop) / fs.
CadenceTrace cadence_from_ridge(const RidgeCurve& ridge, double fs, std::size_t fft_half, const FrameAxis& frames,
                                double t0 = 0.0);

}  // namespace cadence
