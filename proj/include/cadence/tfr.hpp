#pragma once

// Discrete time-frequency transforms behind the de-shape synchrosqueezing
// transform (dsSST).
//
// Frequency axis: an FFT of length 2M gives M+1 non-negative bins; bin b
// (zero-based) is the frequency b * fs / (2M).
//
// Time axis: row r of a grid is the frame centred on sample
// frames.first + r * frames.hop. Samples outside the signal read as zero.
//
// Continuous-time semantics the discrete operators follow:
//   V(t, xi)  = int f(tau) h(tau - t) exp(-i 2 pi xi (tau - t)) dtau
//   C(t, q)   = int |V(t, xi)|^gamma exp(-i 2 pi q xi) dxi      (cepstrum)
//   U(t, xi)  = C(t, 1 / xi)                                     (de-shape mask)
//   W(t, xi)  = V(t, xi) U(t, xi)
//   Omega     = xi - Im(V_dh / (2 pi V_h)) where |V_h| > upsilon
//   SV(t, xi) = int V(t, eta) delta(xi - Omega(t, eta)) deta, likewise SW from W.

#include "cadence/signal.hpp"

#include <cassert>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cadence {

class RealFft;

enum class TfrKind { stft, stct, istct_mask, dsstft, sst, dssst };

std::string_view to_string(TfrKind kind);
TfrKind parse_tfr_kind(std::string_view name);

/// Which samples the rows of a grid are centred on.
struct FrameAxis {
    std::size_t first = 0;
    std::size_t hop = 1;
    std::size_t count = 0;

    static FrameAxis every_sample(std::size_t n) { return {0, 1, n}; }
    /// Frames on a hop grid anchored at sample 0 that fall in [begin, end).
    static FrameAxis covering(std::size_t begin, std::size_t end, std::size_t hop);

    std::size_t sample(std::size_t row) const noexcept { return first + row * hop; }
    bool operator==(const FrameAxis&) const = default;
};

/// Time x frequency matrix with axis metadata. Row-major, one row per frame.
/// A grid may hold a contiguous sub-range of the M+1 bins starting at first_bin.
template <typename T>
class TfrGrid {
public:
    using value_type = T;

    TfrGrid(FrameAxis frames, std::size_t fft_half, double fs, TfrKind kind, std::size_t first_bin = 0,
            std::size_t bin_count = std::numeric_limits<std::size_t>::max())
        : frames_(frames),
          fft_half_(fft_half),
          fs_(fs),
          kind_(kind),
          first_bin_(first_bin),
          cols_(bin_count == std::numeric_limits<std::size_t>::max() ? fft_half + 1 - first_bin : bin_count),
          values_(frames.count * cols_) {}

    std::size_t rows() const noexcept { return frames_.count; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t fft_half() const noexcept { return fft_half_; }
    std::size_t fft_size() const noexcept { return 2 * fft_half_; }
    std::size_t first_bin() const noexcept { return first_bin_; }
    bool full_band() const noexcept { return first_bin_ == 0 && cols_ == fft_half_ + 1; }
    double fs() const noexcept { return fs_; }
    TfrKind kind() const noexcept { return kind_; }
    void set_kind(TfrKind kind) noexcept { kind_ = kind; }
    const FrameAxis& frames() const noexcept { return frames_; }

    /// Frequency in Hz of column c.
    double frequency(std::size_t c) const noexcept {
        return static_cast<double>(first_bin_ + c) * fs_ / static_cast<double>(fft_size());
    }
    /// Time in seconds of row r, relative to the first sample of the signal.
    double time(std::size_t r) const noexcept { return static_cast<double>(frames_.sample(r)) / fs_; }

    T& operator()(std::size_t r, std::size_t c) noexcept {
        assert(r < rows() && c < cols_);
        return values_[r * cols_ + c];
    }
    const T& operator()(std::size_t r, std::size_t c) const noexcept {
        assert(r < rows() && c < cols_);
        return values_[r * cols_ + c];
    }
    std::span<T> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }

    bool same_shape(const auto& other) const noexcept {
        return rows() == other.rows() && cols() == other.cols() && fft_half() == other.fft_half() &&
               first_bin() == other.first_bin() && frames() == other.frames();
    }

private:
    FrameAxis frames_;
    std::size_t fft_half_;
    double fs_;
    TfrKind kind_;
    std::size_t first_bin_;
    std::size_t cols_;
    std::vector<T> values_;
};

using ComplexTfr = TfrGrid<std::complex<double>>;
using RealTfr = TfrGrid<double>;

/// Reassignment operator in zero-based frequency-bin units. Cells whose STFT
/// magnitude does not exceed the threshold hold `undefined` (-infinity).
class OmegaMatrix {
public:
    static constexpr double undefined = -std::numeric_limits<double>::infinity();

    OmegaMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, undefined) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
    bool defined(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c] != undefined; }
    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }
    std::size_t defined_count() const noexcept;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

/// How synchrosqueezing accumulates what it moves: the complex coefficients
/// themselves, or their squared magnitudes.
enum class SqueezeMode { complex, energy };

/// Smallest power of two >= 4 (2K + 1), returned as M (the FFT length is 2M).
std::size_t default_fft_half(std::size_t window_half_length);

/// STFT with an arbitrary real window of odd length 2K+1 and FFT length 2M.
/// Requires 2M >= 2K+1.
ComplexTfr stft(const Signal& f, std::span<const double> window, std::size_t fft_half, const FrameAxis& frames);
inline ComplexTfr stft(const Signal& f, std::span<const double> window, std::size_t fft_half) {
    return stft(f, window, fft_half, FrameAxis::every_sample(f.size()));
}

/// Short-time cepstral transform: real part of the 2M-point DFT of |V|^gamma
/// (full spectrum rebuilt by conjugate symmetry), first M+1 quefrencies,
/// negative values clamped to zero. Column q is the quefrency q samples.
RealTfr stct(const ComplexTfr& v, double gamma);

/// Maps quefrency back to frequency: U(n, b) = g_n(b / 2M) where g_n(1/q) = C(n, q),
/// q = 1..M, linearly interpolated in the abscissa. Queries at 0 or below 1/M give 0.
RealTfr istct(const RealTfr& c, std::size_t fft_half);

/// W = V .* U
ComplexTfr deshape(const ComplexTfr& v, const RealTfr& mask);

/// v from the window h, vd from its derivative dh (same signal, same frames).
OmegaMatrix reassignment_operator(const ComplexTfr& v, const ComplexTfr& vd, double upsilon,
                                  std::size_t window_half_length);

/// Moves each defined cell (n, l) of src to column round(Omega(n, l)); targets
/// outside the grid are dropped. stft -> sst, dsstft -> dssst.
/// Complex sums are taken with the window centred on the frame, i.e. after
/// multiplying by exp(i pi K l / M), and the target column gets the inverse
/// factor back, so identity reassignment returns src unchanged.
ComplexTfr synchrosqueeze(const ComplexTfr& src, const OmegaMatrix& omega, std::size_t window_half_length,
                          SqueezeMode mode = SqueezeMode::complex);

/// Per-frame building blocks shared by the grid operations and analyze().
namespace kernels {

void windowed_spectrum(std::span<const double> f, std::size_t centre, std::span<const double> window, RealFft& fft,
                       std::span<std::complex<double>> out);
void cepstrum_row(std::span<const std::complex<double>> v, double gamma, RealFft& fft, std::span<double> out);
void mask_row(std::span<const double> cepstrum, std::size_t fft_half, std::span<double> out);
void omega_row(std::span<const std::complex<double>> v, std::span<const std::complex<double>> vd, double upsilon,
               double scale, std::span<double> out);
/// exp(i pi K m / M) for m = 0..M
std::vector<std::complex<double>> centring_phase(std::size_t fft_half, std::size_t window_half_length);
void squeeze_row(std::span<const std::complex<double>> src, std::span<const double> omega, SqueezeMode mode,
                 std::span<const std::complex<double>> phase, std::span<std::complex<double>> out);

}  // namespace kernels

struct DeshapeParams {
    double gamma = 0.3;
    double upsilon = 1e-9;
    SqueezeMode mode = SqueezeMode::complex;
};

/// Selects which grids analyze() keeps, and the bin range kept for each.
struct AnalysisRequest {
    bool stft = false;
    bool stct = false;
    bool mask = false;
    bool dsstft = false;
    bool sst = false;
    bool dssst = true;
    std::size_t first_bin = 0;
    std::size_t bin_count = std::numeric_limits<std::size_t>::max();
};

struct AnalysisResult {
    std::optional<ComplexTfr> stft;
    std::optional<RealTfr> stct;
    std::optional<RealTfr> mask;
    std::optional<ComplexTfr> dsstft;
    std::optional<ComplexTfr> sst;
    std::optional<ComplexTfr> dssst;
    std::size_t undefined_omega = 0;  // cells at or below the threshold
};

/// Runs STFT(h), STFT(dh), STCT, iSTCT, dsSTFT, Omega and both squeezes frame
/// by frame, keeping only the requested grids. Equivalent to chaining the grid
/// operations above, without holding every intermediate matrix.
AnalysisResult analyze(const Signal& f, const Window& window, std::size_t fft_half, const FrameAxis& frames,
                       const DeshapeParams& params, const AnalysisRequest& request);

}  // namespace cadence
