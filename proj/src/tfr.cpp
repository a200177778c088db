#include "cadence/tfr.hpp"

#include "cadence/error.hpp"
#include "cadence/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace cadence {

std::string_view to_string(TfrKind kind) {
    switch (kind) {
        case TfrKind::stft: return "stft";
        case TfrKind::stct: return "stct";
        case TfrKind::istct_mask: return "istct";
        case TfrKind::dsstft: return "dsstft";
        case TfrKind::sst: return "sst";
        case TfrKind::dssst: return "dssst";
    }
    return "stft";
}

TfrKind parse_tfr_kind(std::string_view name) {
    for (auto k : {TfrKind::stft, TfrKind::stct, TfrKind::istct_mask, TfrKind::dsstft, TfrKind::sst, TfrKind::dssst}) {
        if (name == to_string(k)) return k;
    }
    if (name == "istct-mask" || name == "mask") return TfrKind::istct_mask;
    throw ParameterError("unknown TFR kind '" + std::string(name) + "'");
}

FrameAxis FrameAxis::covering(std::size_t begin, std::size_t end, std::size_t hop) {
    if (hop == 0) throw ParameterError("frame hop must be at least 1");
    const std::size_t first = (begin + hop - 1) / hop * hop;
    const std::size_t count = end > first ? (end - first + hop - 1) / hop : 0;
    return {first, hop, count};
}

std::size_t OmegaMatrix::defined_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != undefined; }));
}

std::size_t default_fft_half(std::size_t window_half_length) {
    return std::bit_ceil(4 * (2 * window_half_length + 1)) / 2;
}

namespace {

void check_frames(const Signal& f, const FrameAxis& frames) {
    if (frames.hop == 0) throw ParameterError("frame hop must be at least 1");
    if (frames.count > 0 && frames.sample(frames.count - 1) >= f.size()) {
        throw ParameterError("frame axis extends past the end of the signal");
    }
}

void check_window(std::span<const double> window, std::size_t fft_half) {
    if (window.size() % 2 == 0 || window.size() < 3) {
        throw ParameterError("window length must be odd and at least 3");
    }
    if (2 * fft_half < window.size()) {
        throw ParameterError("FFT length 2M = " + std::to_string(2 * fft_half) + " is shorter than the window length " +
                             std::to_string(window.size()));
    }
}

TfrKind squeezed_kind(TfrKind src) {
    switch (src) {
        case TfrKind::stft: return TfrKind::sst;
        case TfrKind::dsstft: return TfrKind::dssst;
        default: throw StructuralError("synchrosqueeze expects an stft or dsstft grid, got " + std::string(to_string(src)));
    }
}

double omega_scale(std::size_t fft_half, std::size_t window_half_length) {
    // dh is a derivative in the normalised window coordinate (2K samples per unit);
    // the result is expressed in bins of width fs / 2M.
    return static_cast<double>(2 * fft_half) / (2.0 * std::numbers::pi * 2.0 * static_cast<double>(window_half_length));
}

}  // namespace

namespace kernels {

void windowed_spectrum(std::span<const double> f, std::size_t centre, std::span<const double> window, RealFft& fft,
                       std::span<std::complex<double>> out) {
    auto buf = fft.input();
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window.size() / 2);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(centre) - half;
    const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(0, -start);
    const std::ptrdiff_t k1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(window.size()), n - start);
    for (std::ptrdiff_t k = k0; k < k1; ++k) {
        buf[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(start + k)] * window[static_cast<std::size_t>(k)];
    }
    fft.execute();
    const auto spec = fft.output();
    std::copy(spec.begin(), spec.end(), out.begin());
}

void cepstrum_row(std::span<const std::complex<double>> v, double gamma, RealFft& fft, std::span<double> out) {
    const std::size_t half = v.size() - 1;  // M
    auto buf = fft.input();
    for (std::size_t m = 0; m <= half; ++m) buf[m] = std::pow(std::abs(v[m]), gamma);
    for (std::size_t m = 1; m < half; ++m) buf[2 * half - m] = buf[m];
    fft.execute();
    const auto spec = fft.output();
    for (std::size_t q = 0; q <= half; ++q) out[q] = std::max(0.0, spec[q].real());
}

void mask_row(std::span<const double> cepstrum, std::size_t fft_half, std::span<double> out) {
    // Column b asks for g at b / 2M; node 1/q carries cepstrum[q]. With x = b / 2M,
    // 1/x = 2M / b, so the bracketing nodes are q = floor(2M / b) and q + 1.
    const std::size_t two_m = 2 * fft_half;
    out[0] = 0.0;
    for (std::size_t b = 1; b <= fft_half; ++b) {
        const std::size_t q = two_m / b;
        if (q > fft_half) {
            out[b] = 0.0;  // below the smallest node 1/M
            continue;
        }
        if (two_m % b == 0) {
            out[b] = cepstrum[q];
            continue;
        }
        if (q + 1 > fft_half) {
            out[b] = 0.0;
            continue;
        }
        const double x = static_cast<double>(b) / static_cast<double>(two_m);
        const double x_lo = 1.0 / static_cast<double>(q + 1);
        const double x_hi = 1.0 / static_cast<double>(q);
        const double w = (x - x_lo) / (x_hi - x_lo);
        out[b] = (1.0 - w) * cepstrum[q + 1] + w * cepstrum[q];
    }
}

void omega_row(std::span<const std::complex<double>> v, std::span<const std::complex<double>> vd, double upsilon,
               double scale, std::span<double> out) {
    for (std::size_t m = 0; m < v.size(); ++m) {
        const double mag = std::abs(v[m]);
        if (!(mag > upsilon)) {
            out[m] = OmegaMatrix::undefined;
            continue;
        }
        const double im = (vd[m] * std::conj(v[m])).imag() / (mag * mag);
        out[m] = static_cast<double>(m) - im * scale;
    }
}

std::vector<std::complex<double>> centring_phase(std::size_t fft_half, std::size_t window_half_length) {
    std::vector<std::complex<double>> phase(fft_half + 1);
    const std::size_t period = 2 * fft_half;
    for (std::size_t m = 0; m <= fft_half; ++m) {
        // Reduce K m modulo 2M first so the angle stays small and exact.
        const auto turn = static_cast<double>((window_half_length % period) * m % period);
        phase[m] = std::polar(1.0, std::numbers::pi * turn / static_cast<double>(fft_half));
    }
    return phase;
}

void squeeze_row(std::span<const std::complex<double>> src, std::span<const double> omega, SqueezeMode mode,
                 std::span<const std::complex<double>> phase, std::span<std::complex<double>> out) {
    std::fill(out.begin(), out.end(), std::complex<double>{});
    const double upper = static_cast<double>(out.size()) - 0.5;
    for (std::size_t l = 0; l < src.size(); ++l) {
        const double w = omega[l];
        if (w == OmegaMatrix::undefined || !(w >= -0.5) || !(w < upper)) continue;
        const auto target = static_cast<std::size_t>(std::floor(w + 0.5));
        if (mode == SqueezeMode::complex) {
            out[target] += src[l] * phase[l];
        } else {
            out[target] += std::norm(src[l]);
        }
    }
    if (mode == SqueezeMode::complex) {
        for (std::size_t m = 0; m < out.size(); ++m) out[m] *= std::conj(phase[m]);
    }
}

}  // namespace kernels

ComplexTfr stft(const Signal& f, std::span<const double> window, std::size_t fft_half, const FrameAxis& frames) {
    check_window(window, fft_half);
    check_frames(f, frames);
    ComplexTfr out(frames, fft_half, f.fs(), TfrKind::stft);
    RealFft fft(2 * fft_half);
    for (std::size_t r = 0; r < frames.count; ++r) {
        kernels::windowed_spectrum(f.samples(), frames.sample(r), window, fft, out.row(r));
    }
    return out;
}

RealTfr stct(const ComplexTfr& v, double gamma) {
    if (!(gamma > 0.0)) throw ParameterError("STCT power gamma must be positive");
    if (!v.full_band()) throw StructuralError("STCT needs all M+1 frequency bins");
    RealTfr out(v.frames(), v.fft_half(), v.fs(), TfrKind::stct);
    RealFft fft(v.fft_size());
    for (std::size_t r = 0; r < v.rows(); ++r) kernels::cepstrum_row(v.row(r), gamma, fft, out.row(r));
    return out;
}

RealTfr istct(const RealTfr& c, std::size_t fft_half) {
    if (c.cols() != fft_half + 1 || c.first_bin() != 0) {
        throw StructuralError("iSTCT expects " + std::to_string(fft_half + 1) + " quefrency columns, got " +
                              std::to_string(c.cols()));
    }
    RealTfr out(c.frames(), fft_half, c.fs(), TfrKind::istct_mask);
    for (std::size_t r = 0; r < c.rows(); ++r) kernels::mask_row(c.row(r), fft_half, out.row(r));
    return out;
}

ComplexTfr deshape(const ComplexTfr& v, const RealTfr& mask) {
    if (!v.same_shape(mask)) throw StructuralError("de-shape mask and STFT differ in shape");
    ComplexTfr out(v.frames(), v.fft_half(), v.fs(), TfrKind::dsstft, v.first_bin(), v.cols());
    const auto a = v.values();
    const auto u = mask.values();
    auto w = out.values();
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = a[i] * u[i];
    return out;
}

OmegaMatrix reassignment_operator(const ComplexTfr& v, const ComplexTfr& vd, double upsilon,
                                  std::size_t window_half_length) {
    if (!v.same_shape(vd)) throw StructuralError("window and derivative-window STFTs differ in shape");
    if (!v.full_band()) throw StructuralError("reassignment operator needs all M+1 frequency bins");
    if (window_half_length < 1) throw ParameterError("window half-length K must be at least 1");
    if (!(upsilon >= 0.0)) throw ParameterError("threshold upsilon must be non-negative");
    OmegaMatrix omega(v.rows(), v.cols());
    const double scale = omega_scale(v.fft_half(), window_half_length);
    for (std::size_t r = 0; r < v.rows(); ++r) kernels::omega_row(v.row(r), vd.row(r), upsilon, scale, omega.row(r));
    return omega;
}

ComplexTfr synchrosqueeze(const ComplexTfr& src, const OmegaMatrix& omega, std::size_t window_half_length,
                          SqueezeMode mode) {
    if (src.rows() != omega.rows() || src.cols() != omega.cols() || !src.full_band()) {
        throw StructuralError("synchrosqueeze: source and reassignment operator differ in shape");
    }
    ComplexTfr out(src.frames(), src.fft_half(), src.fs(), squeezed_kind(src.kind()));
    const auto phase = kernels::centring_phase(src.fft_half(), window_half_length);
    for (std::size_t r = 0; r < src.rows(); ++r) {
        kernels::squeeze_row(src.row(r), omega.row(r), mode, phase, out.row(r));
    }
    return out;
}

AnalysisResult analyze(const Signal& f, const Window& window, std::size_t fft_half, const FrameAxis& frames,
                       const DeshapeParams& params, const AnalysisRequest& request) {
    check_window(window.h, fft_half);
    check_frames(f, frames);
    if (!(params.gamma > 0.0)) throw ParameterError("STCT power gamma must be positive");
    if (!(params.upsilon >= 0.0)) throw ParameterError("threshold upsilon must be non-negative");
    const std::size_t bins = fft_half + 1;
    if (request.first_bin >= bins) throw ParameterError("requested first bin lies above the Nyquist bin");
    const std::size_t keep = std::min(request.bin_count, bins - request.first_bin);
    if (keep == 0) throw ParameterError("requested bin range is empty");

    AnalysisResult result;
    auto make_complex = [&](bool wanted, TfrKind kind, std::optional<ComplexTfr>& slot) {
        if (wanted) slot.emplace(frames, fft_half, f.fs(), kind, request.first_bin, keep);
    };
    auto make_real = [&](bool wanted, TfrKind kind, std::optional<RealTfr>& slot) {
        if (wanted) slot.emplace(frames, fft_half, f.fs(), kind, request.first_bin, keep);
    };
    make_complex(request.stft, TfrKind::stft, result.stft);
    make_real(request.stct, TfrKind::stct, result.stct);
    make_real(request.mask, TfrKind::istct_mask, result.mask);
    make_complex(request.dsstft, TfrKind::dsstft, result.dsstft);
    make_complex(request.sst, TfrKind::sst, result.sst);
    make_complex(request.dssst, TfrKind::dssst, result.dssst);

    const bool need_omega = request.sst || request.dssst;
    const bool need_mask = request.stct || request.mask || request.dsstft || request.dssst;

    RealFft fft(2 * fft_half);
    std::vector<std::complex<double>> v(bins), vd(bins), w(bins), squeezed(bins);
    std::vector<double> cep(bins), mask(bins), omega(bins);
    const double scale = omega_scale(fft_half, window.half_length);
    const auto phase = kernels::centring_phase(fft_half, window.half_length);

    auto keep_complex = [&](std::optional<ComplexTfr>& slot, std::size_t r, const std::vector<std::complex<double>>& row) {
        if (slot) std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(request.first_bin), keep, slot->row(r).begin());
    };
    auto keep_real = [&](std::optional<RealTfr>& slot, std::size_t r, const std::vector<double>& row) {
        if (slot) std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(request.first_bin), keep, slot->row(r).begin());
    };

    for (std::size_t r = 0; r < frames.count; ++r) {
        const std::size_t centre = frames.sample(r);
        kernels::windowed_spectrum(f.samples(), centre, window.h, fft, v);
        keep_complex(result.stft, r, v);
        if (need_omega) {
            kernels::windowed_spectrum(f.samples(), centre, window.dh, fft, vd);
            kernels::omega_row(v, vd, params.upsilon, scale, omega);
            result.undefined_omega += static_cast<std::size_t>(
                std::count(omega.begin(), omega.end(), OmegaMatrix::undefined));
        }
        if (need_mask) {
            kernels::cepstrum_row(v, params.gamma, fft, cep);
            keep_real(result.stct, r, cep);
            kernels::mask_row(cep, fft_half, mask);
            keep_real(result.mask, r, mask);
            for (std::size_t m = 0; m < bins; ++m) w[m] = v[m] * mask[m];
            keep_complex(result.dsstft, r, w);
        }
        if (request.sst) {
            kernels::squeeze_row(v, omega, params.mode, phase, squeezed);
            keep_complex(result.sst, r, squeezed);
        }
        if (request.dssst) {
            kernels::squeeze_row(w, omega, params.mode, phase, squeezed);
            keep_complex(result.dssst, r, squeezed);
        }
    }
    return result;
}

}  // namespace cadence
