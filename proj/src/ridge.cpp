#include "cadence/ridge.hpp"

#include "cadence/error.hpp"

#include <algorithm>
#include <cmath>

namespace cadence {

namespace {

constexpr double kLogFloor = 1e-12;

// One transition of the objective. extract_ridge and ridge_objective both go
// through here so the two accumulate bit-identically.
inline double advance(double score, double lambda, std::size_t from, std::size_t to, double log_term) {
    const double d = static_cast<double>(from) - static_cast<double>(to);
    return (score - lambda * (d * d)) + log_term;
}

std::vector<double> log_terms(const MagnitudeBlock& block, double& total) {
    total = 0.0;
    for (double v : block.values) total += v;
    std::vector<double> out(block.values.size());
    if (!(total > 0.0) || !std::isfinite(total)) return out;
    const double floor = kLogFloor * total;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(block.values[i], floor) / total);
    return out;
}

void check_block(const MagnitudeBlock& block, double lambda) {
    if (block.frames == 0) throw ParameterError("ridge extraction needs at least one frame");
    if (block.bins == 0) throw ParameterError("ridge extraction band is empty");
    if (block.values.size() != block.frames * block.bins) throw StructuralError("magnitude block size mismatch");
    if (!(lambda >= 0.0)) throw ParameterError("ridge penalty lambda must be non-negative");
}

}  // namespace

double ridge_objective(const MagnitudeBlock& block, std::span<const std::size_t> path, double lambda) {
    check_block(block, lambda);
    if (path.size() != block.frames) throw StructuralError("path length differs from frame count");
    double total = 0.0;
    const auto logs = log_terms(block, total);
    double score = logs[path[0]];
    for (std::size_t t = 1; t < path.size(); ++t) {
        score = advance(score, lambda, path[t - 1], path[t], logs[t * block.bins + path[t]]);
    }
    return score;
}

RidgeCurve extract_ridge(const MagnitudeBlock& block, double lambda) {
    check_block(block, lambda);
    RidgeCurve curve;
    curve.lambda = lambda;
    curve.band_high_bin = block.bins - 1;
    double total = 0.0;
    const auto logs = log_terms(block, total);
    if (!(total > 0.0) || !std::isfinite(total)) {
        curve.bins.assign(block.frames, 0);
        curve.status = RidgeStatus::degenerate;
        curve.objective = 0.0;
        return curve;
    }

    const std::size_t nb = block.bins;
    std::vector<double> score(logs.begin(), logs.begin() + static_cast<std::ptrdiff_t>(nb));
    std::vector<double> next(nb);
    std::vector<std::size_t> back(block.frames * nb, 0);
    for (std::size_t t = 1; t < block.frames; ++t) {
        const double* lt = logs.data() + t * nb;
        std::size_t* bt = back.data() + t * nb;
        for (std::size_t b = 0; b < nb; ++b) {
            double best = advance(score[0], lambda, 0, b, lt[b]);
            std::size_t arg = 0;
            for (std::size_t j = 1; j < nb; ++j) {
                const double cand = advance(score[j], lambda, j, b, lt[b]);
                if (cand > best) {
                    best = cand;
                    arg = j;
                }
            }
            next[b] = best;
            bt[b] = arg;
        }
        score.swap(next);
    }
    const auto last = std::max_element(score.begin(), score.end());  // first maximum = lowest bin
    curve.objective = *last;
    curve.bins.resize(block.frames);
    curve.bins.back() = static_cast<std::size_t>(last - score.begin());
    for (std::size_t t = block.frames - 1; t > 0; --t) curve.bins[t - 1] = back[t * nb + curve.bins[t]];
    return curve;
}

MagnitudeBlock magnitude_block(const ComplexTfr& tfr, std::size_t row_begin, std::size_t row_end,
                               std::size_t col_begin, std::size_t col_end) {
    if (row_begin > row_end || row_end >= tfr.rows()) throw ParameterError("ridge frame range outside the grid");
    if (col_begin > col_end || col_end >= tfr.cols()) throw ParameterError("ridge band outside the grid");
    MagnitudeBlock block;
    block.frames = row_end - row_begin + 1;
    block.bins = col_end - col_begin + 1;
    block.values.resize(block.frames * block.bins);
    for (std::size_t t = 0; t < block.frames; ++t) {
        const auto row = tfr.row(row_begin + t);
        for (std::size_t b = 0; b < block.bins; ++b) block.values[t * block.bins + b] = std::abs(row[col_begin + b]);
    }
    return block;
}

std::pair<std::size_t, std::size_t> band_columns(const ComplexTfr& tfr, const BandHz& band) {
    if (!(band.low <= band.high)) throw ParameterError("band low edge exceeds high edge");
    std::size_t lo = tfr.cols();
    std::size_t hi = 0;
    for (std::size_t c = 0; c < tfr.cols(); ++c) {
        const double f = tfr.frequency(c);
        if (f >= band.low && f <= band.high) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    if (lo == tfr.cols()) {
        throw ParameterError("band [" + std::to_string(band.low) + ", " + std::to_string(band.high) +
                             "] Hz contains no frequency bin");
    }
    return {lo, hi};
}

RidgeCurve extract_ridge(const ComplexTfr& tfr, std::size_t row_begin, std::size_t row_end, const BandHz& band,
                         double lambda) {
    const auto [lo, hi] = band_columns(tfr, band);
    auto curve = extract_ridge(magnitude_block(tfr, row_begin, row_end, lo, hi), lambda);
    const std::size_t offset = tfr.first_bin() + lo;
    for (auto& b : curve.bins) b += offset;
    curve.first_row = row_begin;
    curve.band_low_bin = offset;
    curve.band_high_bin = tfr.first_bin() + hi;
    return curve;
}

CadenceTrace cadence_from_ridge(const RidgeCurve& ridge, double fs, std::size_t fft_half, const FrameAxis& frames,
                                double t0) {
    if (!(fs > 0.0)) throw ParameterError("sampling rate must be positive");
    if (fft_half == 0) throw ParameterError("M must be positive");
    CadenceTrace trace;
    const std::size_t n = ridge.bins.size();
    trace.times.resize(n);
    trace.if_hz.resize(n);
    trace.cadence_hz.resize(n);
    const double bin_hz = fs / static_cast<double>(2 * fft_half);
    for (std::size_t l = 0; l < n; ++l) {
        trace.times[l] = t0 + static_cast<double>(frames.sample(ridge.first_row + l)) / fs;
        trace.if_hz[l] = static_cast<double>(ridge.bins[l]) * bin_hz;
        trace.cadence_hz[l] = 2.0 * trace.if_hz[l];
    }
    return trace;
}

}  // namespace cadence
