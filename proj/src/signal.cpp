#include "cadence/signal.hpp"

#include "cadence/error.hpp"

#include <algorithm>
#include <cmath>

namespace cadence {

Signal::Signal(std::vector<double> samples, double fs, double t0)
    : samples_(std::move(samples)), fs_(fs), t0_(t0) {
    if (!(fs > 0.0) || !std::isfinite(fs)) {
        throw ParameterError("sampling rate must be positive, got " + std::to_string(fs));
    }
}

std::string_view to_string(SensorLocation loc) {
    switch (loc) {
        case SensorLocation::wrist: return "wr";
        case SensorLocation::hip: return "hi";
        case SensorLocation::left_ankle: return "la";
        case SensorLocation::right_ankle: return "ra";
        case SensorLocation::other: return "other";
    }
    return "other";
}

SensorLocation parse_location(std::string_view tag) {
    if (tag == "wr" || tag == "wrist") return SensorLocation::wrist;
    if (tag == "hi" || tag == "hip") return SensorLocation::hip;
    if (tag == "la" || tag == "left_ankle") return SensorLocation::left_ankle;
    if (tag == "ra" || tag == "right_ankle") return SensorLocation::right_ankle;
    if (tag == "other") return SensorLocation::other;
    throw ParameterError("unknown sensor location '" + std::string(tag) + "'");
}

void TriaxialRecord::validate() const {
    if (x.size() != y.size() || x.size() != z.size()) {
        throw StructuralError("triaxial axes differ in length: " + std::to_string(x.size()) + ", " +
                              std::to_string(y.size()) + ", " + std::to_string(z.size()));
    }
    if (!(fs > 0.0)) throw ParameterError("sampling rate must be positive");
}

Signal vector_magnitude(const TriaxialRecord& rec) {
    rec.validate();
    std::vector<double> out(rec.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::sqrt(rec.x[k] * rec.x[k] + rec.y[k] * rec.y[k] + rec.z[k] * rec.z[k]);
    }
    return Signal(std::move(out), rec.fs, rec.t0);
}

namespace {

double sorted_median(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

Signal median_detrend(const Signal& s, std::size_t order) {
    if (order == 0) throw ParameterError("median filter order must be at least 1");
    if (s.empty()) throw ParameterError("median filter needs a non-empty signal");
    if (order > s.size()) {
        throw ParameterError("median filter order " + std::to_string(order) + " exceeds signal length " +
                             std::to_string(s.size()));
    }
    const auto x = s.samples();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    // Window around k: ceil(order/2) samples up to and including k, floor(order/2) after it.
    const std::ptrdiff_t back = static_cast<std::ptrdiff_t>((order + 1) / 2) - 1;
    const std::ptrdiff_t ahead = static_cast<std::ptrdiff_t>(order / 2);

    std::vector<double> window;
    window.reserve(order);
    std::ptrdiff_t lo = 0;  // current window is [lo, hi)
    std::ptrdiff_t hi = 0;
    std::vector<double> out(x.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const std::ptrdiff_t want_lo = std::max<std::ptrdiff_t>(0, k - back);
        const std::ptrdiff_t want_hi = std::min(n, k + ahead + 1);
        for (; hi < want_hi; ++hi) {
            window.insert(std::upper_bound(window.begin(), window.end(), x[hi]), x[hi]);
        }
        for (; lo < want_lo; ++lo) {
            window.erase(std::lower_bound(window.begin(), window.end(), x[lo]));
        }
        out[k] = x[k] - sorted_median(window);
    }
    return Signal(std::move(out), s.fs(), s.t0());
}

std::size_t default_detrend_order(double fs) {
    return static_cast<std::size_t>(std::max(1.0, std::round(10.0 * fs)));
}

Signal rectify(const Signal& s) {
    std::vector<double> out(s.samples().begin(), s.samples().end());
    for (double& v : out) v = std::abs(v);
    return Signal(std::move(out), s.fs(), s.t0());
}

Window gaussian_window(std::size_t half_length, double sigma) {
    if (half_length < 1) throw ParameterError("window half-length K must be at least 1");
    if (!(sigma > 0.0)) throw ParameterError("window sigma must be positive");
    Window w;
    w.half_length = half_length;
    w.sigma = sigma;
    const std::size_t len = 2 * half_length + 1;
    w.h.resize(len);
    w.dh.resize(len);
    const double span = 2.0 * static_cast<double>(half_length);
    const double var = sigma * sigma;
    for (std::size_t k = 0; k < len; ++k) {
        // Offsets are formed as (k - K) / 2K so the grid is exactly antisymmetric about the center.
        const double u = (static_cast<double>(k) - static_cast<double>(half_length)) / span;
        w.h[k] = std::exp(-u * u / (2.0 * var));
        w.dh[k] = -u * w.h[k] / var;
    }
    return w;
}

}  // namespace cadence
