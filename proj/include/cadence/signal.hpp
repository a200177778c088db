#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cadence {

/// Uniformly sampled real time series. Sample k sits at t0 + k / fs.
class Signal {
public:
    Signal(std::vector<double> samples, double fs, double t0 = 0.0);

    std::span<const double> samples() const noexcept { return samples_; }
    std::vector<double>& mutable_samples() noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    double operator[](std::size_t k) const { return samples_[k]; }

    double fs() const noexcept { return fs_; }
    double t0() const noexcept { return t0_; }
    double time_at(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) / fs_; }

private:
    std::vector<double> samples_;
    double fs_;
    double t0_;
};

enum class SensorLocation { wrist, hip, left_ankle, right_ankle, other };

std::string_view to_string(SensorLocation loc);
/// Accepts the short tags wr/hi/la/ra/other as well as the long names.
SensorLocation parse_location(std::string_view tag);

/// Raw triaxial accelerometry from one sensor.
struct TriaxialRecord {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    double fs = 0.0;
    double t0 = 0.0;
    SensorLocation location = SensorLocation::other;

    std::size_t size() const noexcept { return x.size(); }
    /// Throws StructuralError on unequal axes, ParameterError on fs <= 0.
    void validate() const;
};

/// Sampled analysis window h and its analytic derivative dh, both of length 2K+1.
struct Window {
    std::vector<double> h;
    std::vector<double> dh;
    std::size_t half_length = 0;  // K
    double sigma = 0.0;

    std::size_t length() const noexcept { return 2 * half_length + 1; }
};

/// Euclidean norm of the three axes, sample by sample.
Signal vector_magnitude(const TriaxialRecord& rec);

/// Subtracts a running median of `order` samples. Windows shrink at the edges;
/// an even count takes the mean of the two middle values.
Signal median_detrend(const Signal& s, std::size_t order);

/// Default detrend order: round(10 * fs) samples.
std::size_t default_detrend_order(double fs);

Signal rectify(const Signal& s);

/// Gaussian window sampled on [-0.5, 0.5] with spacing 1/(2K):
/// h(u) = exp(-u^2 / (2 sigma^2)), dh(u) = -u h(u) / sigma^2.
Window gaussian_window(std::size_t half_length, double sigma);

}  // namespace cadence
