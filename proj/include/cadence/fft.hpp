#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace cadence {

/// Forward real-to-complex DFT of fixed length n, X[m] = sum_k x[k] exp(-i 2 pi k m / n),
/// for m = 0 .. n/2. Owns its plan and aligned buffers; not copyable, movable.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const noexcept { return n_; }
    std::size_t bins() const noexcept { return n_ / 2 + 1; }

    /// Length-n input buffer; fill it, then call execute().
    std::span<double> input() noexcept;
    std::span<const std::complex<double>> output() const noexcept;
    void execute();

private:
    struct Impl;
    std::size_t n_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cadence
