#include "cadence/fft.hpp"

#include "cadence/error.hpp"

#include <fftw3.h>

#include <mutex>

namespace cadence {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct RealFft::Impl {
    double* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n < 1) throw ParameterError("FFT length must be positive");
    impl_->in = fftw_alloc_real(n);
    impl_->out = fftw_alloc_complex(n / 2 + 1);
    if (!impl_->in || !impl_->out) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    impl_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), impl_->in, impl_->out, FFTW_ESTIMATE);
    if (!impl_->plan) throw Error("FFTW failed to create a plan of length " + std::to_string(n));
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::span<double> RealFft::input() noexcept { return {impl_->in, n_}; }

std::span<const std::complex<double>> RealFft::output() const noexcept {
    // fftw_complex is layout-compatible with std::complex<double>.
    return {reinterpret_cast<const std::complex<double>*>(impl_->out), n_ / 2 + 1};
}

void RealFft::execute() { fftw_execute(impl_->plan); }

}  // namespace cadence
