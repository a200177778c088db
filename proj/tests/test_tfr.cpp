#include "cadence/error.hpp"
#include "cadence/tfr.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cadence;

namespace {

constexpr double kPi = std::numbers::pi;

Signal tone(std::size_t n, double fs, std::initializer_list<std::pair<double, double>> parts) {
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / fs;
        for (auto [freq, amp] : parts) v[k] += amp * std::cos(2.0 * kPi * freq * t);
    }
    return Signal(std::move(v), fs);
}

Signal noise(std::size_t n, double fs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return Signal(std::move(v), fs);
}

std::vector<std::size_t> all_rows(const ComplexTfr& g) {
    std::vector<std::size_t> c;
    for (std::size_t r = 0; r < g.rows(); ++r) c.push_back(g.frames().sample(r));
    return c;
}

// Grid with one value per bin, repeated on each of `rows` frames.
ComplexTfr grid_from_row(const std::vector<double>& row, std::size_t rows = 1) {
    ComplexTfr g(FrameAxis::every_sample(rows), row.size() - 1, 100.0, TfrKind::stft);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t m = 0; m < row.size(); ++m) g(r, m) = row[m];
    }
    return g;
}

}  // namespace

TEST(Stft, ZeroSignalGivesZeroMatrix) {
    const Window w = gaussian_window(8, 0.15);
    const auto v = stft(Signal(std::vector<double>(40, 0.0), 10.0), w.h, 32);
    EXPECT_EQ(v.rows(), 40u);
    EXPECT_EQ(v.cols(), 33u);
    for (auto x : v.values()) EXPECT_EQ(x, std::complex<double>{});
}

TEST(Stft, MatchesDirectSumOnRandomSignals) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 300)(rng);
        const std::size_t K = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        const std::size_t M = std::uniform_int_distribution<std::size_t>(K + 1, 2 * K + 40)(rng);
        const std::size_t hop = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const Signal f = noise(n, 50.0, rng());
        const Window w = gaussian_window(K, 0.2);
        const FrameAxis frames{0, hop, (n + hop - 1) / hop};
        const auto v = stft(f, w.h, M, frames);
        const std::vector<double> fv(f.samples().begin(), f.samples().end());
        const auto ref = oracle::direct_stft(fv, w.h, M, all_rows(v));
        double err = 0.0, norm = 0.0;
        for (std::size_t r = 0; r < v.rows(); ++r) {
            for (std::size_t m = 0; m <= M; ++m) {
                err += std::norm(v(r, m) - ref[r][m]);
                norm += std::norm(ref[r][m]);
            }
        }
        EXPECT_LE(std::sqrt(err / norm), 1e-9) << "n=" << n << " K=" << K << " M=" << M;
    }
}

TEST(Stft, BoundaryFrameUsesZeroExtension) {
    const Signal f = noise(50, 10.0, 9);
    const Window w = gaussian_window(20, 0.15);
    const auto v = stft(f, w.h, 64, FrameAxis{0, 1, 1});
    const std::vector<double> fv(f.samples().begin(), f.samples().end());
    const auto ref = oracle::direct_stft(fv, w.h, 64, {0});
    for (std::size_t m = 0; m <= 64; ++m) EXPECT_NEAR(std::abs(v(0, m) - ref[0][m]), 0.0, 1e-12);
}

TEST(Stft, CosineOnBinPeaksAtThatBin) {
    const double fs = 100.0;
    const std::size_t M = 256, b = 20;
    const double f0 = static_cast<double>(b) * fs / (2.0 * M);
    const Signal f = tone(1000, fs, {{f0, 1.0}});
    const Window w = gaussian_window(100, 0.15);
    const auto v = stft(f, w.h, M, FrameAxis{500, 1, 1});
    std::size_t best = 0;
    for (std::size_t m = 1; m <= M; ++m) {
        if (std::abs(v(0, m)) > std::abs(v(0, best))) best = m;
    }
    EXPECT_EQ(best, b);
    EXPECT_NEAR(v.frequency(best), f0, 1e-12);
}

TEST(Stft, Linearity) {
    const Signal a = noise(200, 20.0, 1), b = noise(200, 20.0, 2);
    std::vector<double> mix(200);
    for (std::size_t k = 0; k < 200; ++k) mix[k] = 2.5 * a[k] - 0.75 * b[k];
    const Window w = gaussian_window(15, 0.15);
    const auto va = stft(a, w.h, 40), vb = stft(b, w.h, 40), vm = stft(Signal(mix, 20.0), w.h, 40);
    for (std::size_t i = 0; i < vm.values().size(); ++i) {
        EXPECT_NEAR(std::abs(vm.values()[i] - (2.5 * va.values()[i] - 0.75 * vb.values()[i])), 0.0, 1e-12);
    }
}

TEST(Stft, ShortFftIsAParameterError) {
    const Window w = gaussian_window(10, 0.15);
    EXPECT_THROW(stft(noise(30, 1.0, 1), w.h, 10), ParameterError);
    EXPECT_NO_THROW(stft(noise(30, 1.0, 1), w.h, 11));
    EXPECT_EQ(default_fft_half(600), 4096u);
    EXPECT_EQ(default_fft_half(1), 8u);
}

TEST(Stct, ConstantSpectrum) {
    const std::size_t M = 16;
    const double gamma = 0.5, c = 3.0;
    // |V|^gamma = c  <=>  |V| = c^(1/gamma)
    const auto v = grid_from_row(std::vector<double>(M + 1, std::pow(c, 1.0 / gamma)));
    const auto C = stct(v, gamma);
    EXPECT_NEAR(C(0, 0), 2.0 * M * c, 1e-9);
    for (std::size_t q = 1; q <= M; ++q) EXPECT_NEAR(C(0, q), 0.0, 1e-9);
}

TEST(Stct, SampledCosineSpectrum) {
    const std::size_t M = 32;
    for (std::size_t p : {1u, 5u, 17u, 31u}) {
        std::vector<double> row(M + 1);
        for (std::size_t m = 0; m <= M; ++m) row[m] = 1.0 + std::cos(2.0 * kPi * static_cast<double>(p * m) / (2.0 * M));
        const auto C = stct(grid_from_row(row), 1.0);
        // DFT of 1 + cos(2 pi p m / 2M) over 2M points: 2M at 0, M at p and 2M - p.
        for (std::size_t q = 0; q <= M; ++q) {
            const double expected = q == 0 ? 2.0 * M : (q == p ? static_cast<double>(M) : 0.0);
            EXPECT_NEAR(C(0, q), expected, 1e-9) << "p=" << p << " q=" << q;
        }
    }
}

TEST(Stct, ZeroFrameAndErrors) {
    const auto C = stct(grid_from_row(std::vector<double>(9, 0.0)), 0.3);
    for (double x : C.values()) EXPECT_EQ(x, 0.0);
    EXPECT_THROW(stct(grid_from_row(std::vector<double>(9, 1.0)), 0.0), ParameterError);
    EXPECT_THROW(stct(grid_from_row(std::vector<double>(9, 1.0)), -1.0), ParameterError);
}

TEST(Stct, OutputIsNonNegative) {
    const Window w = gaussian_window(30, 0.15);
    const auto C = stct(stft(noise(300, 10.0, 4), w.h, 64), 0.3);
    for (double x : C.values()) EXPECT_GE(x, 0.0);
}

TEST(Istct, NodesAndBelowRange) {
    const std::size_t M = 24;
    RealTfr c(FrameAxis::every_sample(1), M, 100.0, TfrKind::stct);
    std::mt19937_64 rng(8);
    for (auto& x : c.values()) x = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    const auto U = istct(c, M);
    EXPECT_EQ(U.kind(), TfrKind::istct_mask);
    EXPECT_EQ(U(0, 0), 0.0);
    EXPECT_EQ(U(0, 1), 0.0);  // 1 / 2M lies below the smallest node 1/M
    for (std::size_t j = 2; j <= M; ++j) {
        if ((2 * M) % j != 0) continue;
        EXPECT_EQ(U(0, 2 * M / j), c(0, j)) << "j=" << j;
    }
    for (double x : U.values()) EXPECT_GE(x, 0.0);
}

TEST(Istct, LinearBlendBetweenNodes) {
    // 2M = 10: bin 4 asks for g(0.4), between the nodes 1/3 (C[3]) and 1/2 (C[2]).
    const std::size_t M = 5;
    RealTfr c(FrameAxis::every_sample(1), M, 1.0, TfrKind::stct);
    const std::vector<double> vals{9.0, 7.0, 2.0, 5.0, 3.0, 1.0};
    std::copy(vals.begin(), vals.end(), c.values().begin());
    const auto U = istct(c, M);
    const double a = vals[2], b = vals[3];
    EXPECT_NEAR(U(0, 4), a * (0.4 - 1.0 / 3.0) / (1.0 / 6.0) + b * (0.5 - 0.4) / (1.0 / 6.0), 1e-14);
    EXPECT_NEAR(U(0, 4), 0.4 * a + 0.6 * b, 1e-14);
    // 0.3 between 1/4 and 1/3
    EXPECT_NEAR(U(0, 3), 0.6 * vals[3] + 0.4 * vals[4], 1e-14);
    EXPECT_EQ(U(0, 2), vals[5]);
    EXPECT_EQ(U(0, 5), vals[2]);
    EXPECT_EQ(U(0, 1), 0.0);
}

TEST(Istct, ColumnMismatchIsStructural) {
    RealTfr c(FrameAxis::every_sample(1), 8, 1.0, TfrKind::stct);
    EXPECT_THROW(istct(c, 9), StructuralError);
}

TEST(Deshape, IdentityAndZeroMasks) {
    const Window w = gaussian_window(10, 0.15);
    const auto v = stft(noise(80, 10.0, 3), w.h, 32);
    RealTfr ones(v.frames(), 32, 10.0, TfrKind::istct_mask), zeros(v.frames(), 32, 10.0, TfrKind::istct_mask);
    std::fill(ones.values().begin(), ones.values().end(), 1.0);
    const auto w1 = deshape(v, ones), w0 = deshape(v, zeros);
    EXPECT_EQ(w1.kind(), TfrKind::dsstft);
    for (std::size_t i = 0; i < v.values().size(); ++i) {
        EXPECT_EQ(w1.values()[i], v.values()[i]);
        EXPECT_EQ(w0.values()[i], std::complex<double>{});
    }
    RealTfr wrong(FrameAxis::every_sample(3), 32, 10.0, TfrKind::istct_mask);
    EXPECT_THROW(deshape(v, wrong), StructuralError);
}

TEST(Deshape, MagnitudeIsMaskTimesMagnitude) {
    const Window w = gaussian_window(40, 0.15);
    const Signal f = noise(400, 20.0, 12);
    const auto v = stft(f, w.h, 128);
    const auto U = istct(stct(v, 0.3), 128);
    const auto W = deshape(v, U);
    for (std::size_t i = 0; i < v.values().size(); ++i) {
        EXPECT_NEAR(std::abs(W.values()[i]), U.values()[i] * std::abs(v.values()[i]), 1e-12 * (1.0 + std::abs(W.values()[i])));
    }
}

TEST(Deshape, SuppressesDominantSecondHarmonic) {
    // 1 Hz fundamental, 2 Hz harmonic twice as strong; 12 s window at 32 Hz.
    const double fs = 32.0;
    const std::size_t K = 192;
    const std::size_t M = default_fft_half(K);
    const Signal f = tone(60 * 32, fs, {{1.0, 1.0}, {2.0, 2.0}});
    const auto v = stft(f, gaussian_window(K, 0.15).h, M);
    const auto W = deshape(v, istct(stct(v, 0.3), M));
    const std::size_t b1 = static_cast<std::size_t>(std::lround(1.0 * 2.0 * M / fs));
    const std::size_t b2 = 2 * b1;
    double v1 = 0, v2 = 0, w1 = 0, w2 = 0;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        v1 += std::abs(v(r, b1));
        v2 += std::abs(v(r, b2));
        w1 += std::abs(W(r, b1));
        w2 += std::abs(W(r, b2));
    }
    EXPECT_GT(v2 / v1, 1.0);
    EXPECT_LT(w2 / w1, v2 / v1);
}

TEST(Reassignment, ThresholdSentinel) {
    std::vector<double> s(200, 0.0);
    for (std::size_t k = 120; k < 200; ++k) s[k] = std::sin(0.3 * static_cast<double>(k));
    const Window w = gaussian_window(10, 0.15);
    const Signal f(s, 10.0);
    const auto v = stft(f, w.h, 32), vd = stft(f, w.dh, 32);
    const double upsilon = 1e-3;
    const auto omega = reassignment_operator(v, vd, upsilon, 10);
    std::size_t undefined = 0;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        for (std::size_t m = 0; m < v.cols(); ++m) {
            if (std::abs(v(r, m)) <= upsilon) {
                EXPECT_FALSE(omega.defined(r, m));
                EXPECT_EQ(omega(r, m), OmegaMatrix::undefined);
                ++undefined;
            } else {
                EXPECT_TRUE(std::isfinite(omega(r, m)));
            }
        }
    }
    EXPECT_GT(undefined, 0u);
    EXPECT_EQ(omega.defined_count() + undefined, v.values().size());
}

TEST(Reassignment, ZeroDerivativeGivesIdentity) {
    const Window w = gaussian_window(10, 0.15);
    const auto v = stft(noise(60, 10.0, 6), w.h, 32);
    ComplexTfr vd(v.frames(), 32, 10.0, TfrKind::stft);
    const auto omega = reassignment_operator(v, vd, 1e-9, 10);
    for (std::size_t r = 0; r < v.rows(); ++r) {
        for (std::size_t m = 0; m < v.cols(); ++m) {
            if (omega.defined(r, m)) {
                EXPECT_EQ(omega(r, m), static_cast<double>(m));
            }
        }
    }
    const auto sv = synchrosqueeze(v, omega, 10);
    EXPECT_EQ(sv.kind(), TfrKind::sst);
    for (std::size_t r = 0; r < v.rows(); ++r) {
        for (std::size_t m = 0; m < v.cols(); ++m) {
            const auto expected = omega.defined(r, m) ? v(r, m) : std::complex<double>{};
            EXPECT_LE(std::abs(sv(r, m) - expected), 1e-15 * std::abs(expected));
        }
    }
}

TEST(Reassignment, ToneMapsToItsBin) {
    const double fs = 100.0;
    const std::size_t K = 200, M = default_fft_half(K);
    for (std::size_t b : {33u, 82u, 150u}) {
        const Signal f = tone(2000, fs, {{static_cast<double>(b) * fs / (2.0 * M), 1.0}});
        const Window w = gaussian_window(K, 0.15);
        const FrameAxis mid{1000, 1, 1};
        const auto omega = reassignment_operator(stft(f, w.h, M, mid), stft(f, w.dh, M, mid), 1e-9, K);
        ASSERT_TRUE(omega.defined(0, b));
        EXPECT_NEAR(omega(0, b), static_cast<double>(b), 0.5);
        // Neighbouring bins reassign towards the tone as well.
        EXPECT_NEAR(omega(0, b + 2), static_cast<double>(b), 0.5);
        EXPECT_NEAR(omega(0, b - 2), static_cast<double>(b), 0.5);
    }
}

TEST(Reassignment, LargerThresholdNeverAddsCells) {
    const Window w = gaussian_window(12, 0.15);
    const Signal f = noise(150, 10.0, 21);
    const auto v = stft(f, w.h, 32), vd = stft(f, w.dh, 32);
    double prev = 0.0;
    std::optional<OmegaMatrix> last;
    for (double upsilon : {0.0, 1e-9, 1e-3, 0.01, 0.1, 0.5, 1.0, 5.0}) {
        ASSERT_GE(upsilon, prev);
        const auto omega = reassignment_operator(v, vd, upsilon, 12);
        if (last) {
            for (std::size_t r = 0; r < v.rows(); ++r) {
                for (std::size_t m = 0; m < v.cols(); ++m) {
                    if (omega.defined(r, m)) {
                        EXPECT_TRUE(last->defined(r, m));
                    }
                }
            }
            EXPECT_LE(omega.defined_count(), last->defined_count());
        }
        last = omega;
        prev = upsilon;
    }
}

TEST(Reassignment, ShapeMismatchIsStructural) {
    const Window w = gaussian_window(5, 0.15);
    const auto v = stft(noise(30, 10.0, 1), w.h, 16);
    const auto vd = stft(noise(31, 10.0, 1), w.dh, 16);
    EXPECT_THROW(reassignment_operator(v, vd, 1e-9, 5), StructuralError);
}

TEST(Synchrosqueeze, ConservesWhatItMoves) {
    const Window w = gaussian_window(20, 0.15);
    const Signal f = noise(120, 10.0, 17);
    const auto v = stft(f, w.h, 64), vd = stft(f, w.dh, 64);
    const auto omega = reassignment_operator(v, vd, 1e-9, 20);
    const auto sv = synchrosqueeze(v, omega, 20);
    const auto se = synchrosqueeze(v, omega, 20, SqueezeMode::energy);
    // Complex sums are conserved in the frame-centred phase.
    const auto phase = kernels::centring_phase(64, 20);
    for (std::size_t r = 0; r < v.rows(); ++r) {
        std::complex<double> moved{}, total{};
        double energy = 0.0, energy_total = 0.0;
        for (std::size_t l = 0; l < v.cols(); ++l) {
            const double o = omega(r, l);
            if (omega.defined(r, l) && o >= -0.5 && o < static_cast<double>(v.cols()) - 0.5) {
                moved += v(r, l) * phase[l];
                energy += std::norm(v(r, l));
            }
            total += sv(r, l) * phase[l];
            energy_total += se(r, l).real();
            EXPECT_EQ(se(r, l).imag(), 0.0);
        }
        EXPECT_NEAR(std::abs(total - moved), 0.0, 1e-10 * (1.0 + std::abs(moved)));
        EXPECT_NEAR(energy_total, energy, 1e-10 * (1.0 + energy));
    }
}

TEST(Synchrosqueeze, ConcentratesBinAlignedTone) {
    const double fs = 100.0;
    const std::size_t K = 200, M = default_fft_half(K), b = 82;
    const Signal f = tone(2000, fs, {{static_cast<double>(b) * fs / (2.0 * M), 1.0}});
    const Window w = gaussian_window(K, 0.15);
    const FrameAxis frames{600, 50, 17};
    const auto v = stft(f, w.h, M, frames), vd = stft(f, w.dh, M, frames);
    const auto sv = synchrosqueeze(v, reassignment_operator(v, vd, 1e-9, K), K);
    for (std::size_t r = 0; r < sv.rows(); ++r) {
        double near = 0.0, all = 0.0, v_near = 0.0, v_all = 0.0;
        for (std::size_t m = 0; m < sv.cols(); ++m) {
            const bool close = m + 1 >= b && m <= b + 1;
            all += std::abs(sv(r, m));
            v_all += std::abs(v(r, m));
            if (close) {
                near += std::abs(sv(r, m));
                v_near += std::abs(v(r, m));
            }
        }
        EXPECT_GE(near / all, 0.9);
        EXPECT_GT(near / all, v_near / v_all);
    }
}

TEST(Analyze, MatchesChainedGridOperations) {
    const Window w = gaussian_window(25, 0.15);
    const std::size_t M = default_fft_half(25);
    const Signal f = rectify(tone(400, 20.0, {{1.1, 1.0}, {2.2, 1.5}}));
    const FrameAxis frames{3, 7, 50};
    DeshapeParams params;
    AnalysisRequest all{true, true, true, true, true, true};
    const auto res = analyze(f, w, M, frames, params, all);

    const auto v = stft(f, w.h, M, frames), vd = stft(f, w.dh, M, frames);
    const auto C = stct(v, params.gamma);
    const auto U = istct(C, M);
    const auto W = deshape(v, U);
    const auto omega = reassignment_operator(v, vd, params.upsilon, 25);
    const auto sv = synchrosqueeze(v, omega, 25), sw = synchrosqueeze(W, omega, 25);
    auto same = [](const auto& a, const auto& b) {
        ASSERT_TRUE(a.same_shape(b));
        EXPECT_EQ(a.kind(), b.kind());
        for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
    };
    same(*res.stft, v);
    same(*res.stct, C);
    same(*res.mask, U);
    same(*res.dsstft, W);
    same(*res.sst, sv);
    same(*res.dssst, sw);
    EXPECT_EQ(res.undefined_omega, omega.rows() * omega.cols() - omega.defined_count());

    AnalysisRequest cropped;
    cropped.first_bin = 10;
    cropped.bin_count = 20;
    const auto part = analyze(f, w, M, frames, params, cropped);
    ASSERT_TRUE(part.dssst);
    EXPECT_FALSE(part.stft);
    EXPECT_EQ(part.dssst->first_bin(), 10u);
    EXPECT_EQ(part.dssst->cols(), 20u);
    for (std::size_t r = 0; r < frames.count; ++r) {
        for (std::size_t c = 0; c < 20; ++c) EXPECT_EQ((*part.dssst)(r, c), sw(r, c + 10));
    }
    EXPECT_NEAR(part.dssst->frequency(0), 10 * 20.0 / (2.0 * M), 1e-15);
}
