// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
//   cadence_acceptance <path to cadence CLI>

#include "../oracles.hpp"
#include "cadence/bout_analysis.hpp"
#include "cadence/pipeline.hpp"
#include "cadence/ridge.hpp"
#include "cadence/signal.hpp"
#include "cadence/tfr.hpp"
#include "cadence/walk_synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace cadence;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_s > 0.0 && elapsed >= limit_s) {
        out.pass = false;
        out.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s limit)";
    }
    if (!out.pass) ++failures;
    std::printf("%s  %-28s %7.2f s  %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), elapsed, out.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

TriaxialRecord to_record(const Signal& y, double baseline = 1.0) {
    TriaxialRecord rec;
    rec.fs = y.fs();
    const double axis = 1.0 / std::sqrt(3.0);
    for (double v : y.samples()) {
        rec.x.push_back((baseline + v) * axis);
        rec.y.push_back((baseline + v) * axis);
        rec.z.push_back((baseline + v) * axis);
    }
    return rec;
}

BoutList bouts_of(const WalkingModelSpec& spec) {
    std::vector<Bout> out;
    for (const auto& b : spec.bouts) out.push_back({b.start_s, b.end_s, activity_from_label(b.label)});
    return BoutList(out);
}

struct TrackError {
    double mean = 0.0;
    double rmse = 0.0;
    double max_abs = 0.0;
    std::size_t n = 0;
};

/// Cadence error against 2 phi' over the interior 80% of bout 0.
TrackError interior_error(const CadenceTrace& trace, const SynthResult& synth, const WalkingModelSpec& spec) {
    const auto& b = spec.bouts[0];
    const double margin = 0.1 * (b.end_s - b.start_s);
    TrackError e;
    double sum = 0.0, ss = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.times[k];
        if (t < b.start_s + margin || t > b.end_s - margin) continue;
        const auto idx = static_cast<std::size_t>(std::llround(t * spec.fs));
        const double err = trace.cadence_hz[k] - 2.0 * synth.truth_if[idx];
        sum += trace.cadence_hz[k];
        ss += err * err;
        e.max_abs = std::max(e.max_abs, std::abs(err));
        ++e.n;
    }
    e.mean = sum / static_cast<double>(e.n);
    e.rmse = std::sqrt(ss / static_cast<double>(e.n));
    return e;
}

/// Sum of |X|^2 over bins within `half_width` Hz of `centre`.
template <typename Grid>
double band_mass(const Grid& g, double centre, double half_width) {
    double mass = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) {
            if (std::abs(g.frequency(c) - centre) <= half_width) mass += std::norm(g(r, c));
        }
    }
    return mass;
}

Outcome stft_oracle() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t K = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 512)(rng);
        const std::size_t fft_half = std::uniform_int_distribution<std::size_t>(K + 1, 4 * (2 * K + 1))(rng);
        const double sigma = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        std::normal_distribution<double> d(0.0, 1.0);
        std::vector<double> f(n);
        for (auto& x : f) x = d(rng);
        const Window w = gaussian_window(K, sigma);
        const auto fast = stft(Signal(f, 100.0), w.h, fft_half, FrameAxis::every_sample(n));
        std::vector<std::size_t> centres(n);
        for (std::size_t k = 0; k < n; ++k) centres[k] = k;
        const auto direct = oracle::direct_stft(f, w.h, fft_half, centres);
        long double diff = 0.0L, norm = 0.0L;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t m = 0; m <= fft_half; ++m) {
                diff += std::norm(std::complex<long double>(fast(r, m)) - std::complex<long double>(direct[r][m]));
                norm += std::norm(std::complex<long double>(direct[r][m]));
            }
        }
        const double rel = norm > 0.0L ? static_cast<double>(std::sqrt(diff / norm)) : static_cast<double>(diff);
        worst = std::max(worst, rel);
    }
    return {worst <= 1e-9, fmt("worst relative Frobenius error %.3g over 50 cases", worst)};
}

Outcome ridge_exactness() {
    std::mt19937_64 rng(77);
    const double lambdas[] = {0.0, 0.1, 1.0, 10.0};
    int objective_mismatch = 0, path_mismatch = 0;
    double worst_independent = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t frames = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const std::size_t bins = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const double lambda = lambdas[trial % 4];
        const auto block = oracle::random_block(rng, frames, bins, 0.1);
        const auto ridge = extract_ridge(block, lambda);
        const auto brute = oracle::brute_force_ridge(frames, bins, [&](const std::vector<std::size_t>& p) {
            return ridge_objective(block, p, lambda);
        });
        if (ridge.objective != brute.objective) ++objective_mismatch;
        if (ridge.bins != brute.path) ++path_mismatch;
        const double independent = static_cast<double>(oracle::ridge_score(block, brute.path, lambda));
        worst_independent =
            std::max(worst_independent, std::abs(ridge.objective - independent) / (1.0 + std::abs(independent)));
    }
    const bool ok = objective_mismatch == 0 && path_mismatch == 0 && worst_independent <= 1e-9;
    return {ok, fmt("objective mismatches %.0f, path mismatches %.0f, independent scorer gap %.2g",
                    objective_mismatch, path_mismatch, worst_independent)};
}

Outcome constant_cadence() {
    const auto spec = preset_walk("constant");
    const auto synth = synthesize_walk(spec, 1);
    const auto res = run_pipeline(to_record(synth.signal), bouts_of(spec), PipelineConfig{});
    if (!res.analyses[0]) return {false, "bout failed: " + res.report.bouts[0].message};
    const auto e = interior_error(res.analyses[0]->trace, synth, spec);
    const auto* row = res.summary.find(SensorLocation::other, Activity::walking);
    const double mean = row ? row->mean : std::nan("");
    const bool ok = std::abs(mean - 2.0) <= 0.02 && std::abs(e.mean - 2.0) <= 0.02 && e.max_abs <= 0.05;
    return {ok, fmt("bout mean %.4f Hz, interior mean %.4f Hz, max interior error %.4f Hz", mean, e.mean, e.max_abs)};
}

Outcome chirp_tracking() {
    const auto spec = preset_walk("chirp");
    const auto synth = synthesize_walk(spec, 1);
    const auto res = run_pipeline(to_record(synth.signal), bouts_of(spec), PipelineConfig{});
    if (!res.analyses[0]) return {false, "bout failed: " + res.report.bouts[0].message};
    const auto e = interior_error(res.analyses[0]->trace, synth, spec);
    return {e.rmse <= 0.06, fmt("interior RMSE %.4f Hz (max %.4f Hz)", e.rmse, e.max_abs)};
}

Outcome harmonic_suppression() {
    const auto spec = preset_walk("constant");
    const auto synth = synthesize_walk(spec, 1);
    const PipelineConfig config;
    const double fs = spec.fs;
    const std::size_t K = config.window_half_length(fs), M = config.fft_half(K);
    const double f0 = spec.bouts[0].frequency.start_hz, half_width = 0.15;

    // Spectrogram of the walking signal itself over the bout.
    const auto frames = FrameAxis::covering(static_cast<std::size_t>(spec.bouts[0].start_s * fs),
                                            static_cast<std::size_t>(spec.bouts[0].end_s * fs), 10);
    const auto v = stft(synth.signal, gaussian_window(K, config.sigma).h, M, frames);
    const double spec_ratio = band_mass(v, 2.0 * f0, half_width) / band_mass(v, f0, half_width);

    const auto res = run_pipeline(to_record(synth.signal), bouts_of(spec), config);
    if (!res.analyses[0] || !res.analyses[0]->tfr) return {false, "bout failed: " + res.report.bouts[0].message};
    const auto& sw = *res.analyses[0]->tfr;
    const double ds_ratio = band_mass(sw, 2.0 * f0, half_width) / band_mass(sw, f0, half_width);
    return {spec_ratio > 1.0 && ds_ratio < 0.5,
            fmt("spectrogram ratio %.3f (> 1), dsSST ratio %.4f (< 0.5)", spec_ratio, ds_ratio)};
}

Outcome plausibility_band() {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> a2(0.3, 2.0), a3(0.0, 0.5), phase(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> mod(-0.03, 0.03), amp(0.15, 0.4), period(15.0, 30.0);
    double lo = 1e9, hi = -1e9;
    int outside = 0;
    for (int trial = 0; trial < 20; ++trial) {
        WalkingModelSpec spec;
        spec.fs = 100.0;
        spec.duration_s = 80.0;
        BoutModel b;
        b.start_s = 10.0;
        b.end_s = 70.0;
        // phi' = base + depth sin(.) must stay inside [0.8, 1.2] Hz.
        const double depth = mod(rng);
        const double base = std::uniform_real_distribution<double>(0.8 + std::abs(depth), 1.2 - std::abs(depth))(rng);
        b.frequency = IfProfile{base, base, depth, period(rng)};
        b.amplitude = AmplitudeProfile{amp(rng), 0.1, 30.0};
        b.shape.alpha = {1.0, a2(rng), a3(rng)};
        b.shape.beta = {phase(rng), phase(rng), phase(rng)};
        b.initial_phase = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        spec.bouts.push_back(b);
        spec.noise.rho = 0.5;
        spec.noise.sd = noise_sd_for_snr(spec, 10.0);
        const auto synth = synthesize_walk(spec, 100 + static_cast<std::uint64_t>(trial));
        const auto res = run_pipeline(to_record(synth.signal), bouts_of(spec), PipelineConfig{});
        const auto* row = res.summary.find(SensorLocation::other, Activity::walking);
        const double mean = row ? row->mean : std::nan("");
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
        if (!(mean >= 1.6 && mean <= 2.4)) ++outside;
    }
    return {outside == 0, fmt("bout means in [%.3f, %.3f], %.0f outside [1.6, 2.4]", lo, hi, outside)};
}

Outcome bland_altman_checks() {
    CadenceTrace a;
    for (int k = 0; k < 100; ++k) {
        a.times.push_back(0.01 * k);
        a.if_hz.push_back(1.0 + 0.001 * k);
        a.cadence_hz.push_back(2.0 + 0.002 * k);
    }
    const auto same = bland_altman(a, a);
    const bool identical = same.mean_diff == 0.0 && same.loa_low == 0.0 && same.loa_high == 0.0;

    const auto s = bland_altman_from_differences({0.1, -0.1, 0.3, -0.3});
    const double sd = std::sqrt(0.05);
    const double gap = std::max({std::abs(s.mean_diff), std::abs(s.sd_diff - sd), std::abs(s.loa_low + 1.96 * sd),
                                 std::abs(s.loa_high - 1.96 * sd)});
    return {identical && gap <= 1e-12,
            fmt("identical: mean %g, LoA width %g; 4-point worst gap %.2g", same.mean_diff,
                same.loa_high - same.loa_low, gap)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::string& cli) {
    const fs::path dir = fs::temp_directory_path() / ("cadence_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sh = [&](const std::string& args) {
        const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const std::string fixture = (dir / "fixture").string();
    if (sh("synth --preset constant --output-dir \"" + fixture + "\"") != 0) return {false, "synth failed"};
    for (const char* run : {"run1", "run2"}) {
        const std::string args = "run --input \"" + fixture + "/signal.csv\" --labels \"" + fixture +
                                 "/labels.csv\" --export-tfr csv,f64le --hop 5 --output-dir \"" +
                                 (dir / run).string() + "\"";
        if (sh(args) != 0) return {false, std::string(run) + " failed"};
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(dir / "run1")) {
        ++files;
        const auto other = dir / "run2" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    std::size_t files2 = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir / "run2")) ++files2;
    fs::remove_all(dir);
    const bool ok = files > 0 && files == files2 && differing == 0;
    return {ok, fmt("%.0f files compared, %.0f differ", static_cast<double>(files), static_cast<double>(differing))};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <cadence CLI>\n", argv[0]);
        return 2;
    }
    criterion("stft-oracle-equivalence", 10.0, stft_oracle);
    criterion("ridge-dp-exactness", 5.0, ridge_exactness);
    criterion("constant-cadence-recovery", 30.0, constant_cadence);
    criterion("chirp-tracking", 30.0, chirp_tracking);
    criterion("harmonic-suppression", 0.0, harmonic_suppression);
    criterion("cadence-plausibility-band", 0.0, plausibility_band);
    criterion("bland-altman-correctness", 0.0, bland_altman_checks);
    criterion("determinism", 0.0, [&] { return determinism(argv[1]); });
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
