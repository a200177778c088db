#include "cadence/walk_synth.hpp"

#include "cadence/config.hpp"
#include "cadence/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace cadence {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double IfProfile::at(double t, double t_start, double t_end) const {
    const double span = t_end - t_start;
    const double ramp = span > 0.0 ? (end_hz - start_hz) * (t - t_start) / span : 0.0;
    return start_hz + ramp + mod_depth_hz * std::sin(kTwoPi * (t - t_start) / mod_period_s);
}

double IfProfile::slope(double t, double t_start, double t_end) const {
    const double span = t_end - t_start;
    const double ramp = span > 0.0 ? (end_hz - start_hz) / span : 0.0;
    return ramp + mod_depth_hz * kTwoPi / mod_period_s * std::cos(kTwoPi * (t - t_start) / mod_period_s);
}

double AmplitudeProfile::at(double t, double t_start) const {
    return mean * (1.0 + depth * std::sin(kTwoPi * (t - t_start) / period_s));
}

double AmplitudeProfile::slope(double t, double t_start) const {
    return mean * depth * kTwoPi / period_s * std::cos(kTwoPi * (t - t_start) / period_s);
}

double WaveShape::norm() const {
    double sum = alpha0 * alpha0;
    for (double a : alpha) sum += 0.5 * a * a;
    return std::sqrt(sum);
}

WaveShape WaveShape::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw ValidationError("C4: wave shape has zero norm");
    WaveShape out = *this;
    out.alpha0 /= n;
    for (double& a : out.alpha) a /= n;
    return out;
}

double WaveShape::evaluate(double phase_cycles) const {
    double v = alpha0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        v += alpha[j] * std::cos(kTwoPi * static_cast<double>(j + 1) * phase_cycles + beta[j]);
    }
    return v;
}

namespace {

// Sample range [first, last) of a bout on the grid k / fs.
std::pair<std::size_t, std::size_t> bout_samples(const BoutModel& b, double fs, std::size_t n) {
    const auto first = static_cast<std::size_t>(std::clamp(std::ceil(b.start_s * fs - 1e-9), 0.0, static_cast<double>(n)));
    const auto last = static_cast<std::size_t>(std::clamp(std::ceil(b.end_s * fs - 1e-9), 0.0, static_cast<double>(n)));
    return {first, std::max(first, last)};
}

std::size_t sample_count(const WalkingModelSpec& spec) {
    return static_cast<std::size_t>(std::llround(spec.duration_s * spec.fs));
}

std::string at_time(double t) {
    std::ostringstream os;
    os << " at t=" << t << " s";
    return os.str();
}

}  // namespace

void validate(const WalkingModelSpec& spec) {
    if (!(spec.fs > 0.0)) throw ValidationError("sampling rate must be positive");
    if (!(spec.duration_s > 0.0)) throw ValidationError("duration must be positive");
    if (!(spec.noise.sd >= 0.0)) throw ValidationError("C5: noise sd must be non-negative");
    if (!(std::abs(spec.noise.rho) < 1.0)) throw ValidationError("C5: AR(1) coefficient must lie in (-1, 1)");

    std::vector<std::string> problems;
    const std::size_t n = sample_count(spec);
    for (std::size_t i = 0; i < spec.bouts.size(); ++i) {
        const auto& b = spec.bouts[i];
        const std::string tag = " in bout " + std::to_string(i);
        if (!(b.start_s < b.end_s) || b.start_s < 0.0 || b.end_s > spec.duration_s + 1e-9) {
            problems.push_back("bout interval" + tag + " must satisfy 0 <= start < end <= duration");
            continue;
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = spec.bouts[j];
            if (b.start_s < o.end_s && o.start_s < b.end_s) {
                problems.push_back("bouts " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
            }
        }
        if (b.shape.alpha.size() != b.shape.beta.size()) {
            problems.push_back("C4: alpha and beta lengths differ" + tag);
        }
        if (b.shape.alpha.empty() || !(b.shape.alpha[0] > 0.0)) {
            problems.push_back("C4: fundamental coefficient alpha_1 must be positive" + tag);
        }
        if (!(b.frequency.mod_period_s > 0.0) || !(b.amplitude.period_s > 0.0)) {
            problems.push_back("modulation periods must be positive" + tag);
            continue;
        }

        const auto [first, last] = bout_samples(b, spec.fs, n);
        bool c1 = false, c2 = false, c3a = false, c3b = false;
        double cycles = 0.0;
        double prev_if = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double t = static_cast<double>(k) / spec.fs;
            const double f = b.frequency.at(t, b.start_s, b.end_s);
            const double df = b.frequency.slope(t, b.start_s, b.end_s);
            const double a = b.amplitude.at(t, b.start_s);
            const double da = b.amplitude.slope(t, b.start_s);
            if (k > first) cycles += 0.5 * (prev_if + f) / spec.fs;
            prev_if = f;
            if (!(f > 0.0) && !c1) {
                problems.push_back("C1/C2: phi' must be positive" + tag + at_time(t));
                c1 = true;
            }
            if (std::abs(df) > spec.epsilon * f && !c2) {
                problems.push_back("C2: |phi''| > eps phi'" + tag + at_time(t));
                c2 = true;
            }
            if (!(a > 0.0) && !c3a) {
                problems.push_back("C3: amplitude must be positive" + tag + at_time(t));
                c3a = true;
            }
            if (std::abs(da) > spec.epsilon * f && !c3b) {
                problems.push_back("C3: |a'| > eps phi'" + tag + at_time(t));
                c3b = true;
            }
        }
        if (cycles < spec.min_cycles) {
            std::ostringstream os;
            os << "C6: bout " << i << " spans " << cycles << " cycles, fewer than " << spec.min_cycles;
            problems.push_back(os.str());
        }
    }
    if (!problems.empty()) {
        std::string msg = "walking model invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

std::vector<double> ar1_noise(std::size_t n, double sd, double rho, std::uint64_t seed) {
    if (n < 1) throw ParameterError("noise length must be at least 1");
    if (!(std::abs(rho) < 1.0)) throw ParameterError("AR(1) coefficient must lie in (-1, 1)");
    if (!(sd >= 0.0)) throw ParameterError("noise sd must be non-negative");
    std::vector<double> out(n, 0.0);
    if (sd == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> stationary(0.0, sd);
    std::normal_distribution<double> innovation(0.0, sd * std::sqrt(1.0 - rho * rho));
    out[0] = stationary(rng);
    for (std::size_t k = 1; k < n; ++k) out[k] = rho * out[k - 1] + innovation(rng);
    return out;
}

SynthResult synthesize_walk(const WalkingModelSpec& spec, std::uint64_t seed) {
    validate(spec);
    const std::size_t n = sample_count(spec);
    std::vector<double> clean(n, 0.0);
    std::vector<double> truth(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> labels(n, -1);

    for (const auto& b : spec.bouts) {
        const WaveShape shape = b.shape.normalized();
        const auto [first, last] = bout_samples(b, spec.fs, n);
        double phase = b.initial_phase;
        double prev_if = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double t = static_cast<double>(k) / spec.fs;
            const double f = b.frequency.at(t, b.start_s, b.end_s);
            if (k > first) phase += 0.5 * (prev_if + f) / spec.fs;
            prev_if = f;
            clean[k] = b.amplitude.at(t, b.start_s) * shape.evaluate(phase);
            truth[k] = f;
            labels[k] = b.label;
        }
    }

    std::vector<double> noisy = clean;
    if (spec.noise.sd > 0.0 && n > 0) {
        const auto noise = ar1_noise(n, spec.noise.sd, spec.noise.rho, seed);
        for (std::size_t k = 0; k < n; ++k) noisy[k] += noise[k];
    }
    return SynthResult{Signal(std::move(noisy), spec.fs), Signal(std::move(clean), spec.fs), std::move(truth),
                       std::move(labels), spec.bouts};
}

double noise_sd_for_snr(const WalkingModelSpec& spec, double snr_db) {
    WalkingModelSpec quiet = spec;
    quiet.noise.sd = 0.0;
    const auto res = synthesize_walk(quiet, 0);
    double power = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < res.clean.size(); ++k) {
        if (res.truth_label[k] >= 0) {
            power += res.clean[k] * res.clean[k];
            ++count;
        }
    }
    if (count == 0) throw ValidationError("SNR needs at least one bout sample");
    power /= static_cast<double>(count);
    return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

std::map<std::string, std::string> to_key_values(const WalkingModelSpec& spec) {
    std::map<std::string, std::string> kv;
    kv["fs"] = format_number(spec.fs);
    kv["duration_s"] = format_number(spec.duration_s);
    kv["noise_sd"] = format_number(spec.noise.sd);
    kv["noise_rho"] = format_number(spec.noise.rho);
    kv["epsilon"] = format_number(spec.epsilon);
    kv["min_cycles"] = format_number(spec.min_cycles);
    for (std::size_t i = 0; i < spec.bouts.size(); ++i) {
        const auto& b = spec.bouts[i];
        const std::string p = "bout." + std::to_string(i) + ".";
        kv[p + "start_s"] = format_number(b.start_s);
        kv[p + "end_s"] = format_number(b.end_s);
        kv[p + "label"] = std::to_string(b.label);
        kv[p + "if_start_hz"] = format_number(b.frequency.start_hz);
        kv[p + "if_end_hz"] = format_number(b.frequency.end_hz);
        kv[p + "if_mod_depth_hz"] = format_number(b.frequency.mod_depth_hz);
        kv[p + "if_mod_period_s"] = format_number(b.frequency.mod_period_s);
        kv[p + "amplitude"] = format_number(b.amplitude.mean);
        kv[p + "am_depth"] = format_number(b.amplitude.depth);
        kv[p + "am_period_s"] = format_number(b.amplitude.period_s);
        kv[p + "alpha0"] = format_number(b.shape.alpha0);
        kv[p + "alpha"] = format_number_list(b.shape.alpha);
        kv[p + "beta"] = format_number_list(b.shape.beta);
        kv[p + "initial_phase"] = format_number(b.initial_phase);
    }
    return kv;
}

WalkingModelSpec walking_spec_from_key_values(const std::map<std::string, std::string>& kv) {
    WalkingModelSpec spec;
    std::map<std::size_t, BoutModel> bouts;
    std::optional<double> snr_db;
    for (const auto& [key, value] : kv) {
        if (key == "fs") spec.fs = parse_number(value, key);
        else if (key == "duration_s") spec.duration_s = parse_number(value, key);
        else if (key == "noise_sd") spec.noise.sd = parse_number(value, key);
        else if (key == "noise_rho") spec.noise.rho = parse_number(value, key);
        else if (key == "snr_db") snr_db = parse_number(value, key);
        else if (key == "epsilon") spec.epsilon = parse_number(value, key);
        else if (key == "min_cycles") spec.min_cycles = parse_number(value, key);
        else if (key.starts_with("bout.")) {
            const auto dot = key.find('.', 5);
            if (dot == std::string::npos) throw ConfigError("malformed bout key '" + key + "'");
            const std::size_t index = parse_count(key.substr(5, dot - 5), key);
            const std::string field = key.substr(dot + 1);
            BoutModel& b = bouts[index];
            if (field == "start_s") b.start_s = parse_number(value, key);
            else if (field == "end_s") b.end_s = parse_number(value, key);
            else if (field == "label") b.label = static_cast<int>(parse_count(value, key));
            else if (field == "if_start_hz") b.frequency.start_hz = parse_number(value, key);
            else if (field == "if_end_hz") b.frequency.end_hz = parse_number(value, key);
            else if (field == "if_mod_depth_hz") b.frequency.mod_depth_hz = parse_number(value, key);
            else if (field == "if_mod_period_s") b.frequency.mod_period_s = parse_number(value, key);
            else if (field == "amplitude") b.amplitude.mean = parse_number(value, key);
            else if (field == "am_depth") b.amplitude.depth = parse_number(value, key);
            else if (field == "am_period_s") b.amplitude.period_s = parse_number(value, key);
            else if (field == "alpha0") b.shape.alpha0 = parse_number(value, key);
            else if (field == "alpha") b.shape.alpha = parse_number_list(value, key);
            else if (field == "beta") b.shape.beta = parse_number_list(value, key);
            else if (field == "initial_phase") b.initial_phase = parse_number(value, key);
            else throw ConfigError("unknown bout field '" + key + "'");
        } else {
            throw ConfigError("unknown walking-model key '" + key + "'");
        }
    }
    std::size_t expected = 0;
    for (auto& [index, b] : bouts) {
        if (index != expected++) throw ConfigError("bout indices must be consecutive from 0");
        if (b.shape.beta.size() < b.shape.alpha.size()) b.shape.beta.resize(b.shape.alpha.size(), 0.0);
        spec.bouts.push_back(b);
    }
    if (snr_db) spec.noise.sd = noise_sd_for_snr(spec, *snr_db);
    return spec;
}

WalkingModelSpec preset_walk(std::string_view name) {
    WalkingModelSpec spec;
    spec.fs = 100.0;
    BoutModel bout;
    bout.label = 1;
    bout.amplitude.mean = 0.25;
    bout.shape.alpha = {1.0, 2.0};
    bout.shape.beta = {0.0, 0.0};
    if (name == "constant") {
        spec.duration_s = 80.0;
        bout.start_s = 10.0;
        bout.end_s = 70.0;
    } else if (name == "chirp") {
        spec.duration_s = 110.0;
        bout.start_s = 10.0;
        bout.end_s = 100.0;
        bout.frequency.start_hz = 0.8;
        bout.frequency.end_hz = 1.2;
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "', expected constant or chirp");
    }
    spec.bouts.push_back(bout);
    spec.noise.rho = 0.5;
    spec.noise.sd = noise_sd_for_snr(spec, 10.0);
    return spec;
}

}  // namespace cadence
