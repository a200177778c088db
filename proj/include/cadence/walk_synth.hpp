#pragma once

// Synthetic walking signals with known instantaneous frequency.
//
//   Y(t) = sum_l a_l(t) s_l(phi_l(t)) 1{t in I_l} + Phi(t)
//   s_l(x) = alpha_0 + sum_j alpha_j cos(2 pi j x + beta_j),  ||s_l||_2 = 1
//
// phi_l is the integral of the instantaneous frequency phi_l' from the start
// of the bout (in cycles), and Phi is stationary AR(1) noise.

#include "cadence/signal.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cadence {

/// phi'(t) = start_hz + (end_hz - start_hz) (t - t_start) / duration
///           + mod_depth_hz sin(2 pi (t - t_start) / mod_period_s)
struct IfProfile {
    double start_hz = 1.0;
    double end_hz = 1.0;
    double mod_depth_hz = 0.0;
    double mod_period_s = 20.0;

    double at(double t, double t_start, double t_end) const;
    double slope(double t, double t_start, double t_end) const;
};

/// a(t) = mean (1 + depth sin(2 pi (t - t_start) / period_s))
struct AmplitudeProfile {
    double mean = 1.0;
    double depth = 0.0;
    double period_s = 30.0;

    double at(double t, double t_start) const;
    double slope(double t, double t_start) const;
};

/// Fourier coefficients of the 1-periodic wave shape. alpha[j-1], beta[j-1] are
/// the j-th harmonic's amplitude and phase.
struct WaveShape {
    double alpha0 = 0.0;
    std::vector<double> alpha{1.0};
    std::vector<double> beta{0.0};

    /// L2 norm over one period: sqrt(alpha0^2 + sum alpha_j^2 / 2).
    double norm() const;
    /// Same shape scaled to unit L2 norm.
    WaveShape normalized() const;
    double evaluate(double phase_cycles) const;
};

struct BoutModel {
    double start_s = 0.0;
    double end_s = 0.0;
    int label = 1;
    IfProfile frequency;
    AmplitudeProfile amplitude;
    WaveShape shape;
    double initial_phase = 0.0;  // cycles
};

struct NoiseModel {
    double sd = 0.0;
    double rho = 0.0;
};

struct WalkingModelSpec {
    double fs = 100.0;
    double duration_s = 60.0;
    std::vector<BoutModel> bouts;
    NoiseModel noise;
    double epsilon = 0.1;     // slow-variation bound for phi'' and a'
    double min_cycles = 10.0; // cycles a bout must span
};

/// Checks every bout; throws ValidationError naming each violated condition
/// (C1..C6 labels, e.g. "C2: |phi''| > eps phi' in bout 0 at t=12.3 s").
void validate(const WalkingModelSpec& spec);

struct SynthResult {
    Signal signal;               // clean + noise
    Signal clean;
    std::vector<double> truth_if;  // phi'(t) inside bouts, NaN outside
    std::vector<int> truth_label;  // bout label inside bouts, -1 outside
    std::vector<BoutModel> bouts;
};

SynthResult synthesize_walk(const WalkingModelSpec& spec, std::uint64_t seed);

/// Stationary AR(1): x(k) = rho x(k-1) + e(k), var(e) = sd^2 (1 - rho^2), x(0) ~ N(0, sd^2).
std::vector<double> ar1_noise(std::size_t n, double sd, double rho, std::uint64_t seed);

/// Noise sd giving the requested SNR against the mean clean power inside the bouts.
double noise_sd_for_snr(const WalkingModelSpec& spec, double snr_db);

/// Built-in fixtures at 100 Hz, 10 dB SNR, AR(1) rho 0.5, shape alpha = {1, 2}:
///   "constant": 80 s record, one bout [10, 70) s at 1 Hz
///   "chirp":    110 s record, one bout [10, 100) s ramping 0.8 -> 1.2 Hz
/// Throws ConfigError for other names.
WalkingModelSpec preset_walk(std::string_view name);

/// Flat key=value form, e.g. "bout.0.alpha" -> "1,2".
std::map<std::string, std::string> to_key_values(const WalkingModelSpec& spec);
WalkingModelSpec walking_spec_from_key_values(const std::map<std::string, std::string>& kv);

}  // namespace cadence
