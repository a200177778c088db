#pragma once

// Flat "key = value" text configuration shared by the pipeline and the
// synthetic-walk description. Blank lines and lines starting with '#' are
// ignored; a repeated key is an error.

#include "cadence/ridge.hpp"
#include "cadence/signal.hpp"
#include "cadence/tfr.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cadence {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text, const std::string& source = "<config>");
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);
double parse_number(std::string_view text, std::string_view key);
std::size_t parse_count(std::string_view text, std::string_view key);
std::vector<double> parse_number_list(std::string_view text, std::string_view key);
std::string format_number_list(const std::vector<double>& values);

/// Which TFR the ridge is extracted from. Only dssst is the cadence estimator;
/// the others exist for comparison runs.
enum class RidgeSource { dssst, sst, stft };
std::string_view to_string(RidgeSource s);
RidgeSource parse_ridge_source(std::string_view s);

enum class TfrFormat { csv, pgm, f64le };
std::string_view to_string(TfrFormat f);
TfrFormat parse_tfr_format(std::string_view s);

struct PipelineConfig {
    double window_span_s = 12.0;
    double sigma = 0.15;
    double gamma = 0.3;
    double upsilon = 1e-9;
    double lambda = 1.0;
    BandHz band{0.3, 2.5};
    std::size_t hop = 1;
    std::size_t fft_size = 0;  // 2M; 0 picks the smallest power of two >= 4 (2K + 1)
    double fs = 0.0;           // 0: take the sampling rate from the data
    double detrend_span_s = 10.0;
    SqueezeMode squeeze = SqueezeMode::complex;
    RidgeSource ridge_source = RidgeSource::dssst;
    SensorLocation location = SensorLocation::other;
    std::filesystem::path input;
    std::filesystem::path labels;
    std::filesystem::path output_dir = "out";
    std::vector<TfrFormat> export_tfr;  // per-bout dsSST exports

    /// Throws ConfigError when a value is out of range.
    void validate() const;

    /// K = round(window_span_s * fs / 2); throws ConfigError if K < 1.
    std::size_t window_half_length(double sample_rate) const;
    /// M for the given K.
    std::size_t fft_half(std::size_t half_length) const;
};

/// Applies the keys of `kv` on top of `base`. Unknown keys throw ConfigError.
PipelineConfig apply_key_values(PipelineConfig base, const KeyValues& kv);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
KeyValues to_key_values(const PipelineConfig& config);

}  // namespace cadence
