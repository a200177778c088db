#pragma once

// Cadence estimation pipeline:
//   vector magnitude -> median detrend -> rectify -> STFT (h, dh) -> STCT
//   -> iSTCT mask -> dsSTFT -> reassignment -> dsSST -> per-bout ridge
//   -> cadence trace -> per-activity summary.

#include "cadence/bout_analysis.hpp"
#include "cadence/config.hpp"
#include "cadence/io.hpp"
#include "cadence/ridge.hpp"
#include "cadence/signal.hpp"
#include "cadence/tfr.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cadence {

enum class BoutStatus { ok, degenerate, failed };
std::string_view to_string(BoutStatus s);

struct BoutReport {
    std::size_t index = 0;
    Bout bout;
    BoutStatus status = BoutStatus::ok;
    std::string message;
    std::size_t frames = 0;
    double seconds = 0.0;  // wall-clock, not written to report files
    std::vector<std::string> warnings;
};

struct RunReport {
    std::vector<BoutReport> bouts;
    std::vector<std::string> warnings;
    std::vector<std::filesystem::path> outputs;
    double seconds = 0.0;

    bool all_ok() const;
};

/// Magnitude (or the given signal), median detrend over detrend_span_s, rectification.
Signal preprocess(const Signal& magnitude, const PipelineConfig& config, std::vector<std::string>* warnings = nullptr);
Signal preprocess(const TriaxialRecord& rec, const PipelineConfig& config, std::vector<std::string>* warnings = nullptr);

struct BoutAnalysis {
    FrameAxis frames;
    std::size_t fft_half = 0;
    RidgeCurve ridge;
    CadenceTrace trace;
    std::optional<ComplexTfr> tfr;  // ridge-source grid, band columns only
    std::size_t undefined_omega = 0;
};

/// Runs the transforms on the frames inside `bout` (on the hop grid) and extracts the ridge.
BoutAnalysis analyze_bout(const Signal& preprocessed, const Bout& bout, const PipelineConfig& config);

struct PipelineResult {
    RunReport report;
    LabelledTrace trace;
    SummaryTable summary;
    std::vector<std::optional<BoutAnalysis>> analyses;  // per bout; empty for failed bouts
};

/// In-memory run. Stage errors are caught per bout and recorded in the report.
PipelineResult run_pipeline(const TriaxialRecord& rec, const BoutList& bouts, const PipelineConfig& config);

/// Reads config.input / config.labels, writes cadence.csv, summary.csv,
/// report.json and optional per-bout TFR exports into config.output_dir.
RunReport run_pipeline(const PipelineConfig& config);

}  // namespace cadence
