#pragma once

// CSV ingestion and table output.
//
//   triaxial input   t,x,y,z   (or x,y,z with the sampling rate given separately)
//   labels input     start_s,end_s,label
//   cadence trace    time_s,if_hz,cadence_hz,bout_label
//   summary          location,activity,mean_cadence,sd_cadence,n_frames,duration_s
//   Bland-Altman     mean_diff,sd_diff,loa_low,loa_high,n[,mean_ci,loa_ci]

#include "cadence/bout_analysis.hpp"
#include "cadence/ridge.hpp"
#include "cadence/signal.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cadence {

/// Tolerance on the spread of sampling intervals, relative to their median.
inline constexpr double kSamplingUniformity = 0.01;

/// Reads a triaxial CSV. With a `t` column the sampling rate is the reciprocal
/// of the median interval, and every interval must lie within 1% of it;
/// without one, `fs_hint` is required.
TriaxialRecord load_triaxial_csv(const std::filesystem::path& path, std::optional<double> fs_hint = std::nullopt,
                                 SensorLocation location = SensorLocation::other);

void write_triaxial_csv(const std::filesystem::path& path, const TriaxialRecord& rec);

/// Reads labelled bouts; header row optional. Returns a validated, sorted list.
BoutList load_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const BoutList& bouts);

/// Warnings for bouts too short for the analysis window.
std::vector<std::string> check_bouts_against_window(const BoutList& bouts, double window_span_s);

struct LabelledTrace {
    CadenceTrace trace;
    std::vector<int> labels;
};

void write_cadence_csv(const std::filesystem::path& path, const LabelledTrace& trace);
LabelledTrace load_cadence_csv(const std::filesystem::path& path);

void write_summary_csv(const std::filesystem::path& path, const SummaryTable& table);
void write_bland_altman_csv(const std::filesystem::path& path, const BAStats& stats);

}  // namespace cadence
