#pragma once

#include "cadence/ridge.hpp"
#include "cadence/signal.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cadence {

/// Annotation labels: 0 other (e.g. clapping), 1 walking, 2 descending stairs, 3 ascending stairs.
enum class Activity { other = 0, walking = 1, descending = 2, ascending = 3 };

std::string_view to_string(Activity a);
/// Throws ValidationError for labels outside 0..3.
Activity activity_from_label(int label);

struct Bout {
    double start_s = 0.0;
    double end_s = 0.0;
    Activity activity = Activity::walking;

    double duration() const noexcept { return end_s - start_s; }
    bool contains(double t) const noexcept { return t >= start_s && t < end_s; }
};

/// Sorted, non-overlapping labelled intervals.
class BoutList {
public:
    BoutList() = default;
    /// Sorts by start; throws ValidationError on start >= end or overlap.
    explicit BoutList(std::vector<Bout> bouts);

    const std::vector<Bout>& bouts() const noexcept { return bouts_; }
    std::size_t size() const noexcept { return bouts_.size(); }
    bool empty() const noexcept { return bouts_.empty(); }
    const Bout& operator[](std::size_t i) const { return bouts_[i]; }
    auto begin() const noexcept { return bouts_.begin(); }
    auto end() const noexcept { return bouts_.end(); }

private:
    std::vector<Bout> bouts_;
};

struct SummaryRow {
    SensorLocation location = SensorLocation::other;
    Activity activity = Activity::walking;
    double mean = 0.0;
    double sd = 0.0;       // population (1/n)
    std::size_t count = 0; // frames
    double duration_s = 0.0;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
    std::vector<std::string> notices;

    const SummaryRow* find(SensorLocation loc, Activity a) const;
};

/// Pools the trace frames falling inside each bout by activity and reports the
/// mean and population SD of cadence. Activities without frames are omitted
/// with a notice; bouts with fewer frames than their span implies get a notice.
SummaryTable bout_cadence_summary(const CadenceTrace& trace, const BoutList& bouts,
                                  SensorLocation location = SensorLocation::other);

/// Per-subject aggregation: mean and population SD of the per-subject means for
/// each (location, activity); count is the number of subjects.
SummaryTable pool_subject_means(const std::vector<SummaryTable>& subjects);

/// "Wrist / walking: 1.982 ± 0.158"
std::string format_summary_row(const SummaryRow& row);

struct BAStats {
    double mean_diff = 0.0;
    double sd_diff = 0.0;  // population (1/n)
    double loa_low = 0.0;
    double loa_high = 0.0;
    std::size_t n = 0;
    // Normal-theory 95% confidence intervals: mean +- 1.96 sd / sqrt(n) and
    // LoA +- 1.96 sqrt(3 sd^2 / n). Present when n >= 2.
    std::optional<double> mean_ci_half_width;
    std::optional<double> loa_ci_half_width;
};

/// Differences a - b on the coarser of the two time grids, pairing each of its
/// frames with the nearest frame of the other trace (within half a coarse step).
/// Throws EmptyOverlapError when no pair exists.
BAStats bland_altman(const CadenceTrace& a, const CadenceTrace& b);

/// Statistics of given paired differences.
BAStats bland_altman_from_differences(const std::vector<double>& d);

/// Frames of `trace` that fall inside bouts of `activity`.
CadenceTrace select_activity(const CadenceTrace& trace, const BoutList& bouts, Activity activity);

}  // namespace cadence
