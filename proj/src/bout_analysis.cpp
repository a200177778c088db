#include "cadence/bout_analysis.hpp"

#include "cadence/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

namespace cadence {

std::string_view to_string(Activity a) {
    switch (a) {
        case Activity::other: return "other";
        case Activity::walking: return "walking";
        case Activity::descending: return "descending";
        case Activity::ascending: return "ascending";
    }
    return "other";
}

Activity activity_from_label(int label) {
    if (label < 0 || label > 3) throw ValidationError("unknown activity label " + std::to_string(label));
    return static_cast<Activity>(label);
}

BoutList::BoutList(std::vector<Bout> bouts) : bouts_(std::move(bouts)) {
    for (const auto& b : bouts_) {
        if (!(b.start_s < b.end_s)) {
            throw ValidationError("bout [" + std::to_string(b.start_s) + ", " + std::to_string(b.end_s) +
                                  ") must have start < end");
        }
    }
    std::stable_sort(bouts_.begin(), bouts_.end(), [](const Bout& x, const Bout& y) { return x.start_s < y.start_s; });
    for (std::size_t i = 1; i < bouts_.size(); ++i) {
        if (bouts_[i].start_s < bouts_[i - 1].end_s) {
            throw ValidationError("bouts [" + std::to_string(bouts_[i - 1].start_s) + ", " +
                                  std::to_string(bouts_[i - 1].end_s) + ") and [" + std::to_string(bouts_[i].start_s) +
                                  ", " + std::to_string(bouts_[i].end_s) + ") overlap");
        }
    }
}

const SummaryRow* SummaryTable::find(SensorLocation loc, Activity a) const {
    for (const auto& r : rows) {
        if (r.location == loc && r.activity == a) return &r;
    }
    return nullptr;
}

namespace {

// Table column order.
constexpr std::array kActivityOrder{Activity::walking, Activity::ascending, Activity::descending, Activity::other};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    if (v.empty()) return out;
    double sum = 0.0;
    for (double x : v) sum += x;
    out.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size()));
    return out;
}

double median_step(const std::vector<double>& times) {
    if (times.size() < 2) return 0.0;
    std::vector<double> d(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) d[i - 1] = times[i] - times[i - 1];
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    return d[d.size() / 2];
}

std::string location_name(SensorLocation loc) {
    switch (loc) {
        case SensorLocation::wrist: return "Wrist";
        case SensorLocation::hip: return "Hip";
        case SensorLocation::left_ankle: return "Left Ankle";
        case SensorLocation::right_ankle: return "Right Ankle";
        case SensorLocation::other: return "Other";
    }
    return "Other";
}

}  // namespace

SummaryTable bout_cadence_summary(const CadenceTrace& trace, const BoutList& bouts, SensorLocation location) {
    SummaryTable table;
    std::map<Activity, std::vector<double>> pooled;
    std::map<Activity, double> durations;
    const double step = median_step(trace.times);
    for (std::size_t i = 0; i < bouts.size(); ++i) {
        const Bout& b = bouts[i];
        auto& values = pooled[b.activity];
        durations[b.activity] += b.duration();
        const auto lo = std::lower_bound(trace.times.begin(), trace.times.end(), b.start_s);
        const auto hi = std::lower_bound(lo, trace.times.end(), b.end_s);
        const auto first = static_cast<std::size_t>(lo - trace.times.begin());
        const auto last = static_cast<std::size_t>(hi - trace.times.begin());
        for (std::size_t k = first; k < last; ++k) values.push_back(trace.cadence_hz[k]);
        if (step > 0.0) {
            const auto expected = static_cast<std::size_t>(std::floor(b.duration() / step));
            const std::size_t found = last - first;
            if (found + 1 < expected) {
                table.notices.push_back("bout " + std::to_string(i) + " (" + std::string(to_string(b.activity)) +
                                        "): " + std::to_string(expected - found) + " of " + std::to_string(expected) +
                                        " frames missing");
            }
        }
    }
    for (Activity a : kActivityOrder) {
        const auto it = pooled.find(a);
        if (it == pooled.end()) continue;
        if (it->second.empty()) {
            table.notices.push_back("no frames for activity '" + std::string(to_string(a)) + "'; row omitted");
            continue;
        }
        const auto stats = mean_sd(it->second);
        table.rows.push_back({location, a, stats.mean, stats.sd, it->second.size(), durations[a]});
    }
    return table;
}

SummaryTable pool_subject_means(const std::vector<SummaryTable>& subjects) {
    std::map<std::pair<SensorLocation, Activity>, std::vector<double>> means;
    std::map<std::pair<SensorLocation, Activity>, double> durations;
    for (const auto& s : subjects) {
        for (const auto& r : s.rows) {
            means[{r.location, r.activity}].push_back(r.mean);
            durations[{r.location, r.activity}] += r.duration_s;
        }
    }
    SummaryTable out;
    for (const auto& [key, v] : means) {
        const auto stats = mean_sd(v);
        out.rows.push_back({key.first, key.second, stats.mean, stats.sd, v.size(), durations[key]});
    }
    std::stable_sort(out.rows.begin(), out.rows.end(), [](const SummaryRow& x, const SummaryRow& y) {
        const auto rank = [](Activity a) {
            return std::find(kActivityOrder.begin(), kActivityOrder.end(), a) - kActivityOrder.begin();
        };
        if (x.location != y.location) return x.location < y.location;
        return rank(x.activity) < rank(y.activity);
    });
    return out;
}

std::string format_summary_row(const SummaryRow& row) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s / %s: %.3f ± %.3f", location_name(row.location).c_str(),
                  std::string(to_string(row.activity)).c_str(), row.mean, row.sd);
    return buf;
}

BAStats bland_altman_from_differences(const std::vector<double>& d) {
    if (d.empty()) throw EmptyOverlapError("Bland-Altman analysis needs at least one paired difference");
    const auto stats = mean_sd(d);
    BAStats out;
    out.mean_diff = stats.mean;
    out.sd_diff = stats.sd;
    out.loa_low = stats.mean - 1.96 * stats.sd;
    out.loa_high = stats.mean + 1.96 * stats.sd;
    out.n = d.size();
    if (d.size() >= 2) {
        const double n = static_cast<double>(d.size());
        out.mean_ci_half_width = 1.96 * stats.sd / std::sqrt(n);
        out.loa_ci_half_width = 1.96 * std::sqrt(3.0 * stats.sd * stats.sd / n);
    }
    return out;
}

BAStats bland_altman(const CadenceTrace& a, const CadenceTrace& b) {
    if (a.empty() || b.empty()) throw EmptyOverlapError("Bland-Altman analysis needs two non-empty traces");
    const double step_a = median_step(a.times);
    const double step_b = median_step(b.times);
    const bool a_coarse = step_a >= step_b;
    const CadenceTrace& coarse = a_coarse ? a : b;
    const CadenceTrace& fine = a_coarse ? b : a;
    const double tol = std::max(0.5 * std::max(step_a, step_b), 1e-9);

    std::vector<double> d;
    d.reserve(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        const double t = coarse.times[k];
        const auto it = std::lower_bound(fine.times.begin(), fine.times.end(), t);
        std::size_t best = fine.size();
        double best_gap = tol;
        if (it != fine.times.end() && std::abs(*it - t) <= best_gap) {
            best = static_cast<std::size_t>(it - fine.times.begin());
            best_gap = std::abs(*it - t);
        }
        if (it != fine.times.begin() &&
            (best == fine.size() ? std::abs(*(it - 1) - t) <= tol : std::abs(*(it - 1) - t) < best_gap)) {
            best = static_cast<std::size_t>(it - fine.times.begin()) - 1;
        }
        if (best == fine.size()) continue;
        const double va = a_coarse ? coarse.cadence_hz[k] : fine.cadence_hz[best];
        const double vb = a_coarse ? fine.cadence_hz[best] : coarse.cadence_hz[k];
        d.push_back(va - vb);
    }
    if (d.empty()) throw EmptyOverlapError("traces share no time support");
    return bland_altman_from_differences(d);
}

CadenceTrace select_activity(const CadenceTrace& trace, const BoutList& bouts, Activity activity) {
    CadenceTrace out;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        for (const auto& b : bouts) {
            if (b.activity == activity && b.contains(trace.times[k])) {
                out.times.push_back(trace.times[k]);
                out.if_hz.push_back(trace.if_hz[k]);
                out.cadence_hz.push_back(trace.cadence_hz[k]);
                break;
            }
        }
    }
    return out;
}

}  // namespace cadence
