#include "cadence/io.hpp"

#include "cadence/config.hpp"
#include "cadence/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace cadence {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

bool to_double(std::string_view s, double& v) {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(v);
}

class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path) : in_(path), source_(path.string()) {
        if (!in_) throw IoError("cannot open " + source_);
    }

    /// Next non-blank line split into fields; false at end of file.
    bool next(std::vector<std::string_view>& fields) {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (trim(line_).empty()) continue;
            fields = split_fields(line_);
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_no_; }
    const std::string& source() const noexcept { return source_; }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

    double number(std::string_view field, const char* column) const {
        double v = 0.0;
        if (!to_double(field, v)) {
            throw ParseError(source_, line_no_, std::string("column '") + column + "': not a finite number: '" +
                                                    std::string(field) + "'");
        }
        return v;
    }

private:
    std::ifstream in_;
    std::string source_;
    std::string line_;
    std::size_t line_no_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

TriaxialRecord load_triaxial_csv(const std::filesystem::path& path, std::optional<double> fs_hint,
                                 SensorLocation location) {
    CsvReader csv(path);
    std::vector<std::string_view> fields;
    if (!csv.next(fields)) throw ParseError(csv.source(), csv.line(), "empty file, expected header t,x,y,z");

    int col_t = -1, col_x = -1, col_y = -1, col_z = -1;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = fields[i];
        if (name == "t") col_t = static_cast<int>(i);
        else if (name == "x") col_x = static_cast<int>(i);
        else if (name == "y") col_y = static_cast<int>(i);
        else if (name == "z") col_z = static_cast<int>(i);
        else csv.fail("unexpected column '" + std::string(name) + "', expected header t,x,y,z or x,y,z");
    }
    for (auto [col, name] : {std::pair{col_x, "x"}, std::pair{col_y, "y"}, std::pair{col_z, "z"}}) {
        if (col < 0) csv.fail(std::string("missing column '") + name + "'");
    }
    const std::size_t width = fields.size();

    TriaxialRecord rec;
    rec.location = location;
    std::vector<double> times;
    while (csv.next(fields)) {
        if (fields.size() != width) {
            csv.fail("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        }
        if (col_t >= 0) times.push_back(csv.number(fields[static_cast<std::size_t>(col_t)], "t"));
        rec.x.push_back(csv.number(fields[static_cast<std::size_t>(col_x)], "x"));
        rec.y.push_back(csv.number(fields[static_cast<std::size_t>(col_y)], "y"));
        rec.z.push_back(csv.number(fields[static_cast<std::size_t>(col_z)], "z"));
    }
    if (rec.x.empty()) throw DataError(csv.source() + ": no samples");

    if (col_t >= 0) {
        if (times.size() < 2) {
            if (!fs_hint) throw DataError(csv.source() + ": one sample cannot determine the sampling rate");
            rec.fs = *fs_hint;
        } else {
            std::vector<double> dt(times.size() - 1);
            for (std::size_t i = 1; i < times.size(); ++i) dt[i - 1] = times[i] - times[i - 1];
            std::vector<double> sorted = dt;
            std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
            const double median = sorted[sorted.size() / 2];
            if (!(median > 0.0)) throw DataError(csv.source() + ": time column is not increasing");
            for (std::size_t i = 0; i < dt.size(); ++i) {
                if (std::abs(dt[i] - median) > kSamplingUniformity * median) {
                    throw DataError(csv.source() + ": non-uniform sampling between rows " + std::to_string(i + 1) +
                                    " and " + std::to_string(i + 2) + " (interval " + format_number(dt[i]) +
                                    " s, median " + format_number(median) + " s)");
                }
            }
            // Mean interval over the whole record, snapped to whole hertz when it
            // differs only by decimal rounding of the timestamps.
            double fs = static_cast<double>(dt.size()) / (times.back() - times.front());
            if (std::abs(fs - std::round(fs)) <= 1e-6 * fs) fs = std::round(fs);
            rec.fs = fs;
        }
        rec.t0 = times.front();
    } else {
        if (!fs_hint || !(*fs_hint > 0.0)) {
            throw ConfigError(csv.source() + ": no t column, so the sampling rate must be given");
        }
        rec.fs = *fs_hint;
    }
    rec.validate();
    return rec;
}

void write_triaxial_csv(const std::filesystem::path& path, const TriaxialRecord& rec) {
    rec.validate();
    auto out = open_output(path);
    out << "t,x,y,z\n";
    for (std::size_t k = 0; k < rec.size(); ++k) {
        out << format_number(rec.t0 + static_cast<double>(k) / rec.fs) << ',' << format_number(rec.x[k]) << ','
            << format_number(rec.y[k]) << ',' << format_number(rec.z[k]) << '\n';
    }
    finish(out, path);
}

BoutList load_labels_csv(const std::filesystem::path& path) {
    CsvReader csv(path);
    std::vector<std::string_view> fields;
    std::vector<Bout> bouts;
    bool first = true;
    while (csv.next(fields)) {
        if (first) {
            first = false;
            double probe = 0.0;
            if (!fields.empty() && !to_double(fields[0], probe)) {
                if (fields.size() != 3 || fields[0] != "start_s" || fields[1] != "end_s" || fields[2] != "label") {
                    csv.fail("expected header start_s,end_s,label");
                }
                continue;
            }
        }
        if (fields.size() != 3) csv.fail("expected 3 fields start_s,end_s,label");
        const double start = csv.number(fields[0], "start_s");
        const double end = csv.number(fields[1], "end_s");
        const double label = csv.number(fields[2], "label");
        if (label != std::floor(label) || label < 0.0 || label > 3.0) {
            throw ValidationError(csv.source() + ":" + std::to_string(csv.line()) + ": unknown label '" +
                                  std::string(fields[2]) + "', expected 0, 1, 2 or 3");
        }
        bouts.push_back({start, end, activity_from_label(static_cast<int>(label))});
    }
    return BoutList(std::move(bouts));
}

void write_labels_csv(const std::filesystem::path& path, const BoutList& bouts) {
    auto out = open_output(path);
    out << "start_s,end_s,label\n";
    for (const auto& b : bouts) {
        out << format_number(b.start_s) << ',' << format_number(b.end_s) << ',' << static_cast<int>(b.activity) << '\n';
    }
    finish(out, path);
}

std::vector<std::string> check_bouts_against_window(const BoutList& bouts, double window_span_s) {
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < bouts.size(); ++i) {
        if (bouts[i].duration() < window_span_s) {
            warnings.push_back("bout " + std::to_string(i) + " [" + format_number(bouts[i].start_s) + ", " +
                               format_number(bouts[i].end_s) + ") s is shorter than the " +
                               format_number(window_span_s) + " s window span");
        }
    }
    return warnings;
}

void write_cadence_csv(const std::filesystem::path& path, const LabelledTrace& t) {
    auto out = open_output(path);
    out << "time_s,if_hz,cadence_hz,bout_label\n";
    for (std::size_t k = 0; k < t.trace.size(); ++k) {
        out << format_number(t.trace.times[k]) << ',' << format_number(t.trace.if_hz[k]) << ','
            << format_number(t.trace.cadence_hz[k]) << ',' << t.labels[k] << '\n';
    }
    finish(out, path);
}

LabelledTrace load_cadence_csv(const std::filesystem::path& path) {
    CsvReader csv(path);
    std::vector<std::string_view> fields;
    if (!csv.next(fields) || fields.size() != 4 || fields[0] != "time_s" || fields[1] != "if_hz" ||
        fields[2] != "cadence_hz" || fields[3] != "bout_label") {
        csv.fail("expected header time_s,if_hz,cadence_hz,bout_label");
    }
    LabelledTrace t;
    while (csv.next(fields)) {
        if (fields.size() != 4) csv.fail("expected 4 fields");
        t.trace.times.push_back(csv.number(fields[0], "time_s"));
        t.trace.if_hz.push_back(csv.number(fields[1], "if_hz"));
        t.trace.cadence_hz.push_back(csv.number(fields[2], "cadence_hz"));
        t.labels.push_back(static_cast<int>(csv.number(fields[3], "bout_label")));
        if (t.trace.times.size() > 1 && !(t.trace.times.back() > t.trace.times[t.trace.times.size() - 2])) {
            csv.fail("time_s must be strictly increasing");
        }
    }
    return t;
}

void write_summary_csv(const std::filesystem::path& path, const SummaryTable& table) {
    auto out = open_output(path);
    out << "location,activity,mean_cadence,sd_cadence,n_frames,duration_s\n";
    for (const auto& r : table.rows) {
        out << to_string(r.location) << ',' << to_string(r.activity) << ',' << format_number(r.mean) << ','
            << format_number(r.sd) << ',' << r.count << ',' << format_number(r.duration_s) << '\n';
    }
    finish(out, path);
}

void write_bland_altman_csv(const std::filesystem::path& path, const BAStats& s) {
    auto out = open_output(path);
    out << "mean_diff,sd_diff,loa_low,loa_high,n,mean_ci,loa_ci\n";
    out << format_number(s.mean_diff) << ',' << format_number(s.sd_diff) << ',' << format_number(s.loa_low) << ','
        << format_number(s.loa_high) << ',' << s.n << ','
        << (s.mean_ci_half_width ? format_number(*s.mean_ci_half_width) : "") << ','
        << (s.loa_ci_half_width ? format_number(*s.loa_ci_half_width) : "") << '\n';
    finish(out, path);
}

}  // namespace cadence
