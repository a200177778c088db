#include "cadence/pipeline.hpp"

#include "cadence/error.hpp"
#include "cadence/tfr_export.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

namespace cadence {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Saturation warning when more than this share of cells sits at or below upsilon.
constexpr double kSaturationShare = 0.5;

}  // namespace

std::string_view to_string(BoutStatus s) {
    switch (s) {
        case BoutStatus::ok: return "ok";
        case BoutStatus::degenerate: return "degenerate";
        case BoutStatus::failed: return "failed";
    }
    return "failed";
}

bool RunReport::all_ok() const {
    return std::all_of(bouts.begin(), bouts.end(), [](const BoutReport& b) { return b.status == BoutStatus::ok; });
}

Signal preprocess(const Signal& magnitude, const PipelineConfig& config, std::vector<std::string>* warnings) {
    std::size_t order = static_cast<std::size_t>(std::max(1.0, std::round(config.detrend_span_s * magnitude.fs())));
    if (order > magnitude.size()) {
        if (warnings) {
            warnings->push_back("detrend span exceeds the recording; median filter shortened to " +
                                std::to_string(magnitude.size()) + " samples");
        }
        order = magnitude.size();
    }
    return rectify(median_detrend(magnitude, order));
}

Signal preprocess(const TriaxialRecord& rec, const PipelineConfig& config, std::vector<std::string>* warnings) {
    TriaxialRecord r = rec;
    if (config.fs > 0.0) r.fs = config.fs;
    return preprocess(vector_magnitude(r), config, warnings);
}

BoutAnalysis analyze_bout(const Signal& f, const Bout& bout, const PipelineConfig& config) {
    const double fs = f.fs();
    const std::size_t n = f.size();
    auto to_sample = [&](double t) {
        const double k = std::ceil((t - f.t0()) * fs - 1e-9);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n)));
    };
    const std::size_t first = to_sample(bout.start_s);
    const std::size_t last = to_sample(bout.end_s);
    if (last <= first) throw DataError("bout lies outside the recording");

    BoutAnalysis out;
    out.frames = FrameAxis::covering(first, last, config.hop);
    if (out.frames.count == 0) throw DataError("bout contains no frame on the hop grid");

    const std::size_t half = config.window_half_length(fs);
    out.fft_half = config.fft_half(half);
    const Window window = gaussian_window(half, config.sigma);

    // Band columns, computed from the bin spacing fs / 2M.
    const double bin_hz = fs / static_cast<double>(2 * out.fft_half);
    const double lo_bin = std::ceil(config.band.low / bin_hz - 1e-9);
    const double hi_bin = std::min(std::floor(config.band.high / bin_hz + 1e-9), static_cast<double>(out.fft_half));
    if (!(lo_bin <= hi_bin)) throw ParameterError("band contains no frequency bin at this resolution");

    AnalysisRequest request;
    request.dssst = config.ridge_source == RidgeSource::dssst;
    request.sst = config.ridge_source == RidgeSource::sst;
    request.stft = config.ridge_source == RidgeSource::stft;
    request.first_bin = static_cast<std::size_t>(lo_bin);
    request.bin_count = static_cast<std::size_t>(hi_bin - lo_bin) + 1;

    DeshapeParams params{config.gamma, config.upsilon, config.squeeze};
    auto result = analyze(f, window, out.fft_half, out.frames, params, request);
    out.undefined_omega = result.undefined_omega;
    switch (config.ridge_source) {
        case RidgeSource::dssst: out.tfr = std::move(result.dssst); break;
        case RidgeSource::sst: out.tfr = std::move(result.sst); break;
        case RidgeSource::stft: out.tfr = std::move(result.stft); break;
    }

    const ComplexTfr& tfr = *out.tfr;
    out.ridge = extract_ridge(magnitude_block(tfr, 0, tfr.rows() - 1, 0, tfr.cols() - 1), config.lambda);
    for (auto& b : out.ridge.bins) b += tfr.first_bin();
    out.ridge.band_low_bin = tfr.first_bin();
    out.ridge.band_high_bin = tfr.first_bin() + tfr.cols() - 1;
    out.trace = cadence_from_ridge(out.ridge, fs, out.fft_half, out.frames, f.t0());
    return out;
}

PipelineResult run_pipeline(const TriaxialRecord& rec, const BoutList& bouts, const PipelineConfig& config) {
    config.validate();
    const auto start = Clock::now();
    PipelineResult result;
    RunReport& report = result.report;
    const Signal f = preprocess(rec, config, &report.warnings);
    for (auto& w : check_bouts_against_window(bouts, config.window_span_s)) report.warnings.push_back(std::move(w));

    for (std::size_t i = 0; i < bouts.size(); ++i) {
        const auto bout_start = Clock::now();
        BoutReport br;
        br.index = i;
        br.bout = bouts[i];
        try {
            auto analysis = analyze_bout(f, bouts[i], config);
            br.frames = analysis.trace.size();
            if (analysis.ridge.status == RidgeStatus::degenerate) {
                br.status = BoutStatus::degenerate;
                br.warnings.push_back("degenerate ridge: the TFR block is zero; lowest band bin reported");
            }
            const double cells = static_cast<double>(analysis.frames.count * (analysis.fft_half + 1));
            if (config.ridge_source != RidgeSource::stft && cells > 0.0 &&
                static_cast<double>(analysis.undefined_omega) > kSaturationShare * cells) {
                br.warnings.push_back("threshold saturation: " +
                                      std::to_string(static_cast<int>(100.0 * analysis.undefined_omega / cells)) +
                                      "% of cells at or below upsilon");
            }
            const int label = static_cast<int>(bouts[i].activity);
            auto& t = result.trace;
            t.trace.times.insert(t.trace.times.end(), analysis.trace.times.begin(), analysis.trace.times.end());
            t.trace.if_hz.insert(t.trace.if_hz.end(), analysis.trace.if_hz.begin(), analysis.trace.if_hz.end());
            t.trace.cadence_hz.insert(t.trace.cadence_hz.end(), analysis.trace.cadence_hz.begin(),
                                      analysis.trace.cadence_hz.end());
            t.labels.insert(t.labels.end(), analysis.trace.size(), label);
            result.analyses.emplace_back(std::move(analysis));
        } catch (const std::exception& e) {
            br.status = BoutStatus::failed;
            br.message = e.what();
            result.analyses.emplace_back(std::nullopt);
        }
        br.seconds = seconds_since(bout_start);
        report.bouts.push_back(std::move(br));
    }
    if (!bouts.empty()) {
        result.summary = bout_cadence_summary(result.trace.trace, bouts, rec.location);
        for (const auto& note : result.summary.notices) report.warnings.push_back(note);
    }
    report.seconds = seconds_since(start);
    return result;
}

namespace {

void write_report_json(const std::filesystem::path& path, const RunReport& report, const PipelineConfig& config) {
    nlohmann::ordered_json j;
    auto params = to_key_values(config);
    for (const char* path_key : {"input", "labels", "output_dir"}) params.erase(path_key);
    j["config"] = params;
    j["warnings"] = report.warnings;
    auto& arr = j["bouts"] = nlohmann::ordered_json::array();
    for (const auto& b : report.bouts) {
        nlohmann::ordered_json e;
        e["index"] = b.index;
        e["start_s"] = b.bout.start_s;
        e["end_s"] = b.bout.end_s;
        e["label"] = static_cast<int>(b.bout.activity);
        e["status"] = std::string(to_string(b.status));
        e["frames"] = b.frames;
        if (!b.message.empty()) e["error"] = b.message;
        e["warnings"] = b.warnings;
        arr.push_back(std::move(e));
    }
    std::vector<std::string> outputs;
    for (const auto& p : report.outputs) outputs.push_back(p.filename().string());
    j["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& config) {
    config.validate();
    if (config.input.empty()) throw ConfigError("no input file given");
    if (config.labels.empty()) throw ConfigError("no label file given");
    std::optional<double> fs_hint;
    if (config.fs > 0.0) fs_hint = config.fs;
    const auto rec = load_triaxial_csv(config.input, fs_hint, config.location);
    const auto bouts = load_labels_csv(config.labels);

    auto result = run_pipeline(rec, bouts, config);
    RunReport& report = result.report;
    std::filesystem::create_directories(config.output_dir);
    if (!bouts.empty()) {
        const auto cadence_path = config.output_dir / "cadence.csv";
        write_cadence_csv(cadence_path, result.trace);
        report.outputs.push_back(cadence_path);
        const auto summary_path = config.output_dir / "summary.csv";
        write_summary_csv(summary_path, result.summary);
        report.outputs.push_back(summary_path);
    }
    for (std::size_t i = 0; i < result.analyses.size(); ++i) {
        if (!result.analyses[i] || !result.analyses[i]->tfr) continue;
        for (auto format : config.export_tfr) {
            const auto path = config.output_dir / ("bout_" + std::to_string(i) + "_" +
                                                   std::string(to_string(result.analyses[i]->tfr->kind())) + "." +
                                                   std::string(to_string(format)));
            export_tfr(*result.analyses[i]->tfr, path, format);
            report.outputs.push_back(path);
        }
    }
    const auto report_path = config.output_dir / "report.json";
    report.outputs.push_back(report_path);
    write_report_json(report_path, report, config);
    return report;
}

}  // namespace cadence
