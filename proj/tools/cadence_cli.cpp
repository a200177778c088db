// cadence: gait cadence from triaxial accelerometry via the de-shape
// synchrosqueezing transform.
//
//   cadence run      --input rec.csv --labels labels.csv --output-dir out [--config run.cfg] [flags]
//   cadence synth    --spec walk.cfg | --preset constant|chirp  --output-dir fixture [--seed N]
//   cadence tfr      --input rec.csv --kind dssst --format pgm --out tfr.pgm [flags]
//   cadence compare  --a wrist/cadence.csv --b hip/cadence.csv --out ba.csv [--label 1]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error, 3 internal error.

#include "cadence/config.hpp"
#include "cadence/error.hpp"
#include "cadence/io.hpp"
#include "cadence/pipeline.hpp"
#include "cadence/tfr_export.hpp"
#include "cadence/walk_synth.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace cadence;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

/// Pipeline flags, each named after its config key.
struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;

    void add_to(CLI::App* app) {
        app->add_option("--config", config_file, "key = value configuration file");
        for (const char* key : {"window_span_s", "sigma", "gamma", "upsilon", "lambda", "band_hz", "hop", "fft_size",
                                "fs", "detrend_span_s", "squeeze", "ridge_source", "location", "input", "labels",
                                "output_dir", "export_tfr"}) {
            std::string flag = std::string("--") + key;
            for (auto& ch : flag) {
                if (ch == '_') ch = '-';
            }
            app->add_option_function<std::string>(
                flag, [this, key](const std::string& v) { values[key] = v; }, std::string("overrides config key ") + key);
        }
    }

    PipelineConfig resolve() const {
        PipelineConfig config;
        if (!config_file.empty()) config = load_pipeline_config(config_file);
        return apply_key_values(config, values);
    }
};

int cmd_run(const ConfigFlags& flags) {
    const auto config = flags.resolve();
    const auto report = run_pipeline(config);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& b : report.bouts) {
        std::fprintf(stderr, "bout %zu [%g, %g) s label %d: %s, %zu frames, %.2f s\n", b.index, b.bout.start_s,
                     b.bout.end_s, static_cast<int>(b.bout.activity), std::string(to_string(b.status)).c_str(), b.frames,
                     b.seconds);
        if (!b.message.empty()) std::cerr << "  error: " << b.message << '\n';
        for (const auto& w : b.warnings) std::cerr << "  warning: " << w << '\n';
    }
    for (const auto& p : report.outputs) std::cout << p.string() << '\n';
    const bool any_failed = std::any_of(report.bouts.begin(), report.bouts.end(),
                                        [](const BoutReport& b) { return b.status == BoutStatus::failed; });
    return any_failed ? kData : kOk;
}

int cmd_synth(const std::string& spec_path, const std::string& preset, const std::string& out_dir,
              std::uint64_t seed, double baseline_g, const std::string& location) {
    WalkingModelSpec spec;
    if (!spec_path.empty()) {
        spec = walking_spec_from_key_values(read_key_values(spec_path));
    } else {
        spec = preset_walk(preset.empty() ? "constant" : preset);
    }
    const auto res = synthesize_walk(spec, seed);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    // The axes share one direction, so the vector magnitude is |baseline + Y|.
    TriaxialRecord rec;
    rec.fs = spec.fs;
    rec.location = parse_location(location);
    const double axis = 1.0 / std::sqrt(3.0);
    for (double v : res.signal.samples()) {
        const double m = baseline_g + v;
        rec.x.push_back(m * axis);
        rec.y.push_back(m * axis);
        rec.z.push_back(m * axis);
    }
    write_triaxial_csv(dir / "signal.csv", rec);

    std::vector<Bout> bouts;
    for (const auto& b : spec.bouts) bouts.push_back({b.start_s, b.end_s, activity_from_label(b.label)});
    write_labels_csv(dir / "labels.csv", BoutList(std::move(bouts)));

    LabelledTrace truth;
    for (std::size_t k = 0; k < res.truth_if.size(); ++k) {
        if (res.truth_label[k] < 0) continue;
        truth.trace.times.push_back(res.signal.time_at(k));
        truth.trace.if_hz.push_back(res.truth_if[k]);
        truth.trace.cadence_hz.push_back(2.0 * res.truth_if[k]);
        truth.labels.push_back(res.truth_label[k]);
    }
    write_cadence_csv(dir / "truth.csv", truth);

    std::ofstream cfg(dir / "walk.cfg");
    cfg << format_key_values(to_key_values(spec));
    if (!cfg) throw IoError("cannot write " + (dir / "walk.cfg").string());
    for (const char* name : {"signal.csv", "labels.csv", "truth.csv", "walk.cfg"}) std::cout << (dir / name).string() << '\n';
    return kOk;
}

int cmd_tfr(const ConfigFlags& flags, const std::string& kind_name, const std::string& format_name,
            const std::string& out, std::optional<double> start_s, std::optional<double> end_s) {
    const auto config = flags.resolve();
    if (config.input.empty()) throw ConfigError("no input file given");
    const TfrKind kind = parse_tfr_kind(kind_name);
    const TfrFormat format = parse_tfr_format(format_name);
    std::optional<double> fs_hint;
    if (config.fs > 0.0) fs_hint = config.fs;
    const auto rec = load_triaxial_csv(config.input, fs_hint, config.location);
    const Signal f = preprocess(rec, config);

    const double fs = f.fs();
    auto to_sample = [&](double t) {
        return static_cast<std::size_t>(std::clamp(std::ceil((t - f.t0()) * fs - 1e-9), 0.0, static_cast<double>(f.size())));
    };
    const std::size_t first = start_s ? to_sample(*start_s) : 0;
    const std::size_t last = end_s ? to_sample(*end_s) : f.size();
    const FrameAxis frames = FrameAxis::covering(first, last, config.hop);
    if (frames.count == 0) throw DataError("no frames in the requested time range");

    const std::size_t half = config.window_half_length(fs);
    const std::size_t fft_half = config.fft_half(half);
    AnalysisRequest req;
    req.dssst = kind == TfrKind::dssst;
    req.sst = kind == TfrKind::sst;
    req.stft = kind == TfrKind::stft;
    req.dsstft = kind == TfrKind::dsstft;
    req.stct = kind == TfrKind::stct;
    req.mask = kind == TfrKind::istct_mask;
    auto res = analyze(f, gaussian_window(half, config.sigma), fft_half, frames,
                       DeshapeParams{config.gamma, config.upsilon, config.squeeze}, req);
    if (res.stft) export_tfr(*res.stft, out, format);
    if (res.dsstft) export_tfr(*res.dsstft, out, format);
    if (res.sst) export_tfr(*res.sst, out, format);
    if (res.dssst) export_tfr(*res.dssst, out, format);
    if (res.stct) export_tfr(*res.stct, out, format);
    if (res.mask) export_tfr(*res.mask, out, format);
    std::cout << out << '\n';
    return kOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out,
                std::optional<int> label) {
    auto a = load_cadence_csv(a_path);
    auto b = load_cadence_csv(b_path);
    auto filter = [&](const LabelledTrace& t) {
        if (!label) return t.trace;
        CadenceTrace out_trace;
        for (std::size_t k = 0; k < t.trace.size(); ++k) {
            if (t.labels[k] != *label) continue;
            out_trace.times.push_back(t.trace.times[k]);
            out_trace.if_hz.push_back(t.trace.if_hz[k]);
            out_trace.cadence_hz.push_back(t.trace.cadence_hz[k]);
        }
        return out_trace;
    };
    const auto stats = bland_altman(filter(a), filter(b));
    write_bland_altman_csv(out, stats);
    std::printf("mean %.4f  sd %.4f  LoA [%.4f, %.4f]  n %zu\n", stats.mean_diff, stats.sd_diff, stats.loa_low,
                stats.loa_high, stats.n);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gait cadence from triaxial accelerometry (de-shape synchrosqueezing)"};
    app.require_subcommand(1);

    ConfigFlags run_flags;
    auto* run = app.add_subcommand("run", "full pipeline over labelled bouts");
    run_flags.add_to(run);

    std::string spec_path, preset, synth_out = "fixture", location = "other";
    std::uint64_t seed = 1;
    double baseline_g = 1.0;
    auto* synth = app.add_subcommand("synth", "generate a synthetic walking fixture");
    synth->add_option("--spec", spec_path, "walking-model key = value file");
    synth->add_option("--preset", preset, "constant (1 Hz, 60 s) or chirp (0.8 -> 1.2 Hz, 90 s)");
    synth->add_option("--output-dir", synth_out, "directory for signal.csv, labels.csv, truth.csv, walk.cfg");
    synth->add_option("--seed", seed, "noise seed");
    synth->add_option("--baseline-g", baseline_g, "constant added before writing the axes (gravity)");
    synth->add_option("--location", location, "sensor location tag");

    ConfigFlags tfr_flags;
    std::string kind = "dssst", format = "csv", tfr_out;
    std::optional<double> start_s, end_s;
    auto* tfr = app.add_subcommand("tfr", "export one time-frequency representation");
    tfr_flags.add_to(tfr);
    tfr->add_option("--kind", kind, "stft, stct, istct, dsstft, sst or dssst");
    tfr->add_option("--format", format, "csv, pgm or f64le");
    tfr->add_option("--out", tfr_out, "output file")->required();
    tfr->add_option("--start-s", start_s, "first frame time");
    tfr->add_option("--end-s", end_s, "end of the frame range");

    std::string a_path, b_path, ba_out = "bland_altman.csv";
    std::optional<int> label;
    auto* compare = app.add_subcommand("compare", "Bland-Altman agreement between two cadence traces");
    compare->add_option("--a", a_path, "first cadence.csv")->required();
    compare->add_option("--b", b_path, "second cadence.csv")->required();
    compare->add_option("--out", ba_out, "output CSV");
    compare->add_option("--label", label, "restrict to one activity label");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*synth) return cmd_synth(spec_path, preset, synth_out, seed, baseline_g, location);
        if (*tfr) return cmd_tfr(tfr_flags, kind, format, tfr_out, start_s, end_s);
        if (*compare) return cmd_compare(a_path, b_path, ba_out, label);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const StructuralError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
