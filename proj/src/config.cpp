#include "cadence/config.hpp"

#include "cadence/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cadence {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}

}  // namespace

KeyValues parse_key_values(std::string_view text, const std::string& source) {
    KeyValues kv;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        ++line_no;
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str(), path.string());
}

std::string format_key_values(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view key) {
    const auto t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ConfigError("'" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view text, std::string_view key) {
    const auto t = trim(text);
    std::size_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ConfigError("'" + std::string(key) + "': expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view key) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (auto part : split(text, ',')) out.push_back(parse_number(part, key));
    return out;
}

std::string format_number_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i]);
    }
    return out;
}

std::string_view to_string(RidgeSource s) {
    switch (s) {
        case RidgeSource::dssst: return "dssst";
        case RidgeSource::sst: return "sst";
        case RidgeSource::stft: return "stft";
    }
    return "dssst";
}

RidgeSource parse_ridge_source(std::string_view s) {
    if (s == "dssst") return RidgeSource::dssst;
    if (s == "sst") return RidgeSource::sst;
    if (s == "stft") return RidgeSource::stft;
    throw ConfigError("ridge_source must be dssst, sst or stft, got '" + std::string(s) + "'");
}

std::string_view to_string(TfrFormat f) {
    switch (f) {
        case TfrFormat::csv: return "csv";
        case TfrFormat::pgm: return "pgm";
        case TfrFormat::f64le: return "f64le";
    }
    return "csv";
}

TfrFormat parse_tfr_format(std::string_view s) {
    if (s == "csv") return TfrFormat::csv;
    if (s == "pgm") return TfrFormat::pgm;
    if (s == "f64le") return TfrFormat::f64le;
    throw ConfigError("TFR export format must be csv, pgm or f64le, got '" + std::string(s) + "'");
}

void PipelineConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(window_span_s, "window_span_s");
    positive(sigma, "sigma");
    positive(gamma, "gamma");
    positive(detrend_span_s, "detrend_span_s");
    if (!(upsilon >= 0.0)) throw ConfigError("upsilon must be non-negative");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be non-negative");
    if (!(band.low >= 0.0) || !(band.low < band.high)) throw ConfigError("band_hz must satisfy 0 <= low < high");
    if (hop == 0) throw ConfigError("hop must be at least 1");
    if (fft_size % 2 != 0) throw ConfigError("fft_size must be even");
    if (fs < 0.0) throw ConfigError("fs must be positive when set");
}

std::size_t PipelineConfig::window_half_length(double sample_rate) const {
    const double k = std::round(window_span_s * sample_rate / 2.0);
    if (!(k >= 1.0)) {
        throw ConfigError("window_span_s * fs gives fewer than 3 window samples");
    }
    return static_cast<std::size_t>(k);
}

std::size_t PipelineConfig::fft_half(std::size_t half_length) const {
    if (fft_size == 0) return default_fft_half(half_length);
    if (fft_size < 2 * half_length + 1) {
        throw ConfigError("fft_size " + std::to_string(fft_size) + " is shorter than the window length " +
                          std::to_string(2 * half_length + 1));
    }
    return fft_size / 2;
}

PipelineConfig apply_key_values(PipelineConfig c, const KeyValues& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "window_span_s") c.window_span_s = parse_number(value, key);
        else if (key == "sigma") c.sigma = parse_number(value, key);
        else if (key == "gamma") c.gamma = parse_number(value, key);
        else if (key == "upsilon") c.upsilon = parse_number(value, key);
        else if (key == "lambda") c.lambda = parse_number(value, key);
        else if (key == "band_hz") {
            if (value == "full") {
                c.band = BandHz::full();
            } else {
                const auto edges = parse_number_list(value, key);
                if (edges.size() != 2) throw ConfigError("band_hz expects 'low,high' or 'full'");
                c.band = {edges[0], edges[1]};
            }
        } else if (key == "hop") c.hop = parse_count(value, key);
        else if (key == "fft_size") c.fft_size = value == "auto" ? 0 : parse_count(value, key);
        else if (key == "fs") c.fs = value == "auto" ? 0.0 : parse_number(value, key);
        else if (key == "detrend_span_s") c.detrend_span_s = parse_number(value, key);
        else if (key == "squeeze") {
            if (value == "complex") c.squeeze = SqueezeMode::complex;
            else if (value == "energy") c.squeeze = SqueezeMode::energy;
            else throw ConfigError("squeeze must be complex or energy");
        } else if (key == "ridge_source") c.ridge_source = parse_ridge_source(value);
        else if (key == "location") {
            try {
                c.location = parse_location(value);
            } catch (const ParameterError& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "input") c.input = value;
        else if (key == "labels") c.labels = value;
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "export_tfr") {
            c.export_tfr.clear();
            if (value != "none" && !value.empty()) {
                for (auto part : split(value, ',')) c.export_tfr.push_back(parse_tfr_format(part));
            }
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    return apply_key_values(PipelineConfig{}, read_key_values(path));
}

KeyValues to_key_values(const PipelineConfig& c) {
    KeyValues kv;
    kv["window_span_s"] = format_number(c.window_span_s);
    kv["sigma"] = format_number(c.sigma);
    kv["gamma"] = format_number(c.gamma);
    kv["upsilon"] = format_number(c.upsilon);
    kv["lambda"] = format_number(c.lambda);
    kv["band_hz"] = std::isinf(c.band.high) && c.band.low == 0.0 ? "full" : format_number_list({c.band.low, c.band.high});
    kv["hop"] = std::to_string(c.hop);
    kv["fft_size"] = c.fft_size == 0 ? "auto" : std::to_string(c.fft_size);
    kv["fs"] = c.fs == 0.0 ? "auto" : format_number(c.fs);
    kv["detrend_span_s"] = format_number(c.detrend_span_s);
    kv["squeeze"] = c.squeeze == SqueezeMode::complex ? "complex" : "energy";
    kv["ridge_source"] = std::string(to_string(c.ridge_source));
    kv["location"] = std::string(to_string(c.location));
    kv["input"] = c.input.string();
    kv["labels"] = c.labels.string();
    kv["output_dir"] = c.output_dir.string();
    std::string formats;
    for (auto f : c.export_tfr) formats += (formats.empty() ? "" : ",") + std::string(to_string(f));
    kv["export_tfr"] = formats.empty() ? "none" : formats;
    return kv;
}

}  // namespace cadence
