#include "cadence/tfr_export.hpp"

#include "cadence/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace cadence {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void put_le(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<unsigned char>(bits & 0xffu);
        bits >>= 8;
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(const unsigned char* bytes) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
    return std::bit_cast<double>(bits);
}

void write_csv(const RealTfr& g, std::ostream& out) {
    out << "# kind=" << to_string(g.kind()) << " fs=" << format_number(g.fs()) << " fft_size=" << g.fft_size()
        << " first_bin=" << g.first_bin() << " hop=" << g.frames().hop << " first_sample=" << g.frames().first
        << " rows=" << g.rows() << " cols=" << g.cols() << '\n';
    out << "time_s";
    for (std::size_t c = 0; c < g.cols(); ++c) out << ',' << format_number(g.frequency(c));
    out << '\n';
    for (std::size_t r = 0; r < g.rows(); ++r) {
        out << format_number(g.time(r));
        for (double v : g.row(r)) out << ',' << format_number(v + 0.0);  // no "-0"
        out << '\n';
    }
}

void write_pgm(const RealTfr& g, std::ostream& out) {
    const double top = quantile(g.values(), 0.99);
    out << "P5\n" << g.rows() << ' ' << g.cols() << "\n255\n";
    std::string line(g.rows(), '\0');
    for (std::size_t c = g.cols(); c-- > 0;) {
        for (std::size_t r = 0; r < g.rows(); ++r) {
            double level = 0.0;
            if (top > 0.0) level = std::min(std::abs(g(r, c)) / top, 1.0);
            line[r] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * level)));
        }
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
}

void write_f64le(const RealTfr& g, std::ostream& out) {
    nlohmann::ordered_json header;
    header["rows"] = g.rows();
    header["cols"] = g.cols();
    header["fs"] = g.fs();
    header["fft_size"] = g.fft_size();
    header["first_bin"] = g.first_bin();
    header["hop"] = g.frames().hop;
    header["first_sample"] = g.frames().first;
    header["kind"] = std::string(to_string(g.kind()));
    out << header.dump() << '\n';
    for (double v : g.values()) put_le(out, v);
}

}  // namespace

RealTfr magnitude(const ComplexTfr& tfr) {
    RealTfr out(tfr.frames(), tfr.fft_half(), tfr.fs(), tfr.kind(), tfr.first_bin(), tfr.cols());
    const auto src = tfr.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::abs(src[i]);
    return out;
}

double quantile(std::span<const double> values, double p) {
    if (values.empty()) return 0.0;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void export_tfr(const RealTfr& values, const std::filesystem::path& path, TfrFormat format) {
    auto out = open_output(path);
    switch (format) {
        case TfrFormat::csv: write_csv(values, out); break;
        case TfrFormat::pgm: write_pgm(values, out); break;
        case TfrFormat::f64le: write_f64le(values, out); break;
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void export_tfr(const ComplexTfr& tfr, const std::filesystem::path& path, TfrFormat format) {
    export_tfr(magnitude(tfr), path, format);
}

RealTfr read_tfr_f64le(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 1, std::string("bad header: ") + e.what());
    }
    try {
        const auto rows = header.at("rows").get<std::size_t>();
        const auto cols = header.at("cols").get<std::size_t>();
        const auto fft_size = header.at("fft_size").get<std::size_t>();
        const FrameAxis frames{header.at("first_sample").get<std::size_t>(), header.at("hop").get<std::size_t>(), rows};
        RealTfr g(frames, fft_size / 2, header.at("fs").get<double>(),
                  parse_tfr_kind(header.at("kind").get<std::string>()), header.at("first_bin").get<std::size_t>(), cols);
        std::vector<unsigned char> bytes(rows * cols * 8);
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
            throw ParseError(path.string(), 2, "payload shorter than rows * cols doubles");
        }
        auto dst = g.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = get_le(bytes.data() + 8 * i);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 1, std::string("bad header: ") + e.what());
    }
}

}  // namespace cadence
