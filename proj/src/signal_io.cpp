#include "ftv/signal_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace ftv::io {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kTsigVersion = 1;
constexpr int kPgmMax = 65535;

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), sizeof(T))) {
        throw std::runtime_error("truncated tsig file");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

// Skips whitespace and '#' comments in a PNM header.
void skip_pnm_space(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

} // namespace

SignalFormat format_from_path(const fs::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".csv") {
        return SignalFormat::csv;
    }
    if (ext == ".pgm") {
        return SignalFormat::pgm;
    }
    if (ext == ".tsig") {
        return SignalFormat::tsig;
    }
    throw std::invalid_argument("unsupported signal format '" + ext + "' (expected .csv, .pgm or .tsig)");
}

TorusSignal read_csv(const fs::path& path) {
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": not a number");
        }
        if (line.find_first_not_of(" \t\r", used) != std::string::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": expected one value per line");
        }
        values.push_back(v);
    }
    if (!is_power_of_two(static_cast<long long>(values.size()))) {
        throw std::invalid_argument(path.string() + ": length " + std::to_string(values.size()) +
                                    " is not a power of two");
    }
    const int n = static_cast<int>(values.size());
    return TorusSignal(1, n, std::move(values));
}

void write_csv(const fs::path& path, const TorusSignal& s) {
    if (s.dim() != 1) {
        throw std::invalid_argument("CSV output holds 1D signals only");
    }
    auto out = open_out(path);
    out.precision(17);
    for (double v : s.values()) {
        out << v << '\n';
    }
}

fs::path pgm_sidecar(const fs::path& path) {
    fs::path side = path;
    side += ".json";
    return side;
}

TorusSignal read_pgm(const fs::path& path) {
    auto in = open_in(path);
    std::string magic;
    in >> magic;
    if (magic != "P5") {
        throw std::invalid_argument(path.string() + ": not a binary PGM (P5)");
    }
    int width = 0;
    int height = 0;
    int maxval = 0;
    skip_pnm_space(in);
    in >> width;
    skip_pnm_space(in);
    in >> height;
    skip_pnm_space(in);
    in >> maxval;
    in.get();
    if (!in || width <= 0 || width != height) {
        throw std::invalid_argument(path.string() + ": PGM must be square");
    }
    if (maxval != kPgmMax) {
        throw std::invalid_argument(path.string() + ": PGM maxval must be 65535");
    }
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<unsigned char> raw(count * 2);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
        throw std::invalid_argument(path.string() + ": truncated PGM data");
    }
    double lo = 0.0;
    double hi = 1.0;
    const fs::path side = pgm_sidecar(path);
    if (fs::exists(side)) {
        std::ifstream js(side);
        const auto meta = nlohmann::json::parse(js);
        lo = meta.at("min").get<double>();
        hi = meta.at("max").get<double>();
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int q = (raw[2 * i] << 8) | raw[2 * i + 1];
        values[i] = lo + (hi - lo) * static_cast<double>(q) / kPgmMax;
    }
    return TorusSignal(2, width, std::move(values));
}

void write_pgm(const fs::path& path, const TorusSignal& s) {
    if (s.dim() != 2) {
        throw std::invalid_argument("PGM output holds 2D signals only");
    }
    const auto [lo_it, hi_it] = std::minmax_element(s.values().begin(), s.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    auto out = open_out(path);
    out << "P5\n" << s.side() << ' ' << s.side() << '\n' << kPgmMax << '\n';
    for (double v : s.values()) {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
        const int q = static_cast<int>(std::lround(std::clamp(t, 0.0, 1.0) * kPgmMax));
        out.put(static_cast<char>((q >> 8) & 0xff));
        out.put(static_cast<char>(q & 0xff));
    }
    nlohmann::json meta{{"min", lo}, {"max", hi}};
    std::ofstream js(pgm_sidecar(path));
    js << meta.dump(2) << '\n';
}

TorusSignal read_tsig(const fs::path& path) {
    auto in = open_in(path);
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || std::string(magic.data(), 4) != "TSIG") {
        throw std::invalid_argument(path.string() + ": bad tsig magic");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != kTsigVersion) {
        throw std::invalid_argument(path.string() + ": unsupported tsig version " + std::to_string(version));
    }
    const auto d = get_le<std::uint32_t>(in);
    const auto n = get_le<std::uint32_t>(in);
    if (d < 1 || d > 3 || !is_power_of_two(n)) {
        throw std::invalid_argument(path.string() + ": bad tsig shape");
    }
    std::vector<double> values(ipow(n, static_cast<int>(d)));
    for (double& v : values) {
        v = get_le<double>(in);
    }
    return TorusSignal(static_cast<int>(d), static_cast<int>(n), std::move(values));
}

void write_tsig(const fs::path& path, const TorusSignal& s) {
    auto out = open_out(path);
    out.write("TSIG", 4);
    put_le<std::uint32_t>(out, kTsigVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.dim()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.side()));
    for (double v : s.values()) {
        put_le<double>(out, v);
    }
}

TorusSignal read_signal(const fs::path& path) {
    switch (format_from_path(path)) {
    case SignalFormat::csv:
        return read_csv(path);
    case SignalFormat::pgm:
        return read_pgm(path);
    case SignalFormat::tsig:
        return read_tsig(path);
    }
    throw std::logic_error("unreachable");
}

void write_signal(const fs::path& path, const TorusSignal& s) {
    switch (format_from_path(path)) {
    case SignalFormat::csv:
        write_csv(path, s);
        return;
    case SignalFormat::pgm:
        write_pgm(path, s);
        return;
    case SignalFormat::tsig:
        write_tsig(path, s);
        return;
    }
}

} // namespace ftv::io
