#include "fracscrew/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracscrew::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvWriter::to_string() const {
    std::ostringstream os;
    for (size_t c = 0; c < header.size(); ++c)
        os << header[c] << (c + 1 < header.size() ? "," : "\n");
    for (const auto& r : rows) {
        for (size_t c = 0; c < r.size(); ++c)
            os << format_double(r[c]) << (c + 1 < r.size() ? "," : "\n");
    }
    return os.str();
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_string();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters;
    j["tolerances"] = tolerances;
    j["wall_time_s"] = wall_time_s;
    auto outs = nlohmann::json::array();
    for (const auto& p : outputs) {
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(read_file(p))));
        outs.push_back({{"path", p}, {"fnv1a64", hex}});
    }
    j["outputs"] = outs;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

} // namespace fracscrew::io
