#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracscrew::io {

inline constexpr const char* kVersion = "fracscrew 1.0.0";

// Floating-point cell formatted with 17 significant digits (round-trip safe).
std::string format_double(double v);

struct CsvWriter {
    explicit CsvWriter(std::vector<std::string> header) : header(std::move(header)) {}
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void row(std::initializer_list<double> cells) { rows.emplace_back(cells); }
    void row(const std::vector<double>& cells) { rows.push_back(cells); }
    void write(const std::string& path) const;
    std::string to_string() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string read_file(const std::string& path);

// One manifest per CLI run: parameters, tolerances, wall time, version and
// digests of every file the run produced.
struct RunManifest {
    std::string subcommand;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;

    void write(const std::string& path) const;
};

} // namespace fracscrew::io
