#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Deterministic text output: every table is written with %.17g (so doubles
// round-trip exactly and re-runs are byte-identical), preceded by a comment
// header recording the tool, the FNV-1a hash of the effective configuration,
// and the seed.  No timestamps, hostnames or locale-dependent formatting.

namespace omitlab {

// 64-bit FNV-1a of a byte string, as a fixed-width hex string.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Shortest-exact formatting helpers.
std::string format_double(double v);              // %.17g
std::string format_double(double v, int digits);  // %.NNg

struct CsvTable {
    std::vector<std::string> header_lines; // written as "# ..." comments
    std::vector<std::string> columns;      // column names with units
    std::vector<std::vector<double>> rows;
};

// Renders the table; `write_csv` also creates parent directories.
std::string render_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// Writes pre-rendered text (used for JSON exports), creating parent
// directories as needed.
void write_text(const std::string& path, const std::string& content);

} // namespace omitlab
