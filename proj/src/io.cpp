#include "omitlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "omitlab/errors.hpp"

namespace omitlab {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string format_double(double v) { return format_double(v, 17); }

std::string format_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string render_csv(const CsvTable& table) {
    std::string out;
    for (const auto& line : table.header_lines) {
        out += "# ";
        out += line;
        out += '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw OmitError("cannot open output file: " + path);
    f << content;
    if (!f) throw OmitError("failed writing output file: " + path);
}

void write_csv(const std::string& path, const CsvTable& table) {
    write_text(path, render_csv(table));
}

} // namespace omitlab
