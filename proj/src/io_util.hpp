#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace kde_edge::detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("io: number formatting failed");
    return std::string(buf, end);
}

inline std::string format_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

/// Whole-file write through a sibling temp file plus rename, so readers
/// never observe a partial artifact.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path parent = path.parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) throw std::runtime_error("io: cannot create directory '" +
                                         parent.string() + "'");
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("io: cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("io: short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("io: cannot move '" + tmp.string() + "' to '" +
                                     path.string() + "'");
}

}  // namespace kde_edge::detail
