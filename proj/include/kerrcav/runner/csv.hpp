#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "kerrcav/errors.hpp"

namespace kerrcav::runner {

/// Round-trip formatting (17 significant digits); the C locale is never
/// changed here, so output is byte-stable for a given value.
inline std::string format_real(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError(dir.string(), "cannot create output directory");
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace kerrcav::runner
