#pragma once

#include <cstdio>
#include <string>

namespace finitemix {

// Floats in CSV and CLI output use 17 significant digits, which round-trips
// IEEE doubles exactly and keeps repeated runs byte-identical.
inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

// Writes content to path via a temporary file plus rename, so readers never
// observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace finitemix
