#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace roulette::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes `content` to a temporary file beside `path`, flushes it to disk and
/// renames it over `path`. Readers see either the old file or the complete new
/// one; on failure the temporary is removed and nothing is left behind.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text(const std::filesystem::path& path);

}  // namespace roulette::io
