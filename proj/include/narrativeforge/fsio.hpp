#pragma once

#include <string>
#include <string_view>

namespace narrativeforge {

// Throws Error(storage) on I/O failure, Error(not_found) when the file is missing.
std::string read_file(const std::string& path);

// Writes to "<path>.tmp" and renames over `path`. Throws Error(storage).
void write_file_atomic(const std::string& path, std::string_view bytes);

}  // namespace narrativeforge
