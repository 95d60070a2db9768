#include "narrativeforge/fsio.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "narrativeforge/error.hpp"

namespace narrativeforge {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) fail(ErrorCode::not_found, "no such file: " + path);
    fail(ErrorCode::storage, "cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::storage, "cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::storage, "short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::storage, "rename " + tmp + " -> " + path + ": " + ec.message());
}

}  // namespace narrativeforge
