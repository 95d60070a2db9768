#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace narrativeforge {

/// Minimal deflate-only zip archive builder on top of zlib. Entry timestamps
/// are fixed to the DOS epoch so identical inputs give identical bytes.
class ZipWriter {
 public:
  void add(std::string name, std::string_view data);
  std::string finish();

 private:
  struct Entry {
    std::string name;
    std::uint32_t crc = 0;
    std::uint32_t size = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t offset = 0;
  };
  std::string out_;
  std::vector<Entry> entries_;
  bool finished_ = false;
};

std::uint32_t crc32_of(std::string_view data);

}  // namespace narrativeforge
