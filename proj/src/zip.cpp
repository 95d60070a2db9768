#include "narrativeforge/zip.hpp"

#include <zlib.h>

#include "narrativeforge/error.hpp"

namespace narrativeforge {

namespace {

constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string deflate_raw(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    fail(ErrorCode::storage, "deflateInit2 failed");
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) fail(ErrorCode::storage, "deflate failed");
  out.resize(produced);
  return out;
}

}  // namespace

std::uint32_t crc32_of(std::string_view data) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

void ZipWriter::add(std::string name, std::string_view data) {
  if (finished_) fail(ErrorCode::storage, "zip archive already finished");
  Entry e;
  e.name = std::move(name);
  e.crc = crc32_of(data);
  e.size = static_cast<std::uint32_t>(data.size());
  const auto body = deflate_raw(data);
  e.compressed_size = static_cast<std::uint32_t>(body.size());
  e.offset = static_cast<std::uint32_t>(out_.size());

  put32(out_, 0x04034b50);
  put16(out_, 20);  // version needed
  put16(out_, 0);   // flags
  put16(out_, 8);   // deflate
  put16(out_, kDosTime);
  put16(out_, kDosDate);
  put32(out_, e.crc);
  put32(out_, e.compressed_size);
  put32(out_, e.size);
  put16(out_, static_cast<std::uint16_t>(e.name.size()));
  put16(out_, 0);
  out_ += e.name;
  out_ += body;
  entries_.push_back(std::move(e));
}

std::string ZipWriter::finish() {
  if (finished_) fail(ErrorCode::storage, "zip archive already finished");
  finished_ = true;
  const auto cd_offset = static_cast<std::uint32_t>(out_.size());
  for (const auto& e : entries_) {
    put32(out_, 0x02014b50);
    put16(out_, 20);  // version made by
    put16(out_, 20);
    put16(out_, 0);
    put16(out_, 8);
    put16(out_, kDosTime);
    put16(out_, kDosDate);
    put32(out_, e.crc);
    put32(out_, e.compressed_size);
    put32(out_, e.size);
    put16(out_, static_cast<std::uint16_t>(e.name.size()));
    put16(out_, 0);  // extra
    put16(out_, 0);  // comment
    put16(out_, 0);  // disk
    put16(out_, 0);  // internal attrs
    put32(out_, 0);  // external attrs
    put32(out_, e.offset);
    out_ += e.name;
  }
  const auto cd_size = static_cast<std::uint32_t>(out_.size()) - cd_offset;
  put32(out_, 0x06054b50);
  put16(out_, 0);
  put16(out_, 0);
  put16(out_, static_cast<std::uint16_t>(entries_.size()));
  put16(out_, static_cast<std::uint16_t>(entries_.size()));
  put32(out_, cd_size);
  put32(out_, cd_offset);
  put16(out_, 0);
  return std::move(out_);
}

}  // namespace narrativeforge
