#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include "endian.hpp"
#include "qrechacha/error.hpp"
#include "qrechacha/qrn.hpp"

namespace qrechacha {

namespace {

constexpr std::size_t kCursorOffset = 14;

[[noreturn]] void io_error(const std::string& what,
                           const std::filesystem::path& path) {
  throw Error(Errc::io, what + " '" + path.string() + "': " + std::strerror(errno));
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open", path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) io_error("cannot read", path);
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error("cannot create", path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) io_error("cannot write", path);
}

std::vector<std::uint8_t> encode_pool_image(const PoolHeader& header,
                                            std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> image(kPoolHeaderBytes + payload.size());
  std::copy(kPoolMagic.begin(), kPoolMagic.end(), image.begin());
  detail::store_le16(image.data() + 4, header.version);
  detail::store_le64(image.data() + 6, header.total_bytes);
  detail::store_le64(image.data() + kCursorOffset, header.cursor_bytes);
  std::copy(payload.begin(), payload.end(), image.begin() + kPoolHeaderBytes);
  return image;
}

PoolHeader parse_pool_header(std::span<const std::uint8_t> image) {
  if (image.size() < kPoolHeaderBytes)
    throw Error(Errc::io, "pool image shorter than its 22-byte header");
  if (!std::equal(kPoolMagic.begin(), kPoolMagic.end(), image.begin()))
    throw Error(Errc::io, "pool image does not start with QRNP");
  PoolHeader h;
  h.version = detail::load_le16(image.data() + 4);
  h.total_bytes = detail::load_le64(image.data() + 6);
  h.cursor_bytes = detail::load_le64(image.data() + kCursorOffset);
  if (h.version != kPoolVersion)
    throw Error(Errc::io, "unsupported pool version " + std::to_string(h.version));
  if (h.cursor_bytes > h.total_bytes)
    throw Error(Errc::io, "pool cursor beyond payload");
  if (image.size() - kPoolHeaderBytes != h.total_bytes)
    throw Error(Errc::io, "pool payload length does not match header");
  return h;
}

QrnPool::QrnPool(std::filesystem::path path, PoolHeader header,
                 std::vector<std::uint8_t> payload)
    : path_(std::move(path)), header_(header), payload_(std::move(payload)) {}

QrnPool QrnPool::create(const std::filesystem::path& path,
                        std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(Errc::param, "cannot create an empty QRN pool");
  PoolHeader header{kPoolVersion, bytes.size(), 0};
  write_file(path, encode_pool_image(header, bytes));
  return QrnPool(path, header, {bytes.begin(), bytes.end()});
}

QrnPool QrnPool::open(const std::filesystem::path& path) {
  auto image = read_file(path);
  PoolHeader header = parse_pool_header(image);
  image.erase(image.begin(), image.begin() + kPoolHeaderBytes);
  return QrnPool(path, header, std::move(image));
}

void QrnPool::persist_cursor(std::uint64_t cursor) {
  std::uint8_t buf[8];
  detail::store_le64(buf, cursor);
  const int fd = ::open(path_.c_str(), O_WRONLY);
  if (fd < 0) io_error("cannot open pool for cursor update", path_);
  const ssize_t n = ::pwrite(fd, buf, sizeof buf, kCursorOffset);
  const bool ok = n == static_cast<ssize_t>(sizeof buf) && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) io_error("cannot persist pool cursor", path_);
}

std::vector<std::uint8_t> QrnPool::take(std::size_t n) {
  if (n > remaining())
    throw Error(Errc::pool_exhausted,
                "QRN pool '" + path_.string() + "' has " +
                    std::to_string(remaining()) + " bytes left, " +
                    std::to_string(n) + " requested; refill from a QRNG");
  if (n == 0) return {};
  const std::uint64_t start = header_.cursor_bytes;
  persist_cursor(start + n);
  header_.cursor_bytes = start + n;
  return {payload_.begin() + static_cast<std::ptrdiff_t>(start),
          payload_.begin() + static_cast<std::ptrdiff_t>(start + n)};
}

std::string PoolProvider::name() const { return "pool:" + pool_.path().string(); }

std::string DeterministicProvider::name() const {
  return "deterministic:" + std::to_string(seed_);
}

std::vector<std::uint8_t> DeterministicProvider::take(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t v = engine_();
    for (int b = 0; b < 8 && i < n; ++b, ++i, v >>= 8)
      out[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

}  // namespace qrechacha
