#pragma once

// Quantum random number sourcing: the on-disk pool, providers, session
// material derivation and the session material file format.
//
// Pool file layout (all integers little-endian):
//   0..3   "QRNP"
//   4..5   version (1)
//   6..13  total_bytes
//   14..21 cursor_bytes
//   22..   payload (total_bytes bytes)

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qrechacha/cipher.hpp"

namespace qrechacha {

inline constexpr std::array<std::uint8_t, 4> kPoolMagic = {'Q', 'R', 'N', 'P'};
inline constexpr std::uint16_t kPoolVersion = 1;
inline constexpr std::size_t kPoolHeaderBytes = 22;
inline constexpr std::uint16_t kSessionVersion = 1;

struct PoolHeader {
  std::uint16_t version = kPoolVersion;
  std::uint64_t total_bytes = 0;
  std::uint64_t cursor_bytes = 0;

  friend bool operator==(const PoolHeader&, const PoolHeader&) = default;
};

std::vector<std::uint8_t> encode_pool_image(const PoolHeader& header,
                                            std::span<const std::uint8_t> payload);
/// Validates magic, version, cursor <= total and payload length.
PoolHeader parse_pool_header(std::span<const std::uint8_t> image);

/// File-backed pool of raw QRNG bytes with a persisted consumption cursor.
/// Not thread-safe: callers serialize access to take().
class QrnPool {
 public:
  /// Writes a fresh pool (cursor 0). Throws Errc::param on empty input and
  /// Errc::io on write failure.
  static QrnPool create(const std::filesystem::path& path,
                        std::span<const std::uint8_t> bytes);
  static QrnPool open(const std::filesystem::path& path);

  /// Returns the next n unused bytes. The advanced cursor reaches the disk
  /// before the bytes are returned. Throws Errc::pool_exhausted (cursor
  /// unchanged) if fewer than n remain.
  std::vector<std::uint8_t> take(std::size_t n);

  const std::filesystem::path& path() const { return path_; }
  std::uint16_t version() const { return header_.version; }
  std::uint64_t total_bytes() const { return header_.total_bytes; }
  std::uint64_t cursor_bytes() const { return header_.cursor_bytes; }
  std::uint64_t remaining() const { return header_.total_bytes - header_.cursor_bytes; }
  std::span<const std::uint8_t> payload() const { return payload_; }

 private:
  QrnPool(std::filesystem::path path, PoolHeader header,
          std::vector<std::uint8_t> payload);
  void persist_cursor(std::uint64_t cursor);

  std::filesystem::path path_;
  PoolHeader header_;
  std::vector<std::uint8_t> payload_;
};

/// Source of QRN bytes. take(n) returns exactly n bytes or throws.
class QrnProvider {
 public:
  virtual ~QrnProvider() = default;
  virtual std::string name() const = 0;
  /// False for anything that is not a physical QRNG; reports must carry it.
  virtual bool is_quantum() const = 0;
  virtual std::vector<std::uint8_t> take(std::size_t n) = 0;
};

class PoolProvider final : public QrnProvider {
 public:
  explicit PoolProvider(QrnPool& pool) : pool_(pool) {}
  std::string name() const override;
  bool is_quantum() const override { return true; }
  std::vector<std::uint8_t> take(std::size_t n) override { return pool_.take(n); }

 private:
  QrnPool& pool_;
};

/// Seeded mt19937_64 stream. For tests and reproducible experiments only.
class DeterministicProvider final : public QrnProvider {
 public:
  explicit DeterministicProvider(std::uint64_t seed) : seed_(seed), engine_(seed) {}
  std::string name() const override;
  bool is_quantum() const override { return false; }
  std::vector<std::uint8_t> take(std::size_t n) override;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

enum class ResponseDecoding { hex, raw };

struct RemoteConfig {
  /// http:// or https:// URL. A "{bytes}" placeholder is replaced by the
  /// request size; otherwise "bytes=<n>" is appended to the query string.
  std::string endpoint;
  ResponseDecoding decoding = ResponseDecoding::hex;
  int timeout_seconds = 10;
};

/// Reads {"endpoint": ..., "decoding": "hex"|"raw", "timeout_seconds": n}
/// from `config_file` when non-empty, then applies QRECHACHA_QRN_ENDPOINT and
/// QRECHACHA_QRN_DECODING overrides from the environment.
RemoteConfig load_remote_config(const std::filesystem::path& config_file = {});
ResponseDecoding parse_decoding(const std::string& text);

/// Single request/response against a remote QRNG. Throws Errc::network,
/// Errc::short_response or Errc::decode.
std::vector<std::uint8_t> fetch_remote(const RemoteConfig& config, std::size_t nbytes);
std::vector<std::uint8_t> decode_response(const std::string& body,
                                          ResponseDecoding decoding);

class RemoteProvider final : public QrnProvider {
 public:
  explicit RemoteProvider(RemoteConfig config) : config_(std::move(config)) {}
  std::string name() const override { return "remote:" + config_.endpoint; }
  bool is_quantum() const override { return true; }
  std::vector<std::uint8_t> take(std::size_t n) override {
    return fetch_remote(config_, n);
  }

 private:
  RemoteConfig config_;
};

/// Bytes consumed by derive_session: 16 * (1 + rounds / 2).
std::size_t session_budget(int rounds);

/// Consumes session_budget(rounds) bytes in one request: const mask first,
/// then the masks for r = 0, 2, ..., R-2, each as four little-endian words.
QrnSessionMaterial derive_session(QrnProvider& source, int rounds);
QrnSessionMaterial derive_session(QrnPool& pool, int rounds);
QrnSessionMaterial session_from_bytes(std::span<const std::uint8_t> bytes, int rounds);

/// u16 version, u16 rounds, then the masks in derivation order.
std::vector<std::uint8_t> session_serialize(const QrnSessionMaterial& material);
/// Throws Errc::malformed_material on bad version, odd or zero rounds, or a
/// length that does not match the rounds field.
QrnSessionMaterial session_parse(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace qrechacha
