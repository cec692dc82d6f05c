#pragma once

// ChaCha and QRE-ChaCha block functions.
//
// QRE-ChaCha differs from ChaCha in two places:
//   * the four constant words of the initial state are XORed with a 128-bit
//     quantum random mask before the first round, and
//   * before every column round (rounds 1, 3, 5, ... counted from one) the
//     first row of the state is XORed with a fresh 128-bit mask.
// Both masks come from a QrnSessionMaterial that the encrypting and decrypting
// sides share. With all masks zero the cipher is bit-for-bit ChaCha.
//
// The feedforward adds the masked initial state, so Z = X(0) + X(R) where X(0)
// already carries the constant mask.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qrechacha {

using Word32 = std::uint32_t;
using Quad = std::array<Word32, 4>;
using Mask = std::array<Word32, 4>;
using Key = std::array<Word32, 8>;
using Nonce = std::array<Word32, 3>;

/// "expand 32-byte k"
inline constexpr Quad kSigma = {0x61707865u, 0x3320646eu, 0x79622d32u,
                                0x6b206574u};

inline constexpr std::size_t kBlockBytes = 64;
inline constexpr std::size_t kKeyBytes = 32;
inline constexpr std::size_t kNonceBytes = 12;

inline constexpr int kChaCha8 = 8;
inline constexpr int kChaCha12 = 12;
inline constexpr int kChaCha20 = 20;

/// 4x4 matrix of 32-bit words, row-major: word i sits at row i/4, column i%4.
struct StateMatrix {
  std::array<Word32, 16> words{};

  Word32& operator[](std::size_t i) { return words[i]; }
  const Word32& operator[](std::size_t i) const { return words[i]; }

  friend bool operator==(const StateMatrix&, const StateMatrix&) = default;
};

/// Key, nonce, block counter and round count; one keystream position.
struct CipherParams {
  Key key{};
  Nonce nonce{};
  Word32 counter = 0;
  int rounds = kChaCha20;

  friend bool operator==(const CipherParams&, const CipherParams&) = default;
};

/// Constant mask plus one mask per column round. Secret, key-equivalent data.
struct QrnSessionMaterial {
  Mask const_mask{};
  std::vector<Mask> round_masks;

  /// All-zero material; the cipher then reduces to plain ChaCha.
  static QrnSessionMaterial zero(int rounds);

  int rounds() const { return static_cast<int>(2 * round_masks.size()); }
  bool is_zero() const;

  friend bool operator==(const QrnSessionMaterial&,
                         const QrnSessionMaterial&) = default;
};

using KeystreamBlock = std::array<std::uint8_t, kBlockBytes>;

/// Throws Errc::param unless rounds is even and at least 2.
void validate_rounds(int rounds);

Quad quarter_round(Quad q) noexcept;
Quad invert_quarter_round(Quad q) noexcept;

/// Quarter-rounds over the four columns (x0,x4,x8,x12) ... (x3,x7,x11,x15).
StateMatrix column_round(StateMatrix s) noexcept;
/// Quarter-rounds over the diagonals (x0,x5,x10,x15) ... (x3,x4,x9,x14).
StateMatrix diagonal_round(StateMatrix s) noexcept;
StateMatrix inject_masks(StateMatrix s, const Mask& mask) noexcept;

StateMatrix init_state(const CipherParams& params, const Mask& const_mask);

/// Runs the round schedule over x0 and returns X(R): for r = 0..R-1, an even
/// r injects round_masks[r/2] then applies a column round, an odd r applies a
/// diagonal round. The material must carry exactly rounds/2 masks.
StateMatrix permute(const StateMatrix& x0, const QrnSessionMaterial& qrn,
                    int rounds);

/// Wordwise addition mod 2^32.
StateMatrix add_words(const StateMatrix& a, const StateMatrix& b) noexcept;
/// Wordwise subtraction mod 2^32.
StateMatrix sub_words(const StateMatrix& a, const StateMatrix& b) noexcept;

KeystreamBlock serialize(const StateMatrix& z) noexcept;
StateMatrix deserialize(std::span<const std::uint8_t, kBlockBytes> bytes) noexcept;

/// Z = X(0) + X(R), serialized little-endian. Throws Errc::mask_count_mismatch
/// when the material does not match params.rounds.
KeystreamBlock keystream_block(const CipherParams& params,
                               const QrnSessionMaterial& qrn);

/// Encrypts or decrypts `data` in place, block t0 first. Serial reference.
void xor_stream_inplace(const CipherParams& params,
                        const QrnSessionMaterial& qrn,
                        std::span<std::uint8_t> data);
/// Same result as xor_stream_inplace; blocks are distributed over OpenMP threads.
void xor_stream_parallel_inplace(const CipherParams& params,
                                 const QrnSessionMaterial& qrn,
                                 std::span<std::uint8_t> data);
std::vector<std::uint8_t> xor_stream(const CipherParams& params,
                                     const QrnSessionMaterial& qrn,
                                     std::span<const std::uint8_t> data);
std::vector<std::uint8_t> xor_stream_parallel(const CipherParams& params,
                                              const QrnSessionMaterial& qrn,
                                              std::span<const std::uint8_t> data);

/// Plain ChaCha without any injection logic in the round loop. Throughput
/// baseline for the benchmark; output equals QRE-ChaCha with zero material.
void chacha_xor_stream_inplace(const CipherParams& params,
                               std::span<std::uint8_t> data);
void chacha_xor_stream_parallel_inplace(const CipherParams& params,
                                        std::span<std::uint8_t> data);
std::vector<std::uint8_t> chacha_xor_stream(const CipherParams& params,
                                            std::span<const std::uint8_t> data,
                                            bool parallel = false);

/// Number of 64-byte blocks for `bytes`; throws Errc::counter_overflow when
/// the last block would need a counter past 2^32 - 1.
std::uint64_t blocks_for(const CipherParams& params, std::size_t bytes);

Key key_from_bytes(std::span<const std::uint8_t> bytes);
Nonce nonce_from_bytes(std::span<const std::uint8_t> bytes);
std::array<std::uint8_t, kKeyBytes> key_to_bytes(const Key& key) noexcept;
std::array<std::uint8_t, kNonceBytes> nonce_to_bytes(const Nonce& nonce) noexcept;

}  // namespace qrechacha
