#pragma once

// Register-resident block function shared by the serial and OpenMP stream
// kernels. The StateMatrix operations in cipher.cpp are the readable
// reference; this path must produce identical blocks.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>

#include "endian.hpp"
#include "qrechacha/cipher.hpp"

namespace qrechacha::detail {

#define QRE_QR(a, b, c, d)                   \
  a += b; d ^= a; d = std::rotl(d, 16);      \
  c += d; b ^= c; b = std::rotl(b, 12);      \
  a += b; d ^= a; d = std::rotl(d, 8);       \
  c += d; b ^= c; b = std::rotl(b, 7);

/// Computes the block at `counter` and XORs it into 64 bytes at `out`
/// (`in` may alias `out`). `len` < 64 only for the trailing block.
template <bool Inject>
inline void xor_block(const std::array<Word32, 16>& input, Word32 counter,
                      const Mask* round_masks, int rounds,
                      const std::uint8_t* in, std::uint8_t* out,
                      std::size_t len) noexcept {
  Word32 x0 = input[0], x1 = input[1], x2 = input[2], x3 = input[3];
  Word32 x4 = input[4], x5 = input[5], x6 = input[6], x7 = input[7];
  Word32 x8 = input[8], x9 = input[9], x10 = input[10], x11 = input[11];
  Word32 x12 = counter, x13 = input[13], x14 = input[14], x15 = input[15];

  const Mask* mask = round_masks;
  for (int r = 0; r < rounds; r += 2) {
    if constexpr (Inject) {
      x0 ^= (*mask)[0]; x1 ^= (*mask)[1]; x2 ^= (*mask)[2]; x3 ^= (*mask)[3];
      ++mask;
    }
    QRE_QR(x0, x4, x8, x12)
    QRE_QR(x1, x5, x9, x13)
    QRE_QR(x2, x6, x10, x14)
    QRE_QR(x3, x7, x11, x15)
    QRE_QR(x0, x5, x10, x15)
    QRE_QR(x1, x6, x11, x12)
    QRE_QR(x2, x7, x8, x13)
    QRE_QR(x3, x4, x9, x14)
  }

  std::array<Word32, 16> z = {
      x0 + input[0],   x1 + input[1],   x2 + input[2],   x3 + input[3],
      x4 + input[4],   x5 + input[5],   x6 + input[6],   x7 + input[7],
      x8 + input[8],   x9 + input[9],   x10 + input[10], x11 + input[11],
      x12 + counter,   x13 + input[13], x14 + input[14], x15 + input[15]};

  if (len == kBlockBytes) {
    for (std::size_t i = 0; i < 16; ++i)
      store_le32(out + 4 * i, load_le32(in + 4 * i) ^ z[i]);
    return;
  }
  std::uint8_t ks[kBlockBytes];
  for (std::size_t i = 0; i < 16; ++i) store_le32(ks + 4 * i, z[i]);
  for (std::size_t i = 0; i < len; ++i) out[i] = in[i] ^ ks[i];
}

#undef QRE_QR

}  // namespace qrechacha::detail
