#include "qrechacha/cipher.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "endian.hpp"
#include "qrechacha/error.hpp"

namespace qrechacha {

namespace {

constexpr std::array<std::array<int, 4>, 4> kColumns = {{
    {0, 4, 8, 12}, {1, 5, 9, 13}, {2, 6, 10, 14}, {3, 7, 11, 15}}};
constexpr std::array<std::array<int, 4>, 4> kDiagonals = {{
    {0, 5, 10, 15}, {1, 6, 11, 12}, {2, 7, 8, 13}, {3, 4, 9, 14}}};

StateMatrix apply_quarters(StateMatrix s,
                           const std::array<std::array<int, 4>, 4>& lanes) {
  for (const auto& lane : lanes) {
    Quad q = quarter_round({s[lane[0]], s[lane[1]], s[lane[2]], s[lane[3]]});
    for (int i = 0; i < 4; ++i) s[lane[i]] = q[i];
  }
  return s;
}

}  // namespace

QrnSessionMaterial QrnSessionMaterial::zero(int rounds) {
  validate_rounds(rounds);
  QrnSessionMaterial m;
  m.round_masks.assign(static_cast<std::size_t>(rounds / 2), Mask{});
  return m;
}

bool QrnSessionMaterial::is_zero() const {
  auto zero = [](const Mask& m) {
    return std::all_of(m.begin(), m.end(), [](Word32 w) { return w == 0; });
  };
  return zero(const_mask) && std::all_of(round_masks.begin(), round_masks.end(), zero);
}

void validate_rounds(int rounds) {
  if (rounds < 2 || rounds % 2 != 0)
    throw Error(Errc::param, "round count must be even and >= 2, got " +
                                 std::to_string(rounds));
}

Quad quarter_round(Quad q) noexcept {
  auto& [a, b, c, d] = q;
  a += b; d ^= a; d = std::rotl(d, 16);
  c += d; b ^= c; b = std::rotl(b, 12);
  a += b; d ^= a; d = std::rotl(d, 8);
  c += d; b ^= c; b = std::rotl(b, 7);
  return q;
}

Quad invert_quarter_round(Quad q) noexcept {
  auto& [a, b, c, d] = q;
  b = std::rotr(b, 7); b ^= c; c -= d;
  d = std::rotr(d, 8); d ^= a; a -= b;
  b = std::rotr(b, 12); b ^= c; c -= d;
  d = std::rotr(d, 16); d ^= a; a -= b;
  return q;
}

StateMatrix column_round(StateMatrix s) noexcept {
  return apply_quarters(s, kColumns);
}

StateMatrix diagonal_round(StateMatrix s) noexcept {
  return apply_quarters(s, kDiagonals);
}

StateMatrix inject_masks(StateMatrix s, const Mask& mask) noexcept {
  for (int i = 0; i < 4; ++i) s[i] ^= mask[i];
  return s;
}

StateMatrix init_state(const CipherParams& params, const Mask& const_mask) {
  StateMatrix s;
  for (int i = 0; i < 4; ++i) s[i] = kSigma[i] ^ const_mask[i];
  for (int i = 0; i < 8; ++i) s[4 + i] = params.key[i];
  s[12] = params.counter;
  for (int i = 0; i < 3; ++i) s[13 + i] = params.nonce[i];
  return s;
}

StateMatrix permute(const StateMatrix& x0, const QrnSessionMaterial& qrn,
                    int rounds) {
  validate_rounds(rounds);
  if (qrn.round_masks.size() != static_cast<std::size_t>(rounds / 2))
    throw Error(Errc::mask_count_mismatch,
                "session material carries " +
                    std::to_string(qrn.round_masks.size()) +
                    " round masks, " + std::to_string(rounds / 2) +
                    " required for " + std::to_string(rounds) + " rounds");
  StateMatrix x = x0;
  for (int r = 0; r < rounds; ++r) {
    if (r % 2 == 0) {
      x = column_round(inject_masks(x, qrn.round_masks[r / 2]));
    } else {
      x = diagonal_round(x);
    }
  }
  return x;
}

StateMatrix add_words(const StateMatrix& a, const StateMatrix& b) noexcept {
  StateMatrix out;
  for (int i = 0; i < 16; ++i) out[i] = a[i] + b[i];
  return out;
}

StateMatrix sub_words(const StateMatrix& a, const StateMatrix& b) noexcept {
  StateMatrix out;
  for (int i = 0; i < 16; ++i) out[i] = a[i] - b[i];
  return out;
}

KeystreamBlock serialize(const StateMatrix& z) noexcept {
  KeystreamBlock out;
  for (int i = 0; i < 16; ++i) detail::store_le32(out.data() + 4 * i, z[i]);
  return out;
}

StateMatrix deserialize(std::span<const std::uint8_t, kBlockBytes> bytes) noexcept {
  StateMatrix s;
  for (int i = 0; i < 16; ++i) s[i] = detail::load_le32(bytes.data() + 4 * i);
  return s;
}

KeystreamBlock keystream_block(const CipherParams& params,
                               const QrnSessionMaterial& qrn) {
  const StateMatrix x0 = init_state(params, qrn.const_mask);
  return serialize(add_words(x0, permute(x0, qrn, params.rounds)));
}

Key key_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kKeyBytes)
    throw Error(Errc::param, "key must be exactly 32 bytes, got " +
                                 std::to_string(bytes.size()));
  Key k;
  for (std::size_t i = 0; i < k.size(); ++i)
    k[i] = detail::load_le32(bytes.data() + 4 * i);
  return k;
}

Nonce nonce_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kNonceBytes)
    throw Error(Errc::param, "nonce must be exactly 12 bytes, got " +
                                 std::to_string(bytes.size()));
  Nonce n;
  for (std::size_t i = 0; i < n.size(); ++i)
    n[i] = detail::load_le32(bytes.data() + 4 * i);
  return n;
}

std::array<std::uint8_t, kKeyBytes> key_to_bytes(const Key& key) noexcept {
  std::array<std::uint8_t, kKeyBytes> out;
  for (std::size_t i = 0; i < key.size(); ++i)
    detail::store_le32(out.data() + 4 * i, key[i]);
  return out;
}

std::array<std::uint8_t, kNonceBytes> nonce_to_bytes(const Nonce& nonce) noexcept {
  std::array<std::uint8_t, kNonceBytes> out;
  for (std::size_t i = 0; i < nonce.size(); ++i)
    detail::store_le32(out.data() + 4 * i, nonce[i]);
  return out;
}

}  // namespace qrechacha
