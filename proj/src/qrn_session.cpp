#include <string>

#include "endian.hpp"
#include "qrechacha/error.hpp"
#include "qrechacha/qrn.hpp"

namespace qrechacha {

namespace {

Mask read_mask(const std::uint8_t* p) {
  return {detail::load_le32(p), detail::load_le32(p + 4),
          detail::load_le32(p + 8), detail::load_le32(p + 12)};
}

void write_mask(std::uint8_t* p, const Mask& m) {
  for (int i = 0; i < 4; ++i) detail::store_le32(p + 4 * i, m[i]);
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::malformed_material, "malformed session material: " + what);
}

}  // namespace

std::size_t session_budget(int rounds) {
  validate_rounds(rounds);
  return 16 * (1 + static_cast<std::size_t>(rounds) / 2);
}

QrnSessionMaterial session_from_bytes(std::span<const std::uint8_t> bytes, int rounds) {
  if (bytes.size() != session_budget(rounds))
    throw Error(Errc::param, "session derivation needs exactly " +
                                 std::to_string(session_budget(rounds)) + " bytes");
  QrnSessionMaterial m;
  m.const_mask = read_mask(bytes.data());
  for (int i = 0; i < rounds / 2; ++i)
    m.round_masks.push_back(read_mask(bytes.data() + 16 * (1 + i)));
  return m;
}

QrnSessionMaterial derive_session(QrnProvider& source, int rounds) {
  const std::size_t budget = session_budget(rounds);
  const auto bytes = source.take(budget);
  if (bytes.size() != budget)
    throw Error(Errc::short_response, source.name() + " returned " +
                                          std::to_string(bytes.size()) + " of " +
                                          std::to_string(budget) + " bytes");
  return session_from_bytes(bytes, rounds);
}

QrnSessionMaterial derive_session(QrnPool& pool, int rounds) {
  PoolProvider provider(pool);
  return derive_session(provider, rounds);
}

std::vector<std::uint8_t> session_serialize(const QrnSessionMaterial& material) {
  const int rounds = material.rounds();
  validate_rounds(rounds);
  std::vector<std::uint8_t> out(4 + session_budget(rounds));
  detail::store_le16(out.data(), kSessionVersion);
  detail::store_le16(out.data() + 2, static_cast<std::uint16_t>(rounds));
  write_mask(out.data() + 4, material.const_mask);
  for (std::size_t i = 0; i < material.round_masks.size(); ++i)
    write_mask(out.data() + 4 + 16 * (1 + i), material.round_masks[i]);
  return out;
}

QrnSessionMaterial session_parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) malformed("truncated header");
  const auto version = detail::load_le16(bytes.data());
  const auto rounds = detail::load_le16(bytes.data() + 2);
  if (version != kSessionVersion) malformed("unsupported version " + std::to_string(version));
  if (rounds < 2 || rounds % 2 != 0) malformed("invalid round count " + std::to_string(rounds));
  const std::size_t expected = 4 + 16 * (1 + static_cast<std::size_t>(rounds) / 2);
  if (bytes.size() != expected)
    malformed("expected " + std::to_string(expected) + " bytes for " +
              std::to_string(rounds) + " rounds, got " + std::to_string(bytes.size()));
  return session_from_bytes(bytes.subspan(4), rounds);
}

}  // namespace qrechacha
