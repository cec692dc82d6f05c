#include <algorithm>

#include "qrechacha/error.hpp"
#include "qrechacha/randomness_tests.hpp"

namespace qrechacha {

BitSequence::BitSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw Error(Errc::param, "bit sequence must not be empty");
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; }))
    throw Error(Errc::param, "bit sequence holds a value other than 0 or 1");
}

BitSequence BitSequence::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1')
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != ' ' && c != '\n' && c != '\t')
      throw Error(Errc::param, std::string("invalid bit character '") + c + "'");
  }
  return BitSequence(std::move(bits));
}

BitSequence BitSequence::from_packed(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  nbits = std::min(nbits, bytes.size() * 8);
  std::vector<std::uint8_t> bits(nbits);
  for (std::size_t i = 0; i < nbits; ++i)
    bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return BitSequence(std::move(bits));
}

std::vector<std::uint8_t> BitSequence::to_packed() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    out[i / 8] |= static_cast<std::uint8_t>(bits_[i] << (7 - i % 8));
  return out;
}

std::size_t BitSequence::ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

BitSequence BitSequence::complement() const {
  std::vector<std::uint8_t> out(bits_.size());
  std::transform(bits_.begin(), bits_.end(), out.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ^ 1u); });
  return BitSequence(std::move(out));
}

BitSequence BitSequence::reversed() const {
  return BitSequence(std::vector<std::uint8_t>(bits_.rbegin(), bits_.rend()));
}

}  // namespace qrechacha
