#include <algorithm>
#include <cstdint>
#include <string>

#include "block_kernel.hpp"
#include "qrechacha/cipher.hpp"
#include "qrechacha/error.hpp"

namespace qrechacha {

namespace {

void check_material(const CipherParams& params, const QrnSessionMaterial& qrn) {
  validate_rounds(params.rounds);
  if (qrn.round_masks.size() != static_cast<std::size_t>(params.rounds / 2))
    throw Error(Errc::mask_count_mismatch,
                "session material is for " + std::to_string(qrn.rounds()) +
                    " rounds, cipher runs " + std::to_string(params.rounds));
}

template <bool Inject>
void run_serial(const CipherParams& params, const Mask& const_mask,
                const Mask* round_masks, std::span<std::uint8_t> data) {
  const std::uint64_t blocks = blocks_for(params, data.size());
  const auto input = init_state(params, const_mask).words;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::size_t off = static_cast<std::size_t>(b) * kBlockBytes;
    const std::size_t len = std::min(kBlockBytes, data.size() - off);
    detail::xor_block<Inject>(input, params.counter + static_cast<Word32>(b),
                              round_masks, params.rounds, data.data() + off,
                              data.data() + off, len);
  }
}

template <bool Inject>
void run_parallel(const CipherParams& params, const Mask& const_mask,
                  const Mask* round_masks, std::span<std::uint8_t> data) {
  const auto blocks = static_cast<std::int64_t>(blocks_for(params, data.size()));
  const auto input = init_state(params, const_mask).words;
  std::uint8_t* base = data.data();
  const std::size_t size = data.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t off = static_cast<std::size_t>(b) * kBlockBytes;
    const std::size_t len = std::min(kBlockBytes, size - off);
    detail::xor_block<Inject>(input, params.counter + static_cast<Word32>(b),
                              round_masks, params.rounds, base + off,
                              base + off, len);
  }
}

}  // namespace

std::uint64_t blocks_for(const CipherParams& params, std::size_t bytes) {
  const std::uint64_t blocks = (static_cast<std::uint64_t>(bytes) + kBlockBytes - 1) / kBlockBytes;
  if (blocks == 0) return 0;
  const std::uint64_t last = static_cast<std::uint64_t>(params.counter) + blocks - 1;
  if (last > 0xffffffffull)
    throw Error(Errc::counter_overflow,
                "message of " + std::to_string(bytes) +
                    " bytes would run the block counter past 2^32-1 (start " +
                    std::to_string(params.counter) + ")");
  return blocks;
}

void xor_stream_inplace(const CipherParams& params,
                        const QrnSessionMaterial& qrn,
                        std::span<std::uint8_t> data) {
  check_material(params, qrn);
  run_serial<true>(params, qrn.const_mask, qrn.round_masks.data(), data);
}

void xor_stream_parallel_inplace(const CipherParams& params,
                                 const QrnSessionMaterial& qrn,
                                 std::span<std::uint8_t> data) {
  check_material(params, qrn);
  run_parallel<true>(params, qrn.const_mask, qrn.round_masks.data(), data);
}

std::vector<std::uint8_t> xor_stream(const CipherParams& params,
                                     const QrnSessionMaterial& qrn,
                                     std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  xor_stream_inplace(params, qrn, out);
  return out;
}

std::vector<std::uint8_t> xor_stream_parallel(const CipherParams& params,
                                              const QrnSessionMaterial& qrn,
                                              std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  xor_stream_parallel_inplace(params, qrn, out);
  return out;
}

void chacha_xor_stream_inplace(const CipherParams& params,
                               std::span<std::uint8_t> data) {
  validate_rounds(params.rounds);
  run_serial<false>(params, Mask{}, nullptr, data);
}

void chacha_xor_stream_parallel_inplace(const CipherParams& params,
                                        std::span<std::uint8_t> data) {
  validate_rounds(params.rounds);
  run_parallel<false>(params, Mask{}, nullptr, data);
}

}  // namespace qrechacha

namespace qrechacha {

std::vector<std::uint8_t> chacha_xor_stream(const CipherParams& params,
                                            std::span<const std::uint8_t> data,
                                            bool parallel) {
  std::vector<std::uint8_t> out(data.begin(), data.end());
  if (parallel)
    chacha_xor_stream_parallel_inplace(params, out);
  else
    chacha_xor_stream_inplace(params, out);
  return out;
}

}  // namespace qrechacha
