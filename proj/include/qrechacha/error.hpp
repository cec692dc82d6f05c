#pragma once

#include <stdexcept>
#include <string>

namespace qrechacha {

/// Error categories surfaced by the library. The CLI maps each one onto a
/// process exit status.
enum class Errc {
  usage,
  param,
  io,
  network,
  short_response,
  decode,
  pool_exhausted,
  malformed_material,
  mask_count_mismatch,
  counter_overflow,
  domain,
  sequence_too_short,
  param_too_large,
  insufficient_results,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qrechacha
