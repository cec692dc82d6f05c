#include "qrechacha/error.hpp"

namespace qrechacha {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::usage: return "UsageError";
    case Errc::param: return "ParamError";
    case Errc::io: return "IoFailure";
    case Errc::network: return "NetworkFailure";
    case Errc::short_response: return "ShortResponse";
    case Errc::decode: return "DecodeError";
    case Errc::pool_exhausted: return "PoolExhausted";
    case Errc::malformed_material: return "MalformedMaterial";
    case Errc::mask_count_mismatch: return "MaskCountMismatch";
    case Errc::counter_overflow: return "CounterOverflow";
    case Errc::domain: return "DomainError";
    case Errc::sequence_too_short: return "SequenceTooShort";
    case Errc::param_too_large: return "ParamTooLarge";
    case Errc::insufficient_results: return "InsufficientResults";
  }
  return "Error";
}

}  // namespace qrechacha
