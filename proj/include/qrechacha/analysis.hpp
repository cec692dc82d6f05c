#pragma once

// Empirical diffusion and differential measurements. These are Monte-Carlo
// proxies, not bounds: avalanche flip rates, the injection-difference
// constraint check, and sampled differential probabilities for 2 and 4
// rounds.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qrechacha/cipher.hpp"

namespace qrechacha {

/// True iff (maskA_i ^ maskB_i) != (stateA.x_i ^ stateB.x_i) for every
/// i in 0..3, i.e. no injected word difference equals the difference of the
/// word it is XORed into.
bool check_injection_constraint(const Mask& mask_a, const Mask& mask_b,
                                const StateMatrix& state_a,
                                const StateMatrix& state_b) noexcept;

struct FlipTarget {
  enum class Field { key, nonce, counter };
  Field field = Field::key;
  int bit = 0;  // key 0..255, nonce 0..95, counter 0..31; word i holds bits 32i..32i+31

  /// "key:17", "nonce:0", "counter:31"
  static FlipTarget parse(const std::string& text);
  std::string to_string() const;
};

struct AvalancheReport {
  int rounds = 0;
  std::size_t trials = 0;
  FlipTarget target;
  std::array<double, 512> per_bit{};
  double mean = 0.0;
  /// 3 sqrt(0.25 / trials), the band for a single output bit.
  double half_width = 0.0;
  /// Band for the mean over all 512 output bits.
  double aggregate_half_width = 0.0;
  double max_deviation = 0.0;
  std::size_t bits_outside_band = 0;
};

/// Random key and nonce per trial (counter from params), the target bit
/// flipped, both keystream blocks compared. Requires trials >= 1000.
/// Trials are spread over OpenMP threads; results equal the serial version.
AvalancheReport avalanche_metric(const CipherParams& params, const QrnSessionMaterial& qrn,
                                 FlipTarget target, std::size_t trials,
                                 std::uint64_t seed = 1);
AvalancheReport avalanche_metric_serial(const CipherParams& params,
                                        const QrnSessionMaterial& qrn, FlipTarget target,
                                        std::size_t trials, std::uint64_t seed = 1);

struct DiffSpec {
  StateMatrix input_diff;
  StateMatrix output_diff;
  int rounds = 2;
};

enum class QrnMode {
  /// Both computations share one session material.
  fixed,
  /// Each computation draws its own masks per sample; a mask pair that
  /// violates check_injection_constraint is redrawn.
  resampled,
};

struct DiffEstimate {
  double probability = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
  /// 3 sqrt(p (1 - p) / samples)
  double half_width = 0.0;
  std::size_t rejected_masks = 0;
  QrnMode mode = QrnMode::fixed;
};

/// Random state X(0) for sample `index` of a run seeded with `seed`.
StateMatrix sample_state(std::uint64_t seed, std::size_t index);

/// Fraction of sampled pairs (X, X ^ input_diff) whose difference after
/// spec.rounds rounds equals output_diff. No feedforward. Throws Errc::param
/// for odd rounds, rounds > 4, samples < 10^4 or a zero input difference.
/// `material` is used in fixed mode and must match spec.rounds.
DiffEstimate empirical_diff_probability(const DiffSpec& spec, std::size_t samples,
                                        QrnMode mode, const QrnSessionMaterial& material,
                                        std::uint64_t seed = 1);
DiffEstimate empirical_diff_probability_serial(const DiffSpec& spec, std::size_t samples,
                                               QrnMode mode,
                                               const QrnSessionMaterial& material,
                                               std::uint64_t seed = 1);

QrnMode parse_qrn_mode(const std::string& text);

}  // namespace qrechacha
