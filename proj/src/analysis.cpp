#include "qrechacha/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "qrechacha/error.hpp"

namespace qrechacha {

namespace {

std::mt19937_64 trial_engine(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Word32 next_word(std::mt19937_64& rng) { return static_cast<Word32>(rng() >> 32); }

Mask random_mask(std::mt19937_64& rng) {
  return {next_word(rng), next_word(rng), next_word(rng), next_word(rng)};
}

CipherParams flipped(CipherParams p, const FlipTarget& t) {
  const auto word = static_cast<std::size_t>(t.bit / 32);
  const Word32 bit = Word32{1} << (t.bit % 32);
  switch (t.field) {
    case FlipTarget::Field::key: p.key[word] ^= bit; break;
    case FlipTarget::Field::nonce: p.nonce[word] ^= bit; break;
    case FlipTarget::Field::counter: p.counter ^= bit; break;
  }
  return p;
}

void validate_target(const FlipTarget& t) {
  const int limit = t.field == FlipTarget::Field::key ? 256
                    : t.field == FlipTarget::Field::nonce ? 96 : 32;
  if (t.bit < 0 || t.bit >= limit)
    throw Error(Errc::param, "flip target " + t.to_string() + " out of range");
}

// Adds, per output bit, whether block(trial) and block(trial, flipped) differ.
void avalanche_trial(const CipherParams& base, const QrnSessionMaterial& qrn,
                     const FlipTarget& target, std::uint64_t seed, std::size_t trial,
                     std::array<std::uint64_t, 512>& flips) {
  auto rng = trial_engine(seed, trial);
  CipherParams p = base;
  for (auto& w : p.key) w = next_word(rng);
  for (auto& w : p.nonce) w = next_word(rng);
  const auto a = keystream_block(p, qrn);
  const auto b = keystream_block(flipped(p, target), qrn);
  for (std::size_t byte = 0; byte < kBlockBytes; ++byte) {
    const std::uint8_t diff = a[byte] ^ b[byte];
    for (int bit = 0; bit < 8; ++bit) flips[byte * 8 + bit] += (diff >> bit) & 1u;
  }
}

template <bool Parallel>
AvalancheReport avalanche_impl(const CipherParams& params, const QrnSessionMaterial& qrn,
                               FlipTarget target, std::size_t trials, std::uint64_t seed) {
  validate_rounds(params.rounds);
  validate_target(target);
  if (qrn.rounds() != params.rounds)
    throw Error(Errc::mask_count_mismatch, "session material does not match round count");
  if (trials < 1000) throw Error(Errc::param, "avalanche needs at least 1000 trials");

  std::array<std::uint64_t, 512> flips{};
  const auto n = static_cast<std::int64_t>(trials);
  if constexpr (Parallel) {
#pragma omp parallel
    {
      std::array<std::uint64_t, 512> local{};
#pragma omp for schedule(static)
      for (std::int64_t t = 0; t < n; ++t)
        avalanche_trial(params, qrn, target, seed, static_cast<std::size_t>(t), local);
#pragma omp critical(qrechacha_avalanche_reduce)
      for (std::size_t i = 0; i < flips.size(); ++i) flips[i] += local[i];
    }
  } else {
    for (std::int64_t t = 0; t < n; ++t)
      avalanche_trial(params, qrn, target, seed, static_cast<std::size_t>(t), flips);
  }

  AvalancheReport r;
  r.rounds = params.rounds;
  r.trials = trials;
  r.target = target;
  r.half_width = 3.0 * std::sqrt(0.25 / static_cast<double>(trials));
  r.aggregate_half_width = 3.0 * std::sqrt(0.25 / (static_cast<double>(trials) * 512.0));
  double sum = 0.0;
  for (std::size_t i = 0; i < flips.size(); ++i) {
    r.per_bit[i] = static_cast<double>(flips[i]) / static_cast<double>(trials);
    sum += r.per_bit[i];
    const double dev = std::fabs(r.per_bit[i] - 0.5);
    r.max_deviation = std::max(r.max_deviation, dev);
    r.bits_outside_band += dev > r.half_width;
  }
  r.mean = sum / 512.0;
  return r;
}

struct PairOutcome {
  bool hit = false;
  std::size_t rejected = 0;
};

PairOutcome diff_sample(const DiffSpec& spec, QrnMode mode, const QrnSessionMaterial& material,
                        std::uint64_t seed, std::size_t index) {
  StateMatrix a = sample_state(seed, index);
  StateMatrix b;
  for (int i = 0; i < 16; ++i) b[i] = a[i] ^ spec.input_diff[i];

  PairOutcome out;
  if (mode == QrnMode::fixed) {
    a = permute(a, material, spec.rounds);
    b = permute(b, material, spec.rounds);
  } else {
    // Mask draws use a stream disjoint from the state draw.
    auto rng = trial_engine(~seed, index);
    for (int r = 0; r < spec.rounds; ++r) {
      if (r % 2 == 0) {
        const Mask qa = random_mask(rng);
        Mask qb = random_mask(rng);
        while (!check_injection_constraint(qa, qb, a, b)) {
          ++out.rejected;
          qb = random_mask(rng);
        }
        a = column_round(inject_masks(a, qa));
        b = column_round(inject_masks(b, qb));
      } else {
        a = diagonal_round(a);
        b = diagonal_round(b);
      }
    }
  }
  out.hit = true;
  for (int i = 0; i < 16; ++i)
    if ((a[i] ^ b[i]) != spec.output_diff[i]) out.hit = false;
  return out;
}

void validate_diff_spec(const DiffSpec& spec, std::size_t samples, QrnMode mode,
                        const QrnSessionMaterial& material) {
  validate_rounds(spec.rounds);
  if (spec.rounds > 4)
    throw Error(Errc::param, "differential estimation is limited to 2 or 4 rounds");
  if (samples < 10000) throw Error(Errc::param, "differential estimation needs >= 10^4 samples");
  if (spec.input_diff == StateMatrix{}) throw Error(Errc::param, "input difference must be nonzero");
  if (mode == QrnMode::fixed && material.rounds() != spec.rounds)
    throw Error(Errc::mask_count_mismatch, "session material does not match round count");
}

template <bool Parallel>
DiffEstimate diff_impl(const DiffSpec& spec, std::size_t samples, QrnMode mode,
                       const QrnSessionMaterial& material, std::uint64_t seed) {
  validate_diff_spec(spec, samples, mode, material);
  std::size_t hits = 0, rejected = 0;
  const auto n = static_cast<std::int64_t>(samples);
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : hits, rejected)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto o = diff_sample(spec, mode, material, seed, static_cast<std::size_t>(i));
      hits += o.hit;
      rejected += o.rejected;
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      const auto o = diff_sample(spec, mode, material, seed, static_cast<std::size_t>(i));
      hits += o.hit;
      rejected += o.rejected;
    }
  }
  DiffEstimate e;
  e.hits = hits;
  e.samples = samples;
  e.rejected_masks = rejected;
  e.mode = mode;
  e.probability = static_cast<double>(hits) / static_cast<double>(samples);
  e.half_width = 3.0 * std::sqrt(e.probability * (1.0 - e.probability) / static_cast<double>(samples));
  return e;
}

}  // namespace

bool check_injection_constraint(const Mask& mask_a, const Mask& mask_b,
                                const StateMatrix& state_a,
                                const StateMatrix& state_b) noexcept {
  for (int i = 0; i < 4; ++i)
    if ((mask_a[i] ^ mask_b[i]) == (state_a[i] ^ state_b[i])) return false;
  return true;
}

FlipTarget FlipTarget::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(Errc::usage, "flip target must look like key:N, nonce:N or counter:N");
  const std::string field = text.substr(0, colon);
  FlipTarget t;
  if (field == "key") t.field = Field::key;
  else if (field == "nonce") t.field = Field::nonce;
  else if (field == "counter") t.field = Field::counter;
  else throw Error(Errc::usage, "unknown flip target field '" + field + "'");
  try {
    t.bit = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(Errc::usage, "bad flip target bit in '" + text + "'");
  }
  validate_target(t);
  return t;
}

std::string FlipTarget::to_string() const {
  const char* name = field == Field::key ? "key" : field == Field::nonce ? "nonce" : "counter";
  return std::string(name) + ":" + std::to_string(bit);
}

AvalancheReport avalanche_metric(const CipherParams& params, const QrnSessionMaterial& qrn,
                                 FlipTarget target, std::size_t trials, std::uint64_t seed) {
  return avalanche_impl<true>(params, qrn, target, trials, seed);
}

AvalancheReport avalanche_metric_serial(const CipherParams& params,
                                        const QrnSessionMaterial& qrn, FlipTarget target,
                                        std::size_t trials, std::uint64_t seed) {
  return avalanche_impl<false>(params, qrn, target, trials, seed);
}

StateMatrix sample_state(std::uint64_t seed, std::size_t index) {
  auto rng = trial_engine(seed, index);
  StateMatrix s;
  for (auto& w : s.words) w = next_word(rng);
  return s;
}

DiffEstimate empirical_diff_probability(const DiffSpec& spec, std::size_t samples,
                                        QrnMode mode, const QrnSessionMaterial& material,
                                        std::uint64_t seed) {
  return diff_impl<true>(spec, samples, mode, material, seed);
}

DiffEstimate empirical_diff_probability_serial(const DiffSpec& spec, std::size_t samples,
                                               QrnMode mode,
                                               const QrnSessionMaterial& material,
                                               std::uint64_t seed) {
  return diff_impl<false>(spec, samples, mode, material, seed);
}

QrnMode parse_qrn_mode(const std::string& text) {
  if (text == "fixed") return QrnMode::fixed;
  if (text == "resampled") return QrnMode::resampled;
  throw Error(Errc::usage, "unknown QRN mode '" + text + "' (fixed|resampled)");
}

}  // namespace qrechacha
