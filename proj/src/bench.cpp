#include "qrechacha/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qrechacha/cipher.hpp"
#include "qrechacha/error.hpp"
#include "qrechacha/qrn.hpp"

namespace qrechacha {

namespace {

using Clock = std::chrono::steady_clock;
static_assert(Clock::is_steady);

constexpr double kBytesPerMb = 1e6;

CipherParams random_params(std::mt19937_64& rng, int rounds) {
  CipherParams p;
  for (auto& w : p.key) w = static_cast<Word32>(rng());
  for (auto& w : p.nonce) w = static_cast<Word32>(rng());
  p.rounds = rounds;
  return p;
}

std::string size_label(std::size_t bytes) {
  std::ostringstream os;
  const double mb = static_cast<double>(bytes) / kBytesPerMb;
  if (std::fabs(mb - std::round(mb)) < 1e-9)
    os << static_cast<long long>(std::llround(mb)) << " MB";
  else
    os << bytes << " B";
  return os.str();
}

}  // namespace

std::string bench_label(BenchCipher cipher, int rounds) {
  return std::string(cipher == BenchCipher::qre_chacha ? "QRE-ChaCha" : "ChaCha") +
         std::to_string(rounds);
}

std::vector<std::size_t> default_bench_sizes() {
  return {10'000'000, 20'000'000, 30'000'000, 40'000'000, 50'000'000};
}

BenchResult bench_cipher(BenchCipher cipher, int rounds, std::size_t payload_bytes,
                         const BenchOptions& options) {
  validate_rounds(rounds);
  if (options.repetitions < 5) throw Error(Errc::param, "benchmark needs at least 5 repetitions");
  if (payload_bytes == 0) throw Error(Errc::param, "benchmark payload must be non-empty");

  std::mt19937_64 rng(options.seed);
  std::vector<std::uint8_t> payload(payload_bytes);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng());

  // QRN material is pre-derived, as if read from a pre-stored pool.
  DeterministicProvider qrn_source(options.seed ^ 0x5152u);
  const QrnSessionMaterial material = derive_session(qrn_source, rounds);

  auto run_once = [&](const CipherParams& params) {
    const auto start = Clock::now();
    std::vector<std::uint8_t> out;
    if (cipher == BenchCipher::qre_chacha)
      out = options.parallel ? xor_stream_parallel(params, material, payload)
                             : xor_stream(params, material, payload);
    else
      out = chacha_xor_stream(params, payload, options.parallel);
    const auto stop = Clock::now();
    if (out.size() != payload.size()) throw Error(Errc::param, "benchmark output size mismatch");
    return std::chrono::duration<double>(stop - start).count();
  };

  BenchResult r;
  r.cipher = cipher;
  r.label = bench_label(cipher, rounds);
  r.rounds = rounds;
  r.payload_bytes = payload_bytes;
  r.repetitions = options.repetitions;
  r.parallel = options.parallel;
  r.clock_resolution_ns = 1e9 * static_cast<double>(Clock::period::num) /
                          static_cast<double>(Clock::period::den);

  run_once(random_params(rng, rounds));  // warm-up
  for (int rep = 0; rep < options.repetitions; ++rep)
    r.seconds.push_back(run_once(random_params(rng, rounds)));

  r.mean_seconds = std::accumulate(r.seconds.begin(), r.seconds.end(), 0.0) /
                   static_cast<double>(r.seconds.size());
  r.mbps = static_cast<double>(payload_bytes) / r.mean_seconds / kBytesPerMb;
  r.ns_per_byte = r.mean_seconds * 1e9 / static_cast<double>(payload_bytes);
  return r;
}

ComparisonTable compare_report(std::span<const BenchResult> results) {
  if (results.size() < 2)
    throw Error(Errc::insufficient_results, "comparison needs at least two benchmark results");

  ComparisonTable t;
  auto index_of = [](auto& v, const auto& x) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == x) return i;
    v.push_back(x);
    return v.size() - 1;
  };
  for (const auto& r : results) {
    index_of(t.labels, r.label);
    index_of(t.sizes, r.payload_bytes);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  t.mean_seconds.assign(t.labels.size(), std::vector<double>(t.sizes.size(), nan));
  for (const auto& r : results)
    t.mean_seconds[index_of(t.labels, r.label)][index_of(t.sizes, r.payload_bytes)] =
        r.mean_seconds;

  t.ratios.assign(t.labels.size(), std::vector<double>(t.labels.size(), nan));
  for (std::size_t i = 0; i < t.labels.size(); ++i) {
    for (std::size_t j = 0; j < t.labels.size(); ++j) {
      double num = 0.0, den = 0.0;
      for (std::size_t s = 0; s < t.sizes.size(); ++s) {
        if (std::isnan(t.mean_seconds[i][s]) || std::isnan(t.mean_seconds[j][s])) continue;
        num += t.mean_seconds[i][s];
        den += t.mean_seconds[j][s];
      }
      if (den > 0.0) t.ratios[i][j] = num / den;
    }
  }
  return t;
}

std::string ComparisonTable::text() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "File Size";
  for (const auto& l : labels) os << std::right << std::setw(16) << l;
  os << "\n";
  os << std::fixed << std::setprecision(7);
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    os << std::left << std::setw(12) << size_label(sizes[s]);
    for (std::size_t l = 0; l < labels.size(); ++l) {
      os << std::right << std::setw(16);
      if (std::isnan(mean_seconds[l][s]))
        os << "-";
      else
        os << mean_seconds[l][s];
    }
    os << "\n";
  }
  return os.str();
}

std::string ComparisonTable::csv() const {
  std::ostringstream os;
  os << "bytes";
  for (const auto& l : labels) os << "," << l;
  os << "\n" << std::setprecision(9);
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    os << sizes[s];
    for (std::size_t l = 0; l < labels.size(); ++l) {
      os << ",";
      if (!std::isnan(mean_seconds[l][s])) os << mean_seconds[l][s];
    }
    os << "\n";
  }
  return os.str();
}

std::string ComparisonTable::ratio_text() const {
  std::ostringstream os;
  os << std::left << std::setw(14) << "time ratio";
  for (const auto& l : labels) os << std::right << std::setw(14) << l;
  os << "\n" << std::fixed << std::setprecision(4);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    os << std::left << std::setw(14) << labels[i];
    for (std::size_t j = 0; j < labels.size(); ++j) os << std::right << std::setw(14) << ratios[i][j];
    os << "\n";
  }
  return os.str();
}

std::string bench_to_csv(std::span<const BenchResult> results) {
  std::ostringstream os;
  os << "cipher,rounds,bytes,reps,mean_s,mbps\n" << std::setprecision(9);
  for (const auto& r : results)
    os << r.label << "," << r.rounds << "," << r.payload_bytes << "," << r.repetitions << ","
       << r.mean_seconds << "," << r.mbps << "\n";
  return os.str();
}

std::string bench_to_json(std::span<const BenchResult> results) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    rows.push_back({{"cipher", r.label},
                    {"rounds", r.rounds},
                    {"bytes", r.payload_bytes},
                    {"reps", r.repetitions},
                    {"parallel", r.parallel},
                    {"seconds", r.seconds},
                    {"mean_s", r.mean_seconds},
                    {"mbps", r.mbps},
                    {"ns_per_byte", r.ns_per_byte},
                    {"clock_resolution_ns", r.clock_resolution_ns}});
  }
  return nlohmann::json{{"kind", "benchmark"}, {"results", rows}}.dump(2);
}

}  // namespace qrechacha
