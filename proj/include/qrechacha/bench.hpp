#pragma once

// Encryption throughput of QRE-ChaCha against plain ChaCha on in-memory
// payloads. Only ratios between ciphers are meaningful across machines.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrechacha {

enum class BenchCipher { chacha, qre_chacha };

/// "ChaCha8", "QRE-ChaCha8", ...
std::string bench_label(BenchCipher cipher, int rounds);

struct BenchOptions {
  int repetitions = 5;
  std::uint64_t seed = 1;
  /// OpenMP stream kernel; never compare against single-threaded numbers.
  bool parallel = false;
};

struct BenchResult {
  BenchCipher cipher = BenchCipher::chacha;
  std::string label;
  int rounds = 0;
  std::size_t payload_bytes = 0;
  int repetitions = 0;
  bool parallel = false;
  std::vector<double> seconds;
  double mean_seconds = 0.0;
  double mbps = 0.0;          // payload_bytes / mean_seconds / 1e6
  double ns_per_byte = 0.0;
  double clock_resolution_ns = 0.0;
};

/// Times xor_stream over a random in-memory payload `repetitions` times
/// after one untimed warm-up, with a fresh random key per repetition. Key
/// generation, QRN derivation and payload preparation are outside the timed
/// region. Throws Errc::param for repetitions < 5.
BenchResult bench_cipher(BenchCipher cipher, int rounds, std::size_t payload_bytes,
                         const BenchOptions& options = {});

struct ComparisonTable {
  std::vector<std::string> labels;
  std::vector<std::size_t> sizes;
  /// mean_seconds[label][size]; NaN where no result exists.
  std::vector<std::vector<double>> mean_seconds;
  /// ratios[i][j] = total time of labels[i] / total time of labels[j] over
  /// the sizes both were run at.
  std::vector<std::vector<double>> ratios;

  /// Rows per payload size, one time column per cipher.
  std::string text() const;
  std::string csv() const;
  std::string ratio_text() const;
};

/// Throws Errc::insufficient_results for fewer than two results.
ComparisonTable compare_report(std::span<const BenchResult> results);

/// 10, 20, 30, 40, 50 MB (10^6 bytes per MB).
std::vector<std::size_t> default_bench_sizes();

/// cipher,rounds,bytes,reps,mean_s,mbps
std::string bench_to_csv(std::span<const BenchResult> results);
std::string bench_to_json(std::span<const BenchResult> results);

}  // namespace qrechacha
