#pragma once

// Two-level randomness evaluation: every enabled test runs on every
// sequence, then each test row is judged by its pass proportion (against
// the three-sigma interval around 1 - alpha) and by the uniformity of its
// P-values (10-bin chi-square).

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrechacha/randomness_tests.hpp"

namespace qrechacha {

enum class Suite { nist, gmt, both };

Suite parse_suite(const std::string& text);
const char* suite_name(Suite suite) noexcept;

struct BatteryOptions {
  Suite suite = Suite::both;
  double alpha = kDefaultAlpha;
  double alpha_uniformity = kDefaultUniformityAlpha;
  std::string provider = "unspecified";
  bool is_quantum = false;
};

struct RowSummary {
  std::string id;     // e.g. "gmt.poker.m=4"
  std::string suite;  // "nist" or "gmt"
  std::string label;  // table wording, e.g. "Poker Test (m=4)"
  std::size_t pass_count = 0;
  std::size_t not_applicable = 0;
  std::size_t total = 0;
  double proportion = 0.0;
  double interval_low = 0.0;
  double interval_high = 0.0;
  double uniformity_p = 0.0;
  bool proportion_ok = false;
  bool uniformity_ok = false;

  bool passed() const { return proportion_ok && uniformity_ok; }
};

struct BatteryReport {
  Suite suite = Suite::both;
  double alpha = kDefaultAlpha;
  double alpha_uniformity = kDefaultUniformityAlpha;
  std::string provider;
  bool is_quantum = false;
  std::size_t sequences = 0;
  std::size_t bits_per_sequence = 0;
  std::vector<RowSummary> rows;

  bool passed() const;
};

/// Labels of the rows evaluate_sequence produces for `suite`, in order.
struct RowLabel {
  std::string id;
  std::string suite;
  std::string label;
};
std::vector<RowLabel> battery_rows(Suite suite);

/// One result per row of battery_rows(suite). A test whose length or
/// parameter preconditions fail yields a not-applicable result (p = 0).
std::vector<TestResult> evaluate_sequence(const BitSequence& seq, Suite suite);

/// Produces sequence i. Must be safe to call concurrently for distinct i.
using SequenceSource = std::function<BitSequence(std::size_t index)>;

/// Sequences evaluated in parallel with OpenMP.
BatteryReport battery_run(std::size_t count, const SequenceSource& source,
                          const BatteryOptions& options);
BatteryReport battery_run(std::span<const BitSequence> sequences,
                          const BatteryOptions& options);
/// Serial reference; identical report to battery_run.
BatteryReport battery_run_serial(std::size_t count, const SequenceSource& source,
                                 const BatteryOptions& options);

/// (1 - alpha) -+ 3 sqrt(alpha (1 - alpha) / s)
std::pair<double, double> proportion_interval(double alpha, std::size_t sequences);

/// Chi-square over 10 equal bins of [0, 1]; P = igamc(9/2, chi2/2).
double uniformity_p(std::span<const double> p_values);

/// Aggregates per-sequence results (outer index: sequence; inner: row).
BatteryReport summarize(const std::vector<std::vector<TestResult>>& per_sequence,
                        std::size_t bits_per_sequence, const BatteryOptions& options);

}  // namespace qrechacha
