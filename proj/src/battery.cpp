#include "qrechacha/battery.hpp"

#include <array>
#include <cmath>
#include <exception>

#include "qrechacha/error.hpp"
#include "qrechacha/special_functions.hpp"

namespace qrechacha {

namespace {

struct RowGroup {
  std::vector<RowLabel> labels;
  std::function<std::vector<TestResult>(const BitSequence&)> run;
};

RowGroup single(std::string suite, std::string id, std::string label,
                std::function<TestResult(const BitSequence&)> fn) {
  return {{{suite + "." + id, suite, std::move(label)}},
          [fn = std::move(fn)](const BitSequence& s) { return std::vector<TestResult>{fn(s)}; }};
}

std::vector<RowGroup> nist_groups() {
  std::vector<RowGroup> g;
  g.push_back(single("nist", "frequency", "Frequency", monobit));
  g.push_back(single("nist", "block_frequency.M=128", "Block Frequency (M=128)",
                     [](const BitSequence& s) { return block_frequency(s, 128); }));
  g.push_back(single("nist", "cumulative_sums.forward", "Cumulative Sums (Forward)",
                     [](const BitSequence& s) { return cumulative_sums(s, Direction::forward); }));
  g.push_back(single("nist", "cumulative_sums.backward", "Cumulative Sums (Backward)",
                     [](const BitSequence& s) { return cumulative_sums(s, Direction::backward); }));
  g.push_back(single("nist", "runs", "Runs", runs));
  g.push_back(single("nist", "longest_run_of_ones", "Longest Run of Ones",
                     [](const BitSequence& s) { return longest_run_of_ones(s); }));
  g.push_back(single("nist", "approximate_entropy.m=10", "Approximate Entropy (m=10)",
                     [](const BitSequence& s) { return approximate_entropy(s, 10); }));
  g.push_back({{{"nist.serial.m=16.p1", "nist", "Serial (m=16, P1)"},
                {"nist.serial.m=16.p2", "nist", "Serial (m=16, P2)"}},
               [](const BitSequence& s) { return serial(s, 16); }});
  return g;
}

std::vector<RowGroup> gmt_groups() {
  std::vector<RowGroup> g;
  g.push_back(single("gmt", "frequency", "Single Bit Frequency", monobit));
  g.push_back(single("gmt", "block_frequency.M=10000", "Block Frequency (m=10000)",
                     [](const BitSequence& s) { return block_frequency(s, 10000); }));
  for (int m : {4, 8})
    g.push_back(single("gmt", "poker.m=" + std::to_string(m),
                       "Poker Test (m=" + std::to_string(m) + ")",
                       [m](const BitSequence& s) { return poker(s, m); }));
  g.push_back(single("gmt", "runs", "Total Runs", runs));
  g.push_back(single("gmt", "run_distribution", "Run Distribution", run_distribution));
  g.push_back(single("gmt", "longest_run_of_ones.M=10000", "Max Run of 1s (m=10000)",
                     [](const BitSequence& s) { return longest_run_of_ones(s, 10000); }));
  g.push_back(single("gmt", "longest_run_of_zeros.M=10000", "Max Run of 0s (m=10000)",
                     [](const BitSequence& s) { return longest_run_of_zeros(s, 10000); }));
  for (int k : {3, 7})
    g.push_back(single("gmt", "binary_derivation.k=" + std::to_string(k),
                       "Binary Derivation (k=" + std::to_string(k) + ")",
                       [k](const BitSequence& s) { return binary_derivation(s, k); }));
  for (std::size_t d : {1u, 2u, 8u, 16u})
    g.push_back(single("gmt", "autocorrelation.d=" + std::to_string(d),
                       "Autocorrelation (d=" + std::to_string(d) + ")",
                       [d](const BitSequence& s) { return autocorrelation(s, d); }));
  g.push_back(single("gmt", "cumulative_sums.forward", "Cumulative Sums (Forward)",
                     [](const BitSequence& s) { return cumulative_sums(s, Direction::forward); }));
  g.push_back(single("gmt", "cumulative_sums.backward", "Cumulative Sums (Backward)",
                     [](const BitSequence& s) { return cumulative_sums(s, Direction::backward); }));
  for (int m : {2, 5})
    g.push_back(single("gmt", "approximate_entropy.m=" + std::to_string(m),
                       "Approximate Entropy (m=" + std::to_string(m) + ")",
                       [m](const BitSequence& s) { return approximate_entropy(s, m); }));
  return g;
}

const std::vector<RowGroup>& groups(Suite suite) {
  static const auto nist = nist_groups();
  static const auto gmt = gmt_groups();
  static const auto both = [] {
    auto all = nist_groups();
    for (auto& g : gmt_groups()) all.push_back(std::move(g));
    return all;
  }();
  switch (suite) {
    case Suite::nist: return nist;
    case Suite::gmt: return gmt;
    case Suite::both: return both;
  }
  return both;
}

std::vector<TestResult> not_applicable(const RowGroup& group) {
  std::vector<TestResult> out;
  for (const auto& label : group.labels) {
    TestResult r;
    r.test_id = label.id;
    r.applicable = false;
    r.p_value = 0.0;
    r.judge(kDefaultAlpha);
    out.push_back(std::move(r));
  }
  return out;
}

template <bool Parallel>
BatteryReport run_impl(std::size_t count, const SequenceSource& source,
                       const BatteryOptions& options) {
  if (count == 0) throw Error(Errc::param, "battery needs at least one sequence");
  std::vector<std::vector<TestResult>> per_sequence(count);
  std::vector<std::size_t> lengths(count, 0);
  const auto n = static_cast<std::int64_t>(count);
  if constexpr (Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        const BitSequence seq = source(static_cast<std::size_t>(i));
        lengths[i] = seq.size();
        per_sequence[i] = evaluate_sequence(seq, options.suite);
      } catch (...) {
#pragma omp critical(qrechacha_battery_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      const BitSequence seq = source(static_cast<std::size_t>(i));
      lengths[i] = seq.size();
      per_sequence[i] = evaluate_sequence(seq, options.suite);
    }
  }
  return summarize(per_sequence, lengths.front(), options);
}

}  // namespace

Suite parse_suite(const std::string& text) {
  if (text == "nist") return Suite::nist;
  if (text == "gmt") return Suite::gmt;
  if (text == "both") return Suite::both;
  throw Error(Errc::usage, "unknown suite '" + text + "' (nist|gmt|both)");
}

const char* suite_name(Suite suite) noexcept {
  switch (suite) {
    case Suite::nist: return "nist";
    case Suite::gmt: return "gmt";
    case Suite::both: return "both";
  }
  return "both";
}

bool BatteryReport::passed() const {
  for (const auto& r : rows)
    if (!r.passed()) return false;
  return !rows.empty();
}

std::vector<RowLabel> battery_rows(Suite suite) {
  std::vector<RowLabel> out;
  for (const auto& g : groups(suite)) out.insert(out.end(), g.labels.begin(), g.labels.end());
  return out;
}

std::vector<TestResult> evaluate_sequence(const BitSequence& seq, Suite suite) {
  std::vector<TestResult> out;
  for (const auto& group : groups(suite)) {
    std::vector<TestResult> results;
    try {
      results = group.run(seq);
    } catch (const Error& e) {
      if (e.code() != Errc::sequence_too_short && e.code() != Errc::param_too_large) throw;
      results = not_applicable(group);
    }
    out.insert(out.end(), results.begin(), results.end());
  }
  return out;
}

BatteryReport battery_run(std::size_t count, const SequenceSource& source,
                          const BatteryOptions& options) {
  return run_impl<true>(count, source, options);
}

BatteryReport battery_run(std::span<const BitSequence> sequences,
                          const BatteryOptions& options) {
  return battery_run(sequences.size(),
                     [sequences](std::size_t i) { return sequences[i]; }, options);
}

BatteryReport battery_run_serial(std::size_t count, const SequenceSource& source,
                                 const BatteryOptions& options) {
  return run_impl<false>(count, source, options);
}

std::pair<double, double> proportion_interval(double alpha, std::size_t sequences) {
  const double center = 1.0 - alpha;
  const double half = 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(sequences));
  return {center - half, center + half};
}

double uniformity_p(std::span<const double> p_values) {
  if (p_values.empty()) return 0.0;
  std::array<double, 10> bins{};
  for (double p : p_values) {
    const int bin = std::min(9, static_cast<int>(std::floor(p * 10.0)));
    bins[static_cast<std::size_t>(std::max(0, bin))] += 1.0;
  }
  const double expected = static_cast<double>(p_values.size()) / 10.0;
  double chi2 = 0.0;
  for (double f : bins) chi2 += (f - expected) * (f - expected) / expected;
  return igamc(9.0 / 2.0, chi2 / 2.0);
}

BatteryReport summarize(const std::vector<std::vector<TestResult>>& per_sequence,
                        std::size_t bits_per_sequence, const BatteryOptions& options) {
  BatteryReport report;
  report.suite = options.suite;
  report.alpha = options.alpha;
  report.alpha_uniformity = options.alpha_uniformity;
  report.provider = options.provider;
  report.is_quantum = options.is_quantum;
  report.sequences = per_sequence.size();
  report.bits_per_sequence = bits_per_sequence;

  const auto labels = battery_rows(options.suite);
  const auto [low, high] = proportion_interval(options.alpha, per_sequence.size());
  for (std::size_t row = 0; row < labels.size(); ++row) {
    RowSummary s;
    s.id = labels[row].id;
    s.suite = labels[row].suite;
    s.label = labels[row].label;
    s.total = per_sequence.size();
    std::vector<double> p_values;
    for (const auto& results : per_sequence) {
      TestResult r = results.at(row);
      r.judge(options.alpha);
      if (!r.applicable) {
        ++s.not_applicable;
        continue;
      }
      p_values.push_back(r.p_value);
      s.pass_count += r.pass;
    }
    s.proportion = static_cast<double>(s.pass_count) / static_cast<double>(s.total);
    s.interval_low = low;
    s.interval_high = high;
    s.uniformity_p = uniformity_p(p_values);
    s.proportion_ok = s.proportion >= low;
    s.uniformity_ok = s.uniformity_p >= options.alpha_uniformity;
    report.rows.push_back(std::move(s));
  }
  return report;
}

}  // namespace qrechacha
