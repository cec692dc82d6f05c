#pragma once

// Test-only reference implementations. Nothing here calls into the library:
// the ChaCha oracle is a byte-oriented rewrite, the statistics are direct
// string-based evaluations with Boost.Math special functions.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------- ChaCha

inline std::uint32_t rotl(std::uint32_t v, int c) { return (v << c) | (v >> (32 - c)); }

inline void qr(std::uint32_t* x, int a, int b, int c, int d) {
  x[a] = x[a] + x[b]; x[d] = rotl(x[d] ^ x[a], 16);
  x[c] = x[c] + x[d]; x[b] = rotl(x[b] ^ x[c], 12);
  x[a] = x[a] + x[b]; x[d] = rotl(x[d] ^ x[a], 8);
  x[c] = x[c] + x[d]; x[b] = rotl(x[b] ^ x[c], 7);
}

inline std::uint32_t le32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

/// Plain ChaCha block, key/nonce as raw bytes.
inline std::array<std::uint8_t, 64> chacha_block(const std::uint8_t key[32],
                                                 const std::uint8_t nonce[12],
                                                 std::uint32_t counter, int rounds) {
  std::uint32_t in[16] = {0x61707865, 0x3320646e, 0x79622d32, 0x6b206574};
  for (int i = 0; i < 8; ++i) in[4 + i] = le32(key + 4 * i);
  in[12] = counter;
  for (int i = 0; i < 3; ++i) in[13 + i] = le32(nonce + 4 * i);
  std::uint32_t x[16];
  for (int i = 0; i < 16; ++i) x[i] = in[i];
  for (int i = 0; i < rounds; i += 2) {
    qr(x, 0, 4, 8, 12); qr(x, 1, 5, 9, 13); qr(x, 2, 6, 10, 14); qr(x, 3, 7, 11, 15);
    qr(x, 0, 5, 10, 15); qr(x, 1, 6, 11, 12); qr(x, 2, 7, 8, 13); qr(x, 3, 4, 9, 14);
  }
  std::array<std::uint8_t, 64> out{};
  for (int i = 0; i < 16; ++i) {
    const std::uint32_t v = x[i] + in[i];
    for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<std::uint8_t>(v >> (8 * b));
  }
  return out;
}

/// Plain ChaCha plain rounds (no feedforward) on a word state.
inline std::array<std::uint32_t, 16> chacha_rounds(std::array<std::uint32_t, 16> x, int rounds) {
  for (int i = 0; i < rounds; i += 2) {
    qr(x.data(), 0, 4, 8, 12); qr(x.data(), 1, 5, 9, 13);
    qr(x.data(), 2, 6, 10, 14); qr(x.data(), 3, 7, 11, 15);
    qr(x.data(), 0, 5, 10, 15); qr(x.data(), 1, 6, 11, 12);
    qr(x.data(), 2, 7, 8, 13); qr(x.data(), 3, 4, 9, 14);
  }
  return x;
}

// ------------------------------------------------------- special functions

inline double erfc(double x) { return boost::math::erfc(x); }
inline double igamc(double a, double x) { return boost::math::gamma_q(a, x); }
inline double phi(double x) { return boost::math::cdf(boost::math::normal(), x); }

/// erfc by the Maclaurin series of erf in long double; fine for |x| <= 3.
inline long double erfc_series(long double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 400; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 1.0L - 2.0L / std::sqrt(3.14159265358979323846264338327950288L) * sum;
}

/// P(a, x) by its power series in long double; Q = 1 - P. For moderate x.
inline long double igamc_series(long double a, long double x) {
  long double term = 1.0L / a, sum = term;
  for (int n = 1; n < 5000; ++n) {
    term *= x / (a + n);
    sum += term;
  }
  return 1.0L - sum * std::exp(a * std::log(x) - x - std::lgamma(a));
}

// -------------------------------------------------------------- sequences

/// 10^6-bit reference sequence: mt19937 seeded 20260115, 32 bits per output,
/// least significant bit first.
inline std::string reference_bits(std::size_t n = 1000000) {
  std::mt19937 rng(20260115u);
  std::string s;
  s.reserve(n);
  while (s.size() < n) {
    std::uint32_t v = rng();
    for (int b = 0; b < 32 && s.size() < n; ++b) s.push_back(((v >> b) & 1u) ? '1' : '0');
  }
  return s;
}

// -------------------------------------------------------------- statistics

inline double monobit(const std::string& s) {
  double sum = 0;
  for (char c : s) sum += c == '1' ? 1 : -1;
  return erfc(std::fabs(sum) / std::sqrt(double(s.size())) / std::sqrt(2.0));
}

inline double block_frequency(const std::string& s, std::size_t M) {
  const std::size_t N = s.size() / M;
  double chi = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const std::string block = s.substr(i * M, M);
    double pi = double(std::count(block.begin(), block.end(), '1')) / double(M);
    chi += (pi - 0.5) * (pi - 0.5);
  }
  chi *= 4.0 * double(M);
  return igamc(double(N) / 2, chi / 2);
}

inline double runs(const std::string& s) {
  const double n = double(s.size());
  const double pi = double(std::count(s.begin(), s.end(), '1')) / n;
  double v = 1;
  for (std::size_t i = 1; i < s.size(); ++i) v += s[i] != s[i - 1];
  return erfc(std::fabs(v - 2 * n * pi * (1 - pi)) / (2 * std::sqrt(2 * n) * pi * (1 - pi)));
}

inline std::size_t longest_substring_run(const std::string& block, char c) {
  std::size_t k = 0;
  while (block.find(std::string(k + 1, c)) != std::string::npos) ++k;
  return k;
}

/// Longest-run test with the NIST class tables for M = 8, 128, 10^4.
inline double longest_run(const std::string& s, std::size_t M, char c = '1') {
  std::vector<double> pi;
  int lo;
  if (M == 8) { pi = {0.2148, 0.3672, 0.2305, 0.1875}; lo = 1; }
  else if (M == 128) { pi = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124}; lo = 4; }
  else { pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}; lo = 10; }
  const std::size_t N = s.size() / M;
  std::vector<double> v(pi.size(), 0);
  for (std::size_t i = 0; i < N; ++i) {
    int run = int(longest_substring_run(s.substr(i * M, M), c));
    int cls = run - lo;
    if (cls < 0) cls = 0;
    if (cls > int(pi.size()) - 1) cls = int(pi.size()) - 1;
    v[cls] += 1;
  }
  double chi = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) chi += std::pow(v[i] - N * pi[i], 2) / (N * pi[i]);
  return igamc(double(pi.size() - 1) / 2, chi / 2);
}

inline double cusum(const std::string& s, bool forward) {
  std::vector<long> partial;
  long acc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = forward ? s[i] : s[s.size() - 1 - i];
    acc += c == '1' ? 1 : -1;
    partial.push_back(acc);
  }
  double z = 0;
  for (long p : partial) z = std::max(z, double(std::labs(p)));
  const double n = double(s.size());
  double sum1 = 0, sum2 = 0;
  for (double k = std::trunc(std::trunc(-n / z + 1) / 4); k <= std::trunc(std::trunc(n / z - 1) / 4); ++k)
    sum1 += phi((4 * k + 1) * z / std::sqrt(n)) - phi((4 * k - 1) * z / std::sqrt(n));
  for (double k = std::trunc(std::trunc(-n / z - 3) / 4); k <= std::trunc(std::trunc(n / z - 1) / 4); ++k)
    sum2 += phi((4 * k + 3) * z / std::sqrt(n)) - phi((4 * k + 1) * z / std::sqrt(n));
  return 1 - sum1 + sum2;
}

inline std::map<std::string, long> cyclic_counts(const std::string& s, int m) {
  std::map<std::string, long> counts;
  if (m == 0) return counts;
  const std::string ext = s + s.substr(0, m - 1);
  for (std::size_t i = 0; i < s.size(); ++i) ++counts[ext.substr(i, m)];
  return counts;
}

inline double apen(const std::string& s, int m) {
  const double n = double(s.size());
  auto phi_m = [&](int len) {
    double sum = 0;
    for (auto& [pattern, c] : cyclic_counts(s, len)) sum += (c / n) * std::log(c / n);
    return sum;
  };
  const double ap = phi_m(m) - phi_m(m + 1);
  const double chi = 2 * n * (std::log(2.0) - ap);
  return igamc(std::pow(2.0, m - 1), chi / 2);
}

inline std::array<double, 2> serial(const std::string& s, int m) {
  const double n = double(s.size());
  auto psi = [&](int len) {
    if (len <= 0) return 0.0;
    double sum = 0;
    for (auto& [pattern, c] : cyclic_counts(s, len)) sum += double(c) * double(c);
    return std::pow(2.0, len) / n * sum - n;
  };
  const double d1 = psi(m) - psi(m - 1);
  const double d2 = psi(m) - 2 * psi(m - 1) + psi(m - 2);
  return {igamc(std::pow(2.0, m - 2), d1 / 2), igamc(std::pow(2.0, m - 3), d2 / 2)};
}

inline double poker(const std::string& s, int m) {
  const std::size_t N = s.size() / m;
  std::map<std::string, long> counts;
  for (std::size_t i = 0; i < N; ++i) ++counts[s.substr(i * m, m)];
  double sum = 0;
  for (auto& [p, c] : counts) sum += double(c) * double(c);
  const double v = std::pow(2.0, m) / double(N) * sum - double(N);
  return igamc((std::pow(2.0, m) - 1) / 2, v / 2);
}

inline double binary_derivation(std::string s, int k) {
  for (int pass = 0; pass < k; ++pass) {
    std::string next;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) next.push_back(s[i] == s[i + 1] ? '0' : '1');
    s = next;
  }
  double sum = 0;
  for (char c : s) sum += c == '1' ? 1 : -1;
  return erfc(std::fabs(sum / std::sqrt(double(s.size()))) / std::sqrt(2.0));
}

inline double autocorrelation(const std::string& s, std::size_t d) {
  double a = 0;
  for (std::size_t i = 0; i + d < s.size(); ++i) a += s[i] != s[i + d];
  const double len = double(s.size() - d);
  const double v = 2 * (a - len / 2) / std::sqrt(len);
  return erfc(std::fabs(v) / std::sqrt(2.0));
}

inline double run_distribution(const std::string& s) {
  const double n = double(s.size());
  int e = 1;
  while ((n - (e + 1) + 3) / std::pow(2.0, e + 3) >= 5) ++e;
  std::map<std::pair<char, std::size_t>, double> counts;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    counts[{s[i], j - i}] += 1;
    i = j;
  }
  double v = 0;
  for (int len = 1; len <= e; ++len) {
    const double expected = (n - len + 3) / std::pow(2.0, len + 2);
    for (char c : {'0', '1'}) {
      const double got = counts.count({c, std::size_t(len)}) ? counts[{c, std::size_t(len)}] : 0.0;
      v += (got - expected) * (got - expected) / expected;
    }
  }
  return igamc(e - 1.0, v / 2);
}

}  // namespace oracle
