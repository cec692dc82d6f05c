// qrechacha: command-line front end.
//
// Exit status: 0 ok, 2 usage or bad parameters, 3 I/O / network / malformed
// input, 4 QRN pool exhausted, 5 a verification or randomness test failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qrechacha/analysis.hpp"
#include "qrechacha/battery.hpp"
#include "qrechacha/bench.hpp"
#include "qrechacha/cipher.hpp"
#include "qrechacha/error.hpp"
#include "qrechacha/qrn.hpp"
#include "qrechacha/randomness_tests.hpp"
#include "qrechacha/report.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qrechacha;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitPool = 4;
constexpr int kExitFailed = 5;

int exit_code(Errc code) {
  switch (code) {
    case Errc::io:
    case Errc::network:
    case Errc::short_response:
    case Errc::decode:
    case Errc::malformed_material:
      return kExitIo;
    case Errc::pool_exhausted:
      return kExitPool;
    default:
      return kExitUsage;
  }
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::vector<std::uint8_t> unhex(const std::string& text) {
  return decode_response(text, ResponseDecoding::hex);
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------- options

struct ReportOpts {
  std::string path;
  std::string format;

  ReportFormat resolve() const {
    if (!format.empty()) return parse_report_format(format);
    if (!path.empty()) return format_for_path(path);
    return ReportFormat::text;
  }
  void emit(const std::string& body) const {
    if (path.empty() || path == "-")
      std::cout << body << (body.empty() || body.back() == '\n' ? "" : "\n");
    else
      write_text(path, body);
  }
};

void add_report(CLI::App* cmd, ReportOpts& r) {
  cmd->add_option("--report", r.path, "Write the report here (format from extension)");
  cmd->add_option("--format", r.format, "json|csv|text")->check(CLI::IsMember({"json", "csv", "text"}));
}

/// Where session material comes from. At most one may be given.
struct MaterialOpts {
  std::string material;
  std::string pool;
  bool remote = false;
  std::string endpoint;
  std::string qrn_config;
  std::optional<std::uint64_t> deterministic;
};

void add_material(CLI::App* cmd, MaterialOpts& m) {
  auto* file = cmd->add_option("--material", m.material, "Session material file");
  auto* pool = cmd->add_option("--pool", m.pool, "Derive fresh material from this QRN pool");
  auto* remote = cmd->add_flag("--remote", m.remote, "Derive fresh material from the remote QRNG");
  auto* det = cmd->add_option("--deterministic-qrn", m.deterministic,
                              "Derive material from a seeded PRNG (not quantum; testing only)");
  cmd->add_option("--endpoint", m.endpoint, "QRNG endpoint URL (overrides config and environment)");
  cmd->add_option("--qrn-config", m.qrn_config, "QRNG config JSON");
  file->excludes(pool)->excludes(remote)->excludes(det);
  pool->excludes(remote)->excludes(det);
  remote->excludes(det);
}

RemoteConfig remote_config(const std::string& config, const std::string& endpoint) {
  RemoteConfig cfg = load_remote_config(config);
  if (!endpoint.empty()) cfg.endpoint = endpoint;
  return cfg;
}

struct ResolvedMaterial {
  QrnSessionMaterial material;
  ProviderInfo source;
};

/// `fallback_seed` is used when no source was given; otherwise a missing
/// source is a usage error.
ResolvedMaterial resolve_material(const MaterialOpts& m, int rounds,
                                  std::optional<std::uint64_t> fallback_seed = std::nullopt) {
  if (!m.material.empty()) {
    auto material = session_parse(read_file(m.material));
    if (material.rounds() != rounds)
      throw Error(Errc::mask_count_mismatch,
                  "material '" + m.material + "' is for " + std::to_string(material.rounds()) +
                      " rounds, not " + std::to_string(rounds));
    // A file says nothing about where its bytes came from.
    return {std::move(material), {"file:" + m.material, false}};
  }
  if (!m.pool.empty()) {
    auto pool = QrnPool::open(m.pool);
    PoolProvider provider(pool);
    return {derive_session(provider, rounds), {provider.name(), true}};
  }
  if (m.remote) {
    RemoteProvider provider(remote_config(m.qrn_config, m.endpoint));
    return {derive_session(provider, rounds), {provider.name(), true}};
  }
  const auto seed = m.deterministic ? m.deterministic : fallback_seed;
  if (!seed)
    throw Error(Errc::usage,
                "no QRN source: give --material, --pool, --remote or --deterministic-qrn");
  DeterministicProvider provider(*seed);
  return {derive_session(provider, rounds), {provider.name(), false}};
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (std::uint64_t(rd()) << 32) | rd();
}

// ---------------------------------------------------------------- keystream sequences

/// Key and nonce of sequence `index` in a run seeded with `seed`.
CipherParams sequence_params(std::uint64_t seed, std::uint64_t index, int rounds) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index),
                    std::uint32_t(index >> 32)};
  std::mt19937_64 gen(seq);
  CipherParams p;
  for (auto& w : p.key) w = static_cast<Word32>(gen());
  for (auto& w : p.nonce) w = static_cast<Word32>(gen());
  p.counter = 0;
  p.rounds = rounds;
  return p;
}

/// Keystream of `bits` bits, packed MSB first; trailing pad bits are zero.
std::vector<std::uint8_t> sequence_bytes(const CipherParams& p, const QrnSessionMaterial& m,
                                         std::size_t bits) {
  std::vector<std::uint8_t> buf((bits + 7) / 8, 0);
  xor_stream_inplace(p, m, buf);
  if (bits % 8) buf.back() &= static_cast<std::uint8_t>(0xff << (8 - bits % 8));
  return buf;
}

std::string sequence_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seq_%05zu.bin", i);
  return buf;
}

/// Keys wrapped under a 32-byte key with ChaCha20 (no authentication: the
/// manifest is a debugging aid, not a key store).
json wrap_keys(const std::vector<CipherParams>& params, std::span<const std::uint8_t> wrap_key) {
  std::vector<std::uint8_t> plain;
  for (const auto& p : params) {
    const auto k = key_to_bytes(p.key);
    const auto n = nonce_to_bytes(p.nonce);
    plain.insert(plain.end(), k.begin(), k.end());
    plain.insert(plain.end(), n.begin(), n.end());
  }
  std::random_device rd;
  std::array<std::uint8_t, kNonceBytes> nonce{};
  for (auto& b : nonce) b = static_cast<std::uint8_t>(rd());
  CipherParams wrap;
  wrap.key = key_from_bytes(wrap_key);
  wrap.nonce = nonce_from_bytes(nonce);
  wrap.counter = 0;
  wrap.rounds = kChaCha20;
  const auto sealed = chacha_xor_stream(wrap, plain);
  return {{"cipher", "chacha20"},
          {"nonce", hex(nonce)},
          {"record", "key(32) || nonce(12) per sequence"},
          {"ciphertext", hex(sealed)}};
}

std::vector<std::uint8_t> load_wrap_key(const std::string& path) {
  std::string p = path;
  if (p.empty())
    if (const char* env = std::getenv("QRECHACHA_WRAP_KEY_FILE"); env && *env) p = env;
  if (p.empty())
    throw Error(Errc::usage, "--debug-keys needs --wrap-key or QRECHACHA_WRAP_KEY_FILE");
  auto key = read_file(p);
  if (key.size() != kKeyBytes) throw Error(Errc::param, "wrap key must be exactly 32 bytes");
  return key;
}

// ---------------------------------------------------------------- encrypt / decrypt

struct CryptOpts {
  int rounds = kChaCha20;
  std::string key, nonce, in, out;
  std::uint32_t counter = 0;
  bool parallel = false;
  MaterialOpts material;
};

int run_crypt(const CryptOpts& o) {
  validate_rounds(o.rounds);
  if (!o.material.pool.empty() || o.material.remote || o.material.deterministic)
    throw Error(Errc::usage, "encrypt/decrypt take --material; derive it first with 'material derive'");
  if (o.material.material.empty()) throw Error(Errc::usage, "--material is required");
  CipherParams p;
  p.key = key_from_bytes(read_file(o.key));
  p.nonce = nonce_from_bytes(read_file(o.nonce));
  p.counter = o.counter;
  p.rounds = o.rounds;
  const auto material = resolve_material(o.material, o.rounds).material;
  auto data = read_file(o.in);
  if (o.parallel)
    xor_stream_parallel_inplace(p, material, data);
  else
    xor_stream_inplace(p, material, data);
  write_file(o.out, data);
  return kExitOk;
}

// ---------------------------------------------------------------- keystream

struct KeystreamOpts {
  int rounds = kChaCha8;
  std::size_t sequences = 1;
  std::size_t bits = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string out_dir;
  std::string replay;
  bool debug_keys = false;
  std::string wrap_key;
  MaterialOpts material;
};

int run_keystream(KeystreamOpts o) {
  std::optional<QrnSessionMaterial> replay_material;
  ProviderInfo source;
  if (!o.replay.empty()) {
    std::ifstream in(o.replay);
    if (!in) throw Error(Errc::io, "cannot open manifest '" + o.replay + "'");
    json m;
    try {
      in >> m;
      o.rounds = m.at("rounds").get<int>();
      o.sequences = m.at("sequences").get<std::size_t>();
      o.bits = m.at("bits").get<std::size_t>();
      o.seed = std::stoull(m.at("seed").get<std::string>());
      replay_material = session_parse(unhex(m.at("material").get<std::string>()));
      source = {m.at("provider").get<std::string>(), m.at("is_quantum").get<bool>()};
    } catch (const json::exception& e) {
      throw Error(Errc::malformed_material, "manifest '" + o.replay + "': " + e.what());
    } catch (const std::logic_error& e) {
      throw Error(Errc::malformed_material, "manifest '" + o.replay + "': bad seed");
    }
  }
  validate_rounds(o.rounds);
  if (o.bits == 0) throw Error(Errc::usage, "--bits is required");
  if (o.sequences == 0) throw Error(Errc::usage, "--sequences must be positive");
  if (o.out_dir.empty() && (o.sequences != 1 || o.out.empty()))
    throw Error(Errc::usage, "use --out-dir, or --out for a single sequence");
  if (o.debug_keys && o.out_dir.empty()) throw Error(Errc::usage, "--debug-keys needs --out-dir");
  const auto wrap_key = o.debug_keys ? load_wrap_key(o.wrap_key) : std::vector<std::uint8_t>{};

  const std::uint64_t seed = o.seed ? *o.seed : fresh_seed();
  QrnSessionMaterial material;
  if (replay_material) {
    material = *replay_material;
  } else {
    auto r = resolve_material(o.material, o.rounds);
    material = std::move(r.material);
    source = r.source;
  }

  if (o.out_dir.empty()) {
    const auto bytes = sequence_bytes(sequence_params(seed, 0, o.rounds), material, o.bits);
    if (o.out == "-")
      std::cout.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    else
      write_file(o.out, bytes);
    return kExitOk;
  }

  const fs::path dir = o.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<CipherParams> params;
  json files = json::array();
  for (std::size_t i = 0; i < o.sequences; ++i) {
    const auto p = sequence_params(seed, i, o.rounds);
    write_file(dir / sequence_name(i), sequence_bytes(p, material, o.bits));
    files.push_back(sequence_name(i));
    if (o.debug_keys) params.push_back(p);
  }
  // The session material is needed to replay; it is key-equivalent, so the
  // manifest must be guarded like the material file itself.
  json manifest = {
      {"kind", "keystream_manifest"},
      {"version", 1},
      {"rounds", o.rounds},
      {"sequences", o.sequences},
      {"bits", o.bits},
      {"bit_order", "msb_first"},
      {"seed", std::to_string(seed)},
      {"key_derivation", "mt19937_64(seed_seq{seed_lo, seed_hi, index_lo, index_hi}): 8 key words, 3 nonce words"},
      {"counter", 0},
      {"plaintext", "zero"},
      {"provider", source.provider},
      {"is_quantum", source.is_quantum},
      {"material", hex(session_serialize(material))},
      {"files", files},
  };
  if (o.debug_keys) manifest["debug_keys"] = wrap_keys(params, wrap_key);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- qrn

struct QrnOpts {
  std::string endpoint, config, decoding, out, from, pool;
  std::size_t bytes = 0;
  bool force = false;
  ReportOpts report;
};

void refuse_overwrite(const std::string& path, bool force) {
  if (!force && fs::exists(path))
    throw Error(Errc::io, "'" + path + "' exists; pass --force to replace it");
}

int run_qrn_fetch(const QrnOpts& o) {
  if (o.bytes == 0) throw Error(Errc::usage, "--bytes must be positive");
  refuse_overwrite(o.out, o.force);
  RemoteConfig cfg = remote_config(o.config, o.endpoint);
  if (!o.decoding.empty()) cfg.decoding = parse_decoding(o.decoding);
  const auto bytes = fetch_remote(cfg, o.bytes);
  auto pool = QrnPool::create(o.out, bytes);
  std::cerr << "wrote " << pool.total_bytes() << " bytes to " << o.out << "\n";
  return kExitOk;
}

int run_qrn_init(const QrnOpts& o) {
  refuse_overwrite(o.out, o.force);
  auto pool = QrnPool::create(o.out, read_file(o.from));
  std::cerr << "wrote " << pool.total_bytes() << " bytes to " << o.out << "\n";
  return kExitOk;
}

int run_qrn_status(const QrnOpts& o) {
  const auto pool = QrnPool::open(o.pool);
  const auto fmt = o.report.resolve();
  std::ostringstream out;
  if (fmt == ReportFormat::json) {
    out << json{{"kind", "qrn_pool"},        {"path", o.pool},
                {"version", pool.version()}, {"total_bytes", pool.total_bytes()},
                {"cursor_bytes", pool.cursor_bytes()}, {"remaining_bytes", pool.remaining()}}
               .dump(2);
  } else if (fmt == ReportFormat::csv) {
    out << "path,version,total_bytes,cursor_bytes,remaining_bytes\n"
        << o.pool << ',' << pool.version() << ',' << pool.total_bytes() << ','
        << pool.cursor_bytes() << ',' << pool.remaining() << '\n';
  } else {
    out << "pool       " << o.pool << "\n"
        << "version    " << pool.version() << "\n"
        << "total      " << pool.total_bytes() << " bytes\n"
        << "used       " << pool.cursor_bytes() << " bytes\n"
        << "remaining  " << pool.remaining() << " bytes (" << pool.remaining() / session_budget(kChaCha20)
        << " ChaCha20 sessions)\n";
  }
  o.report.emit(out.str());
  return kExitOk;
}

// ---------------------------------------------------------------- material

struct MaterialDeriveOpts {
  int rounds = kChaCha20;
  std::string out;
  bool force = false;
  MaterialOpts material;
};

int run_material_derive(const MaterialDeriveOpts& o) {
  validate_rounds(o.rounds);
  if (!o.material.material.empty()) throw Error(Errc::usage, "'material derive' makes material; --material is an input only elsewhere");
  refuse_overwrite(o.out, o.force);
  const auto r = resolve_material(o.material, o.rounds);
  write_file(o.out, session_serialize(r.material));
  std::cerr << "derived " << session_budget(o.rounds) << " bytes of session material from "
            << r.source.provider << (r.source.is_quantum ? "" : " (NOT quantum)") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- test

struct TestOpts {
  std::string suite = "both";
  std::size_t sequences = 100;
  std::size_t bits = 1'000'000;
  double alpha = kDefaultAlpha;
  double alpha_uniformity = kDefaultUniformityAlpha;
  int rounds = kChaCha8;
  std::optional<std::uint64_t> seed;
  std::string input;
  MaterialOpts material;
  ReportOpts report;
};

std::vector<fs::path> sequence_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw Error(Errc::io, "'" + dir.string() + "' is not a directory");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

int run_test(const TestOpts& o) {
  BatteryOptions opts;
  opts.suite = parse_suite(o.suite);
  opts.alpha = o.alpha;
  opts.alpha_uniformity = o.alpha_uniformity;
  if (!(o.alpha > 0 && o.alpha < 1) || !(o.alpha_uniformity > 0 && o.alpha_uniformity < 1))
    throw Error(Errc::param, "significance levels must lie in (0, 1)");

  BatteryReport report;
  if (!o.input.empty()) {
    const fs::path dir = o.input;
    auto files = sequence_files(dir);
    if (files.empty()) throw Error(Errc::io, "no .bin sequence files in '" + o.input + "'");
    std::size_t count = std::min(files.size(), o.sequences);
    std::size_t bits = o.bits;
    opts.provider = "files:" + o.input;
    if (fs::exists(dir / "manifest.json")) {
      std::ifstream in(dir / "manifest.json");
      json m;
      try {
        in >> m;
        opts.provider = m.value("provider", opts.provider);
        opts.is_quantum = m.value("is_quantum", false);
        bits = std::min(bits, m.at("bits").get<std::size_t>());
      } catch (const json::exception& e) {
        throw Error(Errc::malformed_material, "manifest: " + std::string(e.what()));
      }
    }
    report = battery_run(
        count,
        [&](std::size_t i) {
          const auto bytes = read_file(files[i]);
          if (bytes.size() * 8 < bits)
            throw Error(Errc::sequence_too_short,
                        files[i].string() + " holds fewer than " + std::to_string(bits) + " bits");
          return BitSequence::from_packed(bytes, bits);
        },
        opts);
  } else {
    validate_rounds(o.rounds);
    const std::uint64_t seed = o.seed ? *o.seed : fresh_seed();
    auto r = resolve_material(o.material, o.rounds, seed);
    opts.provider = r.source.provider;
    opts.is_quantum = r.source.is_quantum;
    const auto material = std::move(r.material);
    std::cerr << "generating " << o.sequences << " x " << o.bits << " bits of "
              << bench_label(BenchCipher::qre_chacha, o.rounds) << " keystream, seed " << seed
              << "\n";
    report = battery_run(
        o.sequences,
        [&](std::size_t i) {
          return BitSequence::from_packed(
              sequence_bytes(sequence_params(seed, i, o.rounds), material, o.bits), o.bits);
        },
        opts);
  }
  const auto fmt = o.report.resolve();
  o.report.emit(render(report, fmt));
  if (!o.report.path.empty() && o.report.path != "-") std::cout << battery_to_text(report);
  return report.passed() ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------- avalanche / diffprob

struct AvalancheOpts {
  int rounds = kChaCha8;
  std::size_t trials = 10000;
  std::string flip = "key:0";
  std::uint64_t seed = 1;
  std::uint32_t counter = 0;
  MaterialOpts material;
  ReportOpts report;
};

int run_avalanche(const AvalancheOpts& o) {
  validate_rounds(o.rounds);
  const auto r = resolve_material(o.material, o.rounds);
  CipherParams p;
  p.rounds = o.rounds;
  p.counter = o.counter;
  const auto a = avalanche_metric(p, r.material, FlipTarget::parse(o.flip), o.trials, o.seed);
  switch (o.report.resolve()) {
    case ReportFormat::json: o.report.emit(avalanche_to_json(a, r.source)); break;
    case ReportFormat::text: o.report.emit(avalanche_to_text(a, r.source)); break;
    case ReportFormat::csv: {
      std::ostringstream out;
      out << "output_bit,flip_rate\n";
      for (std::size_t i = 0; i < a.per_bit.size(); ++i) out << i << ',' << a.per_bit[i] << '\n';
      o.report.emit(out.str());
      break;
    }
  }
  return kExitOk;
}

/// "w:b,w:b,..." -> state with those bits set (word 0..15, bit 0..31).
StateMatrix parse_diff(const std::string& text) {
  StateMatrix s;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(item);
      const int w = std::stoi(item.substr(0, colon)), b = std::stoi(item.substr(colon + 1));
      if (w < 0 || w > 15 || b < 0 || b > 31) throw std::out_of_range(item);
      s[w] ^= Word32(1) << b;
    } catch (const std::logic_error&) {
      throw Error(Errc::param, "bad difference bit '" + item + "' (want word:bit)");
    }
  }
  return s;
}

struct DiffOpts {
  int rounds = 2;
  std::string input_diff, output_diff;
  std::size_t samples = 100000;
  std::string mode = "fixed";
  std::uint64_t seed = 1;
  MaterialOpts material;
  ReportOpts report;
};

int run_diffprob(const DiffOpts& o) {
  DiffSpec spec{parse_diff(o.input_diff), parse_diff(o.output_diff), o.rounds};
  const QrnMode mode = parse_qrn_mode(o.mode);
  validate_rounds(o.rounds);
  ResolvedMaterial r;
  if (mode == QrnMode::fixed)
    r = resolve_material(o.material, o.rounds);
  else
    r = {QrnSessionMaterial::zero(o.rounds), {"deterministic:" + std::to_string(o.seed), false}};
  const auto est = empirical_diff_probability(spec, o.samples, mode, r.material, o.seed);
  switch (o.report.resolve()) {
    case ReportFormat::json: o.report.emit(diff_to_json(est, spec, r.source)); break;
    case ReportFormat::text: o.report.emit(diff_to_text(est, spec, r.source)); break;
    case ReportFormat::csv: {
      std::ostringstream out;
      out.precision(10);
      out << "rounds,mode,samples,hits,probability,half_width,rejected_masks\n"
          << o.rounds << ',' << o.mode << ',' << est.samples << ',' << est.hits << ','
          << est.probability << ',' << est.half_width << ',' << est.rejected_masks << '\n';
      o.report.emit(out.str());
      break;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchOpts {
  std::vector<double> sizes_mb;
  std::vector<std::string> ciphers = {"ChaCha8", "QRE-ChaCha8", "ChaCha20"};
  int repetitions = 5;
  bool parallel = false;
  ReportOpts report;
};

std::pair<BenchCipher, int> parse_cipher(const std::string& label) {
  const std::string qre = "QRE-ChaCha", plain = "ChaCha";
  try {
    if (label.rfind(qre, 0) == 0) return {BenchCipher::qre_chacha, std::stoi(label.substr(qre.size()))};
    if (label.rfind(plain, 0) == 0) return {BenchCipher::chacha, std::stoi(label.substr(plain.size()))};
  } catch (const std::logic_error&) {
  }
  throw Error(Errc::param, "unknown cipher '" + label + "' (ChaCha<R> or QRE-ChaCha<R>)");
}

int run_bench(const BenchOpts& o) {
  std::vector<std::size_t> sizes;
  if (o.sizes_mb.empty())
    sizes = default_bench_sizes();
  else
    for (double mb : o.sizes_mb) {
      if (!(mb > 0)) throw Error(Errc::param, "payload sizes must be positive");
      sizes.push_back(static_cast<std::size_t>(mb * 1e6));
    }
  BenchOptions opts;
  opts.repetitions = o.repetitions;
  opts.parallel = o.parallel;
  std::vector<BenchResult> results;
  for (auto size : sizes)
    for (const auto& label : o.ciphers) {
      const auto [cipher, rounds] = parse_cipher(label);
      results.push_back(bench_cipher(cipher, rounds, size, opts));
      std::cerr << results.back().label << " " << size << " B: " << results.back().mean_seconds
                << " s\n";
    }
  switch (o.report.resolve()) {
    case ReportFormat::json: o.report.emit(bench_to_json(results)); break;
    case ReportFormat::csv: o.report.emit(bench_to_csv(results)); break;
    case ReportFormat::text: {
      const auto t = compare_report(results);
      o.report.emit(t.text() + "\n" + t.ratio_text());
      break;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRE-ChaCha: ChaCha with quantum-random constant and round injection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qrechacha 1.0");

  CryptOpts enc, dec;
  for (auto [name, o, what] : {std::tuple{"encrypt", &enc, "Encrypt a file"},
                               std::tuple{"decrypt", &dec, "Decrypt a file"}}) {
    auto* cmd = app.add_subcommand(name, what);
    cmd->add_option("--rounds,-r", o->rounds, "Rounds (8, 12, 20 or any even >= 2)");
    cmd->add_option("--key", o->key, "32-byte key file")->required();
    cmd->add_option("--nonce", o->nonce, "12-byte nonce file")->required();
    cmd->add_option("--counter", o->counter, "Initial block counter");
    cmd->add_option("--in", o->in, "Input file")->required();
    cmd->add_option("--out", o->out, "Output file")->required();
    cmd->add_flag("--parallel", o->parallel, "Use the OpenMP kernel");
    add_material(cmd, o->material);
  }

  KeystreamOpts ks;
  auto* keystream = app.add_subcommand("keystream", "Write keystream sequences (zero plaintext, one key per sequence)");
  keystream->add_option("--rounds,-r", ks.rounds);
  keystream->add_option("--sequences,-n", ks.sequences, "Number of sequences");
  keystream->add_option("--bits,-l", ks.bits, "Bits per sequence");
  keystream->add_option("--seed", ks.seed, "Generation seed (random when omitted; recorded in the manifest)");
  keystream->add_option("--out", ks.out, "Single sequence output file ('-' for stdout)");
  keystream->add_option("--out-dir", ks.out_dir, "Directory for seq_NNNNN.bin files and manifest.json");
  keystream->add_option("--replay", ks.replay, "Regenerate the sequences of an existing manifest");
  keystream->add_flag("--debug-keys", ks.debug_keys, "Store the per-sequence keys, encrypted, in the manifest");
  keystream->add_option("--wrap-key", ks.wrap_key, "32-byte key file for --debug-keys (or QRECHACHA_WRAP_KEY_FILE)");
  add_material(keystream, ks.material);

  QrnOpts qo;
  auto* qrn = app.add_subcommand("qrn", "Quantum random number pool");
  qrn->require_subcommand(1);
  auto* fetch = qrn->add_subcommand("fetch", "Fetch bytes from the remote QRNG into a new pool");
  fetch->add_option("--endpoint", qo.endpoint, "QRNG URL (else config / QRECHACHA_QRN_ENDPOINT)");
  fetch->add_option("--qrn-config", qo.config, "QRNG config JSON");
  fetch->add_option("--decoding", qo.decoding, "hex|raw")->check(CLI::IsMember({"hex", "raw"}));
  fetch->add_option("--bytes", qo.bytes, "Bytes to fetch")->required();
  fetch->add_option("--out", qo.out, "Pool file")->required();
  fetch->add_flag("--force", qo.force, "Replace an existing pool");
  auto* init = qrn->add_subcommand("init", "Create a pool from a file of captured QRNG bytes");
  init->add_option("--from", qo.from, "Raw QRNG bytes")->required();
  init->add_option("--out", qo.out, "Pool file")->required();
  init->add_flag("--force", qo.force, "Replace an existing pool");
  auto* status = qrn->add_subcommand("status", "Show pool size and consumption");
  status->add_option("--pool", qo.pool, "Pool file")->required();
  add_report(status, qo.report);

  MaterialDeriveOpts md;
  auto* material = app.add_subcommand("material", "Session material");
  material->require_subcommand(1);
  auto* derive = material->add_subcommand("derive", "Draw session material from a QRN source");
  derive->add_option("--rounds,-r", md.rounds);
  derive->add_option("--out", md.out, "Session material file")->required();
  derive->add_flag("--force", md.force, "Replace an existing file");
  add_material(derive, md.material);

  TestOpts to;
  auto* test = app.add_subcommand("test", "Run the randomness battery");
  test->add_option("--suite", to.suite, "nist|gmt|both")->check(CLI::IsMember({"nist", "gmt", "both"}));
  test->add_option("--sequences,-n", to.sequences);
  test->add_option("--bits,-l", to.bits);
  test->add_option("--alpha", to.alpha, "Per-test significance level");
  test->add_option("--alpha-uniformity", to.alpha_uniformity, "P-value uniformity level");
  test->add_option("--rounds,-r", to.rounds, "Rounds of the generated keystream");
  test->add_option("--seed", to.seed, "Key generation seed for generated sequences");
  test->add_option("--input", to.input, "Directory of packed .bin sequences (e.g. from keystream)");
  add_material(test, to.material);
  add_report(test, to.report);

  AvalancheOpts ao;
  auto* aval = app.add_subcommand("avalanche", "Per-output-bit flip rates for one flipped input bit");
  aval->add_option("--rounds,-r", ao.rounds);
  aval->add_option("--trials", ao.trials);
  aval->add_option("--flip", ao.flip, "key:<0-255>, nonce:<0-95> or counter:<0-31>");
  aval->add_option("--seed", ao.seed);
  aval->add_option("--counter", ao.counter);
  add_material(aval, ao.material);
  add_report(aval, ao.report);

  DiffOpts dof;
  auto* diff = app.add_subcommand("diffprob", "Sampled differential probability (2 or 4 rounds)");
  diff->add_option("--rounds,-r", dof.rounds);
  diff->add_option("--input-diff", dof.input_diff, "word:bit[,word:bit...]")->required();
  diff->add_option("--output-diff", dof.output_diff, "word:bit[,word:bit...]")->required();
  diff->add_option("--samples", dof.samples);
  diff->add_option("--mode", dof.mode, "fixed|resampled")->check(CLI::IsMember({"fixed", "resampled"}));
  diff->add_option("--seed", dof.seed);
  add_material(diff, dof.material);
  add_report(diff, dof.report);

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "Encryption time of QRE-ChaCha against ChaCha");
  bench->add_option("--sizes", bo.sizes_mb, "Payload sizes in MB (default 10 20 30 40 50)");
  bench->add_option("--ciphers", bo.ciphers, "e.g. ChaCha8 QRE-ChaCha8 ChaCha20");
  bench->add_option("--reps", bo.repetitions, "Timed repetitions per size (>= 5)");
  bench->add_flag("--parallel", bo.parallel, "Use the OpenMP kernels");
  add_report(bench, bo.report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("encrypt")) return run_crypt(enc);
    if (app.got_subcommand("decrypt")) return run_crypt(dec);
    if (app.got_subcommand("keystream")) return run_keystream(ks);
    if (fetch->parsed()) return run_qrn_fetch(qo);
    if (init->parsed()) return run_qrn_init(qo);
    if (status->parsed()) return run_qrn_status(qo);
    if (derive->parsed()) return run_material_derive(md);
    if (test->parsed()) return run_test(to);
    if (aval->parsed()) return run_avalanche(ao);
    if (diff->parsed()) return run_diffprob(dof);
    if (bench->parsed()) return run_bench(bo);
  } catch (const Error& e) {
    std::cerr << "qrechacha: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "qrechacha: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
