#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "qrechacha/qrn.hpp"
#include "test_support.hpp"

using namespace qrechacha;
using namespace testing_support;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// stderr is folded into the captured output.
Run cli(const std::string& args) {
  const std::string cmd = std::string(QRECHACHA_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

void put(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) { write_file(p, bytes); }

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
  EXPECT_EQ(cli("encrypt --rounds 8").status, 2);
  EXPECT_EQ(cli("--help").status, 0);
  EXPECT_EQ(cli("test --suite dieharder").status, 2);
}

TEST(Cli, EncryptDecryptRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(301);
  put(dir / "k.bin", random_bytes(rng, 32));
  put(dir / "n.bin", random_bytes(rng, 12));
  const auto msg = random_bytes(rng, 200001);
  put(dir / "f", msg);
  put(dir / "raw", random_bytes(rng, 1000));
  ASSERT_EQ(cli("qrn init --from " + q(dir / "raw") + " --out " + q(dir / "p.qrnp")).status, 0);
  auto r = cli("material derive --rounds 8 --pool " + q(dir / "p.qrnp") + " --out " + q(dir / "s.bin"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(QrnPool::open(dir / "p.qrnp").cursor_bytes(), session_budget(8));

  const std::string common = " --rounds 8 --key " + q(dir / "k.bin") + " --nonce " + q(dir / "n.bin") +
                             " --material " + q(dir / "s.bin");
  ASSERT_EQ(cli("encrypt" + common + " --in " + q(dir / "f") + " --out " + q(dir / "f.enc")).status, 0);
  ASSERT_EQ(cli("decrypt" + common + " --parallel --in " + q(dir / "f.enc") + " --out " + q(dir / "f.dec")).status, 0);
  EXPECT_NE(read_file(dir / "f.enc"), msg);
  EXPECT_EQ(read_file(dir / "f.dec"), msg);

  // Same material file, wrong round count.
  r = cli("encrypt --rounds 12 --key " + q(dir / "k.bin") + " --nonce " + q(dir / "n.bin") + " --material " +
          q(dir / "s.bin") + " --in " + q(dir / "f") + " --out " + q(dir / "x"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("MaskCountMismatch"), std::string::npos);

  put(dir / "bad.bin", {1, 2, 3});
  r = cli("encrypt --rounds 8 --key " + q(dir / "k.bin") + " --nonce " + q(dir / "n.bin") + " --material " +
          q(dir / "bad.bin") + " --in " + q(dir / "f") + " --out " + q(dir / "x"));
  EXPECT_EQ(r.status, 3);
  EXPECT_EQ(cli("encrypt" + common + " --in " + q(dir / "missing") + " --out " + q(dir / "x")).status, 3);
}

TEST(Cli, PoolExhaustion) {
  TempDir dir;
  put(dir / "raw", std::vector<std::uint8_t>(100, 7));
  ASSERT_EQ(cli("qrn init --from " + q(dir / "raw") + " --out " + q(dir / "p.qrnp")).status, 0);
  EXPECT_EQ(cli("material derive -r 8 --pool " + q(dir / "p.qrnp") + " --out " + q(dir / "a")).status, 0);
  const auto r = cli("material derive -r 8 --pool " + q(dir / "p.qrnp") + " --out " + q(dir / "b"));
  EXPECT_EQ(r.status, 4) << r.out;
  EXPECT_EQ(QrnPool::open(dir / "p.qrnp").cursor_bytes(), 80u);
  // init refuses to clobber a pool, which would reset its cursor.
  EXPECT_EQ(cli("qrn init --from " + q(dir / "raw") + " --out " + q(dir / "p.qrnp")).status, 3);
}

TEST(Cli, QrnStatus) {
  TempDir dir;
  put(dir / "raw", std::vector<std::uint8_t>(500, 1));
  ASSERT_EQ(cli("qrn init --from " + q(dir / "raw") + " --out " + q(dir / "p.qrnp")).status, 0);
  const auto r = cli("qrn status --format json --pool " + q(dir / "p.qrnp"));
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["total_bytes"], 500);
  EXPECT_EQ(doc["cursor_bytes"], 0);
  put(dir / "junk", {'N', 'O', 'P', 'E'});
  EXPECT_EQ(cli("qrn status --pool " + q(dir / "junk")).status, 3);
}

TEST(Cli, QrnFetchAgainstStubServer) {
  httplib::Server server;
  std::vector<std::uint8_t> served;
  server.Get("/qrng", [&](const httplib::Request& req, httplib::Response& res) {
    const auto n = std::stoul(req.get_param_value("bytes"));
    std::mt19937_64 rng(n);
    served = random_bytes(rng, n);
    std::string body;
    char hex[3];
    for (auto b : served) {
      std::snprintf(hex, sizeof hex, "%02x", b);
      body += hex;
    }
    res.set_content(body, "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  TempDir dir;
  const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/qrng";
  auto r = cli("qrn fetch --endpoint " + url + " --bytes 4096 --out " + q(dir / "pool.qrnp"));
  EXPECT_EQ(r.status, 0) << r.out;
  const auto pool = QrnPool::open(dir / "pool.qrnp");
  EXPECT_EQ(pool.total_bytes(), 4096u);
  EXPECT_EQ(pool.cursor_bytes(), 0u);
  EXPECT_TRUE(std::equal(served.begin(), served.end(), pool.payload().begin()));

  // Endpoint from the environment.
  const std::string env = "QRECHACHA_QRN_ENDPOINT=" + url + " ";
  const std::string cmd = env + QRECHACHA_CLI + " material derive -r 20 --remote --out " + q(dir / "m2.bin") + " 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_EQ(session_parse(read_file(dir / "m2.bin")).rounds(), 20);

  server.stop();
  t.join();
  r = cli("qrn fetch --endpoint " + url + " --bytes 16 --out " + q(dir / "x.qrnp"));
  EXPECT_EQ(r.status, 3) << r.out;
  EXPECT_NE(r.out.find("NetworkFailure"), std::string::npos);
}

TEST(Cli, KeystreamSingleAndManifestReplay) {
  TempDir dir;
  ASSERT_EQ(cli("keystream -n 1 -l 512 --deterministic-qrn 4 --seed 9 --out " + q(dir / "one.bin")).status, 0);
  EXPECT_EQ(read_file(dir / "one.bin").size(), 64u);

  auto r = cli("keystream -n 6 -l 10000 --deterministic-qrn 4 --seed 9 --out-dir " + q(dir / "a"));
  ASSERT_EQ(r.status, 0) << r.out;
  ASSERT_EQ(cli("keystream --replay " + q(dir / "a" / "manifest.json") + " --out-dir " + q(dir / "b")).status, 0);
  for (int i = 0; i < 6; ++i) {
    const std::string name = "seq_0000" + std::to_string(i) + ".bin";
    const auto a = read_file(dir / "a" / name);
    EXPECT_EQ(a.size(), 1250u);
    EXPECT_EQ(a, read_file(dir / "b" / name));
  }
  // Different keys per sequence; same seed for a single sequence gives sequence 0.
  EXPECT_NE(read_file(dir / "a" / "seq_00000.bin"), read_file(dir / "a" / "seq_00001.bin"));
  const auto first = read_file(dir / "a" / "seq_00000.bin");
  const auto one = read_file(dir / "one.bin");
  EXPECT_TRUE(std::equal(one.begin(), one.end(), first.begin()));

  std::ifstream in(dir / "a" / "manifest.json");
  const auto m = nlohmann::json::parse(in);
  EXPECT_EQ(m["seed"], "9");
  EXPECT_EQ(m["is_quantum"], false);
  EXPECT_FALSE(m.contains("debug_keys"));
}

TEST(Cli, DebugKeysAreEncrypted) {
  TempDir dir;
  EXPECT_EQ(cli("keystream -n 2 -l 64 --deterministic-qrn 1 --debug-keys --out-dir " + q(dir / "x")).status, 2);
  EXPECT_FALSE(std::filesystem::exists(dir / "x" / "seq_00000.bin"));

  std::mt19937_64 rng(5);
  const auto wrap = random_bytes(rng, 32);
  put(dir / "w", wrap);
  ASSERT_EQ(cli("keystream -n 2 -l 64 --deterministic-qrn 1 --seed 3 --debug-keys --wrap-key " + q(dir / "w") +
                " --out-dir " + q(dir / "x"))
                .status,
            0);
  std::ifstream in(dir / "x" / "manifest.json");
  const auto m = nlohmann::json::parse(in);
  const auto sealed = decode_response(m["debug_keys"]["ciphertext"], ResponseDecoding::hex);
  ASSERT_EQ(sealed.size(), 2u * 44u);
  CipherParams p;
  p.key = key_from_bytes(wrap);
  p.nonce = nonce_from_bytes(decode_response(m["debug_keys"]["nonce"], ResponseDecoding::hex));
  p.rounds = 20;
  const auto plain = chacha_xor_stream(p, sealed);

  // The unwrapped key/nonce of sequence 0 regenerate its file.
  CipherParams s;
  s.key = key_from_bytes(std::span(plain).subspan(0, 32));
  s.nonce = nonce_from_bytes(std::span(plain).subspan(32, 12));
  s.rounds = 8;
  const auto material = session_parse(decode_response(m["material"], ResponseDecoding::hex));
  EXPECT_EQ(xor_stream(s, material, std::vector<std::uint8_t>(8, 0)), read_file(dir / "x" / "seq_00000.bin"));
}

TEST(Cli, BatteryReportAndFailureStatus) {
  TempDir dir;
  auto r = cli("test --suite both --sequences 10 --bits 20000 --seed 1 --report " + q(dir / "out.json"));
  ASSERT_TRUE(r.status == 0 || r.status == 5) << r.out;
  std::ifstream in(dir / "out.json");
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["kind"], "randomness_battery");
  EXPECT_EQ(doc["is_quantum"], false);
  EXPECT_EQ(doc["tests"].size(), 27u);
  EXPECT_EQ(doc["sequences"], 10);

  std::filesystem::create_directories(dir / "zeros");
  for (int i = 0; i < 5; ++i) put(dir / "zeros" / ("z" + std::to_string(i) + ".bin"), std::vector<std::uint8_t>(2500, 0));
  r = cli("test --suite nist --bits 20000 --input " + q(dir / "zeros") + " --format csv");
  EXPECT_EQ(r.status, 5);
  EXPECT_NE(r.out.find("nist.frequency"), std::string::npos);
}

TEST(Cli, AnalysisAndBench) {
  auto r = cli("avalanche --trials 1000 --deterministic-qrn 2 --format json");
  ASSERT_EQ(r.status, 0) << r.out;
  auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["is_quantum"], false);
  EXPECT_NEAR(doc["mean_flip_fraction"].get<double>(), 0.5, 0.01);

  r = cli("diffprob --rounds 2 --input-diff 12:0 --output-diff 12:0 --samples 10000 --mode resampled --format json");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(cli("diffprob --rounds 3 --input-diff 0:0 --output-diff 0:0 --mode resampled").status, 2);
  EXPECT_EQ(cli("diffprob --input-diff 0:32 --output-diff 0:0 --mode resampled").status, 2);

  r = cli("bench --sizes 0.5 1 --ciphers ChaCha8 QRE-ChaCha8 --format csv");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("cipher,rounds,bytes,reps,mean_s,mbps"), std::string::npos);
  EXPECT_EQ(cli("bench --sizes 1 --ciphers Salsa20").status, 2);
}
