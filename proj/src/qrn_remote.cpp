#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "qrechacha/error.hpp"
#include "qrechacha/qrn.hpp"

namespace qrechacha {

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

Url split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/?#]+)([^#]*)$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re))
    throw Error(Errc::param, "QRN endpoint is not an http(s) URL: '" + url + "'");
  Url u{m[1].str(), m[2].str()};
  if (u.target.empty()) u.target = "/";
  return u;
}

std::string request_target(const std::string& target, std::size_t nbytes) {
  const std::string n = std::to_string(nbytes);
  const std::string placeholder = "{bytes}";
  if (auto pos = target.find(placeholder); pos != std::string::npos) {
    std::string t = target;
    do {
      t.replace(pos, placeholder.size(), n);
      pos = t.find(placeholder, pos + n.size());
    } while (pos != std::string::npos);
    return t;
  }
  return target + (target.find('?') == std::string::npos ? "?" : "&") + "bytes=" + n;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

ResponseDecoding parse_decoding(const std::string& text) {
  if (text == "hex") return ResponseDecoding::hex;
  if (text == "raw") return ResponseDecoding::raw;
  throw Error(Errc::param, "unknown QRN response decoding '" + text + "' (hex|raw)");
}

RemoteConfig load_remote_config(const std::filesystem::path& config_file) {
  RemoteConfig cfg;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw Error(Errc::io, "cannot open QRN config '" + config_file.string() + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::param, "QRN config '" + config_file.string() + "': " + e.what());
    }
    cfg.endpoint = j.value("endpoint", cfg.endpoint);
    if (j.contains("decoding")) cfg.decoding = parse_decoding(j["decoding"].get<std::string>());
    cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
  }
  if (const char* env = std::getenv("QRECHACHA_QRN_ENDPOINT"); env && *env)
    cfg.endpoint = env;
  if (const char* env = std::getenv("QRECHACHA_QRN_DECODING"); env && *env)
    cfg.decoding = parse_decoding(env);
  return cfg;
}

std::vector<std::uint8_t> decode_response(const std::string& body,
                                          ResponseDecoding decoding) {
  if (decoding == ResponseDecoding::raw) return {body.begin(), body.end()};

  std::string digits;
  digits.reserve(body.size());
  for (char c : body) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (hex_value(c) < 0)
      throw Error(Errc::decode, std::string("non-hex character '") + c + "' in QRNG response");
    digits.push_back(c);
  }
  if (digits.size() % 2 != 0)
    throw Error(Errc::decode, "QRNG hex response has an odd number of digits");
  std::vector<std::uint8_t> out(digits.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(hex_value(digits[2 * i]) << 4 | hex_value(digits[2 * i + 1]));
  return out;
}

std::vector<std::uint8_t> fetch_remote(const RemoteConfig& config, std::size_t nbytes) {
  if (config.endpoint.empty())
    throw Error(Errc::param, "no QRN endpoint configured (QRECHACHA_QRN_ENDPOINT)");
  const Url url = split_url(config.endpoint);

  httplib::Client client(url.origin);
  client.set_connection_timeout(config.timeout_seconds, 0);
  client.set_read_timeout(config.timeout_seconds, 0);
  client.set_follow_location(true);

  auto res = client.Get(request_target(url.target, nbytes));
  if (!res)
    throw Error(Errc::network, "QRNG request to " + url.origin + " failed: " +
                                   httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(Errc::network, "QRNG endpoint answered HTTP " + std::to_string(res->status));

  auto bytes = decode_response(res->body, config.decoding);
  if (bytes.size() < nbytes)
    throw Error(Errc::short_response, "QRNG returned " + std::to_string(bytes.size()) +
                                          " of " + std::to_string(nbytes) + " bytes");
  bytes.resize(nbytes);
  return bytes;
}

}  // namespace qrechacha
