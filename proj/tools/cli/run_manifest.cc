#include "run_manifest.h"

#include <openssl/evp.h>

#include <array>
#include <fstream>

#include "cogspeech/common/error.h"
#include "json.hpp"

namespace cogspeech::cli {
namespace {

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr); }
  ~Digest() { EVP_MD_CTX_free(ctx_); }
  Digest(const Digest&) = delete;
  Digest& operator=(const Digest&) = delete;

  void Update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
  std::string Hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 0xF];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string Sha256Hex(std::string_view data) {
  Digest d;
  d.Update(data.data(), data.size());
  return d.Hex();
}

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  Digest d;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    d.Update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.Hex();
}

std::string RunManifestToJson(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["subcommand"] = m.subcommand;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["config_sha256"] = m.config_sha256;
  j["seed"] = m.seed;
  auto files = [](const auto& list) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& [p, h] : list) a.push_back({{"path", p}, {"sha256", h}});
    return a;
  };
  j["inputs"] = files(m.inputs);
  j["outputs"] = files(m.outputs);
  return j.dump(2) + "\n";
}

RunManifest ParseRunManifest(std::string_view text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.config_sha256 = j.at("config_sha256").get<std::string>();
    m.seed = j.at("seed").get<long long>();
    for (const auto& f : j.at("inputs")) {
      m.inputs.emplace_back(f.at("path").get<std::string>(), f.at("sha256").get<std::string>());
    }
    for (const auto& f : j.at("outputs")) {
      m.outputs.emplace_back(f.at("path").get<std::string>(), f.at("sha256").get<std::string>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run manifest: ") + e.what(), 1);
  }
}

}  // namespace cogspeech::cli
