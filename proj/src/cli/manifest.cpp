#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "headmotion/error.hpp"

namespace hm::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

Manifest::Manifest(std::string command) : command_(std::move(command)) {}

void Manifest::add_input(const std::filesystem::path& path) { inputs_.push_back(path); }
void Manifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

Json Manifest::to_json() const {
  auto files = [](const std::vector<std::filesystem::path>& paths) {
    Json arr = Json::array();
    for (const auto& p : paths) {
      arr.push_back({{"file", p.filename().string()}, {"sha256", sha256_file(p)}});
    }
    return arr;
  };
  Json j;
  j["manifest_version"] = 1;
  j["tool"] = "headmotion";
  j["command"] = command_;
  j["params"] = params_;
  j["inputs"] = files(inputs_);
  j["outputs"] = files(outputs_);
  return j;
}

std::filesystem::path Manifest::write(const std::filesystem::path& dir) const {
  const auto path = dir / (command_ + ".manifest.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
  return path;
}

}  // namespace hm::cli
