#pragma once

#include <array>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "qmadapt/errors.hpp"

namespace qmadapt {

inline constexpr std::string_view kHashAlgorithm = "sha256";

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("hash", "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

/// "sha256:<hex>" over the given canonical bytes.
inline std::string content_hash(std::string_view canonical_bytes) {
  return std::string(kHashAlgorithm) + ":" + sha256_hex(canonical_bytes);
}

}  // namespace qmadapt
