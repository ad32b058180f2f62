#pragma once

// Digests and seeded randomness.
//
// All randomness in a run is derived from the single run seed plus a textual
// stream tag, so independent consumers (sentinels, auth trials, audit drops,
// covering-array tie-breaks) never share an engine. Only the raw engine
// output is used; std distributions are implementation-defined and would make
// reports differ between standard libraries.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "conform/errors.hpp"

namespace conform {

inline std::array<unsigned char, 32> sha256(std::string_view data) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw Error("sha256: digest computation failed");
  }
  return out;
}

inline std::string sha256_hex(std::string_view data) {
  static constexpr char kHex[] = "0123456789abcdef";
  const auto raw = sha256(data);
  std::string hex;
  hex.reserve(raw.size() * 2);
  for (unsigned char b : raw) {
    hex.push_back(kHex[b >> 4]);
    hex.push_back(kHex[b & 0x0f]);
  }
  return hex;
}

// Short digest used wherever secrets (passwords, sentinel bytes) would
// otherwise appear in a report.
inline std::string redact(std::string_view secret) {
  return "sha256:" + sha256_hex(secret).substr(0, 16);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::string_view stream) {
  const auto d = sha256(std::to_string(seed) + "/" + std::string(stream));
  std::uint64_t s = 0;
  for (int i = 0; i < 8; ++i) s = (s << 8) | d[i];
  return Engine(s);
}

// Uniform-enough index in [0, n); n must be > 0.
inline std::size_t pick_index(Engine& eng, std::size_t n) {
  return static_cast<std::size_t>(eng() % n);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_interval(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline std::string random_string(Engine& eng, std::string_view alphabet,
                                 std::size_t length) {
  std::string s;
  s.reserve(length);
  for (std::size_t i = 0; i < length; ++i)
    s.push_back(alphabet[pick_index(eng, alphabet.size())]);
  return s;
}

}  // namespace conform
