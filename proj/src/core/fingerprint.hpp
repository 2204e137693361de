#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "hash.hpp"

namespace zeroday {

// Streaming FNV-1a fingerprint; rendered as 16 hex chars.
class Fingerprinter {
 public:
  Fingerprinter& add_bytes(const void* p, std::size_t n) {
    h_ = fnv1a64({static_cast<const char*>(p), n}, h_);
    return *this;
  }

  Fingerprinter& add(std::string_view s) {
    add_u64(s.size());
    return add_bytes(s.data(), s.size());
  }

  Fingerprinter& add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return add_u64(bits);
  }

  Fingerprinter& add_u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return add_bytes(b, 8);
  }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) {
      out[15 - i] = digits[(h_ >> (4 * i)) & 0xf];
    }
    return out;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

// Identity of the data a transform or model was fitted on.
struct DataFingerprint {
  std::string hash;
  std::size_t rows = 0;

  bool operator==(const DataFingerprint&) const = default;
};

}  // namespace zeroday
