#pragma once

// Logistic-map stream cipher.
//
// A teaching artifact for measuring diffusion and key sensitivity, not a cryptosystem.
// Maps over the reals are awkward to realize in hardware, and this construction has never
// been through standard cryptanalysis. Nothing here carries a security guarantee.
// Keystreams are reproducible only where doubles round to nearest-even without extended
// intermediate precision.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chaoscope/error.hpp"

namespace chaoscope::cipher {

inline constexpr std::uint32_t kDefaultWarmup = 1000;
inline constexpr std::uint32_t kMinWarmup = 256;

/// Secret parameters: map parameter, initial condition, and transient length.
struct ChaosKey {
  double mu = 3.9;
  double x0 = 0.2;
  std::uint32_t warmup = kDefaultWarmup;

  void validate() const {
    if (!(mu > 3.57 && mu <= 4.0)) throw DomainError("cipher key: mu must lie in (3.57, 4]");
    if (!(x0 > 0.0 && x0 < 1.0)) throw DomainError("cipher key: x0 must lie in (0, 1)");
    if (x0 == 0.5) throw DomainError("cipher key: x0 = 0.5 is excluded");
    if (x0 == 1.0 - 1.0 / mu) throw DomainError("cipher key: x0 is the map's fixed point");
    if (warmup < kMinWarmup) throw DomainError("cipher key: warmup must be at least 256");
  }
};

namespace detail {

inline double logistic(double mu, double x) { return mu * x * (1.0 - x); }

/// True when the orbits from a and b coincide at some iterate within `steps` iterations.
inline bool orbits_merge(double mu, double a, double b, std::uint32_t steps) {
  for (std::uint32_t i = 0; i < steps; ++i) {
    a = logistic(mu, a);
    b = logistic(mu, b);
    if (a == b) return true;
  }
  return false;
}

class Orbit {
 public:
  explicit Orbit(const ChaosKey& key) : mu_(key.mu), x_(key.x0) {}

  double next() {
    const double y = logistic(mu_, x_);
    ++index_;
    if (y == 0.0 || y == x_) {
      throw DegenerateOrbit("logistic keystream orbit degenerated at iterate " + std::to_string(index_));
    }
    x_ = y;
    return y;
  }

 private:
  double mu_;
  double x_;
  std::size_t index_ = 0;
};

}  // namespace detail

/// Low byte of floor(x * 2^32) of each post-warmup iterate.
inline std::uint8_t extract_byte(double x) {
  return static_cast<std::uint8_t>(static_cast<std::uint64_t>(x * 4294967296.0) & 0xffu);
}

inline std::vector<std::uint8_t> keystream(const ChaosKey& key, std::size_t n) {
  key.validate();
  std::vector<std::uint8_t> out;
  out.reserve(n);
  if (n == 0) return out;
  detail::Orbit orbit(key);
  for (std::uint32_t i = 0; i < key.warmup; ++i) orbit.next();
  for (std::size_t i = 0; i < n; ++i) out.push_back(extract_byte(orbit.next()));
  return out;
}

inline std::vector<std::uint8_t> encrypt(const ChaosKey& key, std::span<const std::uint8_t> plaintext) {
  const std::vector<std::uint8_t> ks = keystream(key, plaintext.size());
  std::vector<std::uint8_t> out(plaintext.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = plaintext[i] ^ ks[i];
  return out;
}

inline std::vector<std::uint8_t> decrypt(const ChaosKey& key, std::span<const std::uint8_t> ciphertext) {
  return encrypt(key, ciphertext);
}

/// Fraction of differing bits between two equal-length byte strings.
inline double bit_difference(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw DimensionMismatch("bit_difference: lengths differ");
  if (a.empty()) return 0.0;
  std::size_t ones = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ones += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return static_cast<double>(ones) / (8.0 * static_cast<double>(a.size()));
}

inline double keystream_difference(const ChaosKey& a, const ChaosKey& b, std::size_t n_bytes) {
  return bit_difference(keystream(a, n_bytes), keystream(b, n_bytes));
}

inline double ones_fraction(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return 0.0;
  std::size_t ones = 0;
  for (auto v : bytes) ones += std::popcount(static_cast<unsigned>(v));
  return static_cast<double>(ones) / (8.0 * static_cast<double>(bytes.size()));
}

/// Mean XOR bit fraction between the key's keystream and those of keys whose x0 is moved by
/// one unit in the last place, alternately up and down, accumulating across trials.
///
/// A one-ulp move of x0 can be absorbed by rounding: with mu = 3.9, x0 = 0.2 + 1 ulp has the
/// same first iterate as 0.2. A key whose orbit joins the base orbit during warmup is the same
/// key in effect and yields the identical keystream, so the walk keeps stepping in the same
/// direction past such keys. Excluded initial conditions are skipped too.
inline double avalanche_test(const ChaosKey& key, std::size_t n_bytes, std::size_t trials) {
  key.validate();
  if (n_bytes < 1024) throw DomainError("avalanche_test: n_bytes must be at least 1024");
  if (trials < 8) throw DomainError("avalanche_test: trials must be at least 8");
  const std::vector<std::uint8_t> base = keystream(key, n_bytes);
  auto distinct = [&](double x) {
    return x > 0.0 && x < 1.0 && x != 0.5 && x != 1.0 - 1.0 / key.mu &&
           !detail::orbits_merge(key.mu, key.x0, x, key.warmup);
  };
  double total = 0.0;
  double up = key.x0, down = key.x0;
  for (std::size_t t = 0; t < trials; ++t) {
    ChaosKey moved = key;
    if (t % 2 == 0) {
      do up = std::nextafter(up, 1.0);
      while (!distinct(up));
      moved.x0 = up;
    } else {
      do down = std::nextafter(down, 0.0);
      while (!distinct(down));
      moved.x0 = down;
    }
    total += bit_difference(base, keystream(moved, n_bytes));
  }
  return total / static_cast<double>(trials);
}

// ---------------------------------------------------------------------------
// Container: "CHX1", u8 version = 1, u32 warmup, u64 payload length, payload.
// Little-endian. mu and x0 are never stored.

inline constexpr std::array<std::uint8_t, 4> kContainerMagic{'C', 'H', 'X', '1'};
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeader = 4 + 1 + 4 + 8;

struct Container {
  std::uint32_t warmup = kDefaultWarmup;
  std::vector<std::uint8_t> payload;
};

inline std::vector<std::uint8_t> serialize_container(const Container& c) {
  std::vector<std::uint8_t> out(kContainerMagic.begin(), kContainerMagic.end());
  out.push_back(kContainerVersion);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(c.warmup >> (8 * i)));
  const auto len = static_cast<std::uint64_t>(c.payload.size());
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), c.payload.begin(), c.payload.end());
  return out;
}

inline Container parse_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kContainerHeader || !std::equal(kContainerMagic.begin(), kContainerMagic.end(), bytes.begin())) {
    throw FormatError("not a CHX1 container");
  }
  if (bytes[4] != kContainerVersion) throw FormatError("unsupported CHX1 version " + std::to_string(bytes[4]));
  Container c;
  c.warmup = 0;
  for (int i = 0; i < 4; ++i) c.warmup |= static_cast<std::uint32_t>(bytes[5 + i]) << (8 * i);
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(bytes[9 + i]) << (8 * i);
  if (len != bytes.size() - kContainerHeader) {
    throw FormatError("CHX1 payload length " + std::to_string(len) + " does not match file size");
  }
  c.payload.assign(bytes.begin() + kContainerHeader, bytes.end());
  return c;
}

}  // namespace chaoscope::cipher
