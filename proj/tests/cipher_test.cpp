#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "chaoscope/cipher.hpp"

namespace chaoscope::cipher {
namespace {

const std::vector<std::uint8_t> kGolden{234, 102, 81, 13, 209, 173, 176, 196, 26, 84, 251, 157, 184, 246, 219, 231};

std::vector<std::uint8_t> random_bytes(std::size_t n, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(d(rng));
  return out;
}

TEST(Keystream, GoldenVector) {
  EXPECT_EQ(keystream(ChaosKey{3.9, 0.2, 1000}, 16), kGolden);
}

TEST(Keystream, MatchesStraightLineRule) {
  double x = 0.2;
  for (int i = 0; i < 1000; ++i) x = 3.9 * x * (1.0 - x);
  std::vector<std::uint8_t> expect;
  for (int i = 0; i < 4096; ++i) {
    x = 3.9 * x * (1.0 - x);
    expect.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(std::floor(x * 4294967296.0)) % 256));
  }
  EXPECT_EQ(keystream(ChaosKey{}, 4096), expect);
}

TEST(Keystream, EmptyRequest) { EXPECT_TRUE(keystream(ChaosKey{}, 0).empty()); }

TEST(Keystream, WarmupShiftsByOne) {
  const auto a = keystream(ChaosKey{3.9, 0.2, 1000}, 257);
  const auto b = keystream(ChaosKey{3.9, 0.2, 1001}, 256);
  EXPECT_TRUE(std::equal(b.begin(), b.end(), a.begin() + 1));
}

TEST(Keystream, PrefixProperty) {
  const ChaosKey key{3.97, 0.123, 300};
  const auto full = keystream(key, 5000);
  for (std::size_t n : {0u, 1u, 17u, 4999u}) {
    const auto part = keystream(key, n);
    EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
  }
}

TEST(Keystream, MonobitBalance) {
  EXPECT_GE(ones_fraction(keystream(ChaosKey{}, 100000)), 0.49);
  EXPECT_LE(ones_fraction(keystream(ChaosKey{}, 100000)), 0.51);
}

TEST(Keystream, UlpSensitivity) {
  // One-ulp neighbours of x0 and mu, over several keys. An x0 neighbour whose orbit joins the
  // base orbit during warmup is the same key in effect; every other neighbour decorrelates.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::size_t distinct = 0;
  for (int k = 0; k < 6; ++k) {
    const ChaosKey base{3.9, k == 0 ? 0.2 : u(rng), 1000};
    const auto ks = keystream(base, 4096 + 64);
    std::vector<ChaosKey> neighbours;
    for (double dir : {0.0, 1.0}) {
      ChaosKey mx = base, mm = base;
      mx.x0 = std::nextafter(base.x0, dir);
      mm.mu = std::nextafter(base.mu, dir * 4.0);
      neighbours.push_back(mx);
      neighbours.push_back(mm);
    }
    for (const ChaosKey& other : neighbours) {
      const auto ko = keystream(other, 4096 + 64);
      if (other.mu == base.mu && detail::orbits_merge(base.mu, base.x0, other.x0, base.warmup)) {
        EXPECT_EQ(ko, ks);
        continue;
      }
      ++distinct;
      const double frac = bit_difference(std::span(ks).subspan(64), std::span(ko).subspan(64));
      EXPECT_GE(frac, 0.45) << base.x0 << " " << other.x0 << " " << other.mu;
      EXPECT_LE(frac, 0.55) << base.x0 << " " << other.x0 << " " << other.mu;
    }
  }
  EXPECT_GE(distinct, 18u);
}

TEST(Keystream, AbsorbedUlpStepIsAnEquivalentKey) {
  ChaosKey up{};
  up.x0 = std::nextafter(up.x0, 1.0);
  EXPECT_TRUE(detail::orbits_merge(up.mu, ChaosKey{}.x0, up.x0, 1));
  EXPECT_EQ(keystream(up, 256), keystream(ChaosKey{}, 256));
}

TEST(Keystream, DegenerateOrbitDetected) {
  ChaosKey fixed{3.9, 1.0 - 1.0 / 3.9, 300};
  EXPECT_THROW(fixed.validate(), DomainError);
  EXPECT_THROW(keystream(ChaosKey{4.0, 0.75, 300}, 1), DomainError);
  // 0.25 -> 0.75, which is fixed under mu = 4.
  EXPECT_THROW(keystream(ChaosKey{4.0, 0.25, 300}, 1), DegenerateOrbit);
}

TEST(Key, Validation) {
  EXPECT_NO_THROW(ChaosKey{}.validate());
  EXPECT_THROW((ChaosKey{3.5, 0.2, 1000}.validate()), DomainError);
  EXPECT_THROW((ChaosKey{4.1, 0.2, 1000}.validate()), DomainError);
  EXPECT_THROW((ChaosKey{3.9, 0.0, 1000}.validate()), DomainError);
  EXPECT_THROW((ChaosKey{3.9, 1.0, 1000}.validate()), DomainError);
  EXPECT_THROW((ChaosKey{3.9, 0.5, 1000}.validate()), DomainError);
  EXPECT_THROW((ChaosKey{3.9, 0.2, 255}.validate()), DomainError);
  EXPECT_NO_THROW((ChaosKey{4.0, 0.3, 256}.validate()));
}

TEST(Encrypt, Basics) {
  const ChaosKey key{};
  EXPECT_TRUE(encrypt(key, {}).empty());
  EXPECT_TRUE(decrypt(key, {}).empty());
  const std::vector<std::uint8_t> zeros(64, 0);
  EXPECT_EQ(encrypt(key, zeros), keystream(key, 64));
  EXPECT_EQ(decrypt(key, keystream(key, 64)), zeros);
}

TEST(Encrypt, InvolutionOnRandomMessages) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::size_t> len(0, 2048);
  std::uniform_real_distribution<double> mu(3.6, 4.0), x0(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const ChaosKey key{mu(rng), x0(rng), 256 + static_cast<std::uint32_t>(trial)};
    const auto msg = random_bytes(len(rng), rng);
    const auto ct = encrypt(key, msg);
    ASSERT_EQ(ct.size(), msg.size());
    ASSERT_EQ(decrypt(key, ct), msg);
  }
}

TEST(Encrypt, WrongKeyGarbles) {
  std::mt19937 rng(8);
  const auto msg = random_bytes(1024, rng);
  const ChaosKey key{};
  ChaosKey wrong = key;
  wrong.x0 = key.x0 + 1e-15;
  ASSERT_NE(wrong.x0, key.x0);
  EXPECT_GE(bit_difference(decrypt(wrong, encrypt(key, msg)), msg), 0.45);
}

TEST(Avalanche, NearHalf) {
  const double f = avalanche_test(ChaosKey{}, 10240, 16);
  EXPECT_NEAR(f, 0.5, 0.05);
}

TEST(Avalanche, DifferenceMeasures) {
  const ChaosKey a{}, b{3.95, 0.31, 500};
  EXPECT_EQ(keystream_difference(a, a, 2048), 0.0);
  EXPECT_EQ(keystream_difference(a, b, 2048), keystream_difference(b, a, 2048));
  EXPECT_THROW(bit_difference(std::vector<std::uint8_t>(3), std::vector<std::uint8_t>(4)), DimensionMismatch);
  EXPECT_EQ(bit_difference(std::vector<std::uint8_t>{0x0f}, std::vector<std::uint8_t>{0x00}), 0.5);
}

TEST(Avalanche, Preconditions) {
  EXPECT_THROW(avalanche_test(ChaosKey{}, 1023, 16), DomainError);
  EXPECT_THROW(avalanche_test(ChaosKey{}, 2048, 7), DomainError);
}

TEST(Container, RoundTrip) {
  Container c{1234, {1, 2, 3, 250}};
  const auto bytes = serialize_container(c);
  ASSERT_EQ(bytes.size(), kContainerHeader + 4);
  EXPECT_EQ(bytes[0], 'C');
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 1234 & 0xff);
  EXPECT_EQ(bytes[6], 1234 >> 8);
  EXPECT_EQ(bytes[9], 4);
  const Container back = parse_container(bytes);
  EXPECT_EQ(back.warmup, 1234u);
  EXPECT_EQ(back.payload, c.payload);
}

TEST(Container, RejectsCorruption) {
  const auto good = serialize_container({1000, {9, 9, 9}});
  auto bad = good;
  bad[1] = 'Z';
  EXPECT_THROW(parse_container(bad), FormatError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(parse_container(bad), FormatError);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(parse_container(bad), FormatError);
  EXPECT_THROW(parse_container(std::vector<std::uint8_t>(5, 0)), FormatError);
}

}  // namespace
}  // namespace chaoscope::cipher
