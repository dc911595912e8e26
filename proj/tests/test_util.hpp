#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

#include "chaoscope/compression.hpp"

namespace chaoscope::testing {

// Horizontal ramp: value = round(255 x / (w - 1)).
inline GrayImage ramp_image(std::size_t w = 64, std::size_t h = 64) {
  GrayImage img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(x) / static_cast<double>(w - 1)));
    }
  }
  return img;
}

inline GrayImage blob_image(std::size_t w = 64, std::size_t h = 64, double sigma = 12.0) {
  GrayImage img(w, h);
  const double cx = (static_cast<double>(w) - 1.0) / 2.0, cy = (static_cast<double>(h) - 1.0) / 2.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma))));
    }
  }
  return img;
}

// 16-pixel checkerboard smoothed by a Gaussian of width 2 pixels (clamped edges).
inline GrayImage blurred_checkerboard(std::size_t w = 64, std::size_t h = 64) {
  std::vector<double> raw(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) raw[y * w + x] = ((x / 16 + y / 16) % 2) ? 255.0 : 0.0;
  }
  const int radius = 6;
  const double sigma = 2.0;
  std::vector<double> kernel;
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel.push_back(std::exp(-i * i / (2 * sigma * sigma)));
    norm += kernel.back();
  }
  for (auto& k : kernel) k /= norm;
  auto clampi = [](long v, long hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
  std::vector<double> tmp(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * raw[y * w + clampi(static_cast<long>(x) + i, static_cast<long>(w) - 1)];
      }
      tmp[y * w + x] = acc;
    }
  }
  GrayImage img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp[clampi(static_cast<long>(y) + i, static_cast<long>(h) - 1) * w + x];
      }
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(acc));
    }
  }
  return img;
}

inline GrayImage random_image(std::size_t w, std::size_t h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(dist(rng));
  return img;
}

inline constexpr std::int64_t kBruteUnit = 252;

// Exhaustive search over every domain, isometry, quantized scale and quantized offset. Error is
// evaluated from moment sums, so every lattice point is visited with no pruning.
inline PifsCode brute_force_encode(const GrayImage& img, std::size_t R, std::size_t step, int s_limit) {
  PifsCode code{img.width, img.height, R, {}};
  const std::size_t n = R * R;
  for (std::size_t ry = 0; ry < img.height; ry += R) {
    for (std::size_t rx = 0; rx < img.width; rx += R) {
      std::vector<std::int64_t> r(n);
      for (std::size_t y = 0; y < R; ++y)
        for (std::size_t x = 0; x < R; ++x) r[y * R + x] = img.at(rx + x, ry + y);
      using Key = std::tuple<std::int64_t, std::size_t, std::size_t, unsigned, int, int, int>;
      Key best{std::numeric_limits<std::int64_t>::max(), 0, 0, 0, 0, 0, 0};
      for (std::size_t dy = 0; dy + 2 * R <= img.height; dy += step) {
        for (std::size_t dx = 0; dx + 2 * R <= img.width; dx += step) {
          std::vector<std::int64_t> d(n);
          for (std::size_t y = 0; y < R; ++y) {
            for (std::size_t x = 0; x < R; ++x) {
              const std::size_t sx = dx + 2 * x, sy = dy + 2 * y;
              d[y * R + x] = img.at(sx, sy) + img.at(sx + 1, sy) + img.at(sx, sy + 1) + img.at(sx + 1, sy + 1);
            }
          }
          for (unsigned iso = 0; iso < 8; ++iso) {
            std::int64_t sd = 0, sdd = 0, sr = 0, srr = 0, sdr = 0;
            for (std::size_t y = 0; y < R; ++y) {
              for (std::size_t x = 0; x < R; ++x) {
                const std::int64_t dv = d[isometry_index(iso, x, y, R)], rv = r[y * R + x];
                sd += dv;
                sdd += dv * dv;
                sr += rv;
                srr += rv * rv;
                sdr += dv * rv;
              }
            }
            const auto nn = static_cast<std::int64_t>(n);
            for (int s = -s_limit; s <= s_limit; ++s) {
              for (int o = -255; o <= 255; ++o) {
                // sum (s d + kBruteUnit o - kBruteUnit r)^2
                const std::int64_t e = s * s * sdd + nn * kBruteUnit * kBruteUnit * o * o + kBruteUnit * kBruteUnit * srr + 2 * s * kBruteUnit * o * sd -
                                       2 * s * kBruteUnit * sdr - 2 * kBruteUnit * kBruteUnit * o * sr;
                const Key k{e, dy, dx, iso, s < 0 ? -s : s, s, o};
                if (k < best) best = k;
              }
            }
          }
        }
      }
      code.transforms.push_back(RangeTransform{static_cast<std::uint16_t>(std::get<2>(best)),
                                               static_cast<std::uint16_t>(std::get<1>(best)),
                                               static_cast<std::uint8_t>(std::get<3>(best)),
                                               static_cast<std::int8_t>(std::get<5>(best)),
                                               static_cast<std::int16_t>(std::get<6>(best))});
    }
  }
  return code;
}

}  // namespace chaoscope::testing
