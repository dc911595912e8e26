#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "chaoscope/error.hpp"
#include "chaoscope/parallel.hpp"

namespace chaoscope {

/// 8-bit grayscale raster, row-major, row 0 on top; 0 = black, 255 = white.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {
    if (w == 0 || h == 0) throw DomainError("gray image dimensions must be positive");
  }

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Quantization of the gray-axis map v -> s * v + o.
inline constexpr int kScaleLevels = 63;  // s = s_q / 63
inline constexpr int kOffsetLimit = 255;

struct RangeTransform {
  std::uint16_t domain_x = 0;
  std::uint16_t domain_y = 0;
  std::uint8_t isometry = 0;  // element of the dihedral group of the square, 0..7
  std::int8_t s_q = 0;
  std::int16_t o_q = 0;

  double scale() const { return static_cast<double>(s_q) / kScaleLevels; }
  double offset() const { return static_cast<double>(o_q); }
  friend bool operator==(const RangeTransform&, const RangeTransform&) = default;
};

/// One transform per range block, row-major over the block grid.
struct PifsCode {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t range_size = 0;
  std::vector<RangeTransform> transforms;

  std::size_t blocks_x() const { return width / range_size; }
  std::size_t blocks_y() const { return height / range_size; }

  void validate() const {
    if (range_size == 0 || width == 0 || height == 0 || width % range_size != 0 || height % range_size != 0) {
      throw DimensionError("PIFS code dimensions must be positive multiples of the range size");
    }
    if (transforms.size() != blocks_x() * blocks_y()) {
      throw FormatError("PIFS code holds " + std::to_string(transforms.size()) + " transforms, expected " +
                        std::to_string(blocks_x() * blocks_y()));
    }
    for (const auto& t : transforms) {
      if (t.isometry > 7) throw FormatError("PIFS isometry out of range");
      if (t.domain_x + 2 * range_size > width || t.domain_y + 2 * range_size > height) {
        throw FormatError("PIFS domain block lies outside the image");
      }
      if (t.s_q < -kScaleLevels || t.s_q > kScaleLevels) throw FormatError("PIFS scale outside [-1, 1]");
      if (t.o_q < -kOffsetLimit || t.o_q > kOffsetLimit) throw FormatError("PIFS offset outside [-255, 255]");
    }
  }

  friend bool operator==(const PifsCode&, const PifsCode&) = default;
};

struct EncoderOptions {
  std::size_t range_size = 8;
  std::size_t domain_step = 8;
  double s_max = 1.0;
  unsigned threads = 0;
};

/// Source index inside an n x n block for destination (x, y) under dihedral element `iso`.
inline std::size_t isometry_index(unsigned iso, std::size_t x, std::size_t y, std::size_t n) {
  const std::size_t m = n - 1;
  switch (iso) {
    case 0: return y * n + x;
    case 1: return y * n + (m - x);            // mirror left-right
    case 2: return (m - y) * n + x;            // mirror top-bottom
    case 3: return (m - y) * n + (m - x);      // rotate 180
    case 4: return x * n + y;                  // transpose
    case 5: return x * n + (m - y);            // rotate 90
    case 6: return (m - x) * n + y;            // rotate 270
    default: return (m - x) * n + (m - y);     // anti-transpose
  }
}

namespace detail {

// Floor division for a positive divisor.
inline std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

// Nearest integer to num/den (den > 0); exact halves go down.
inline std::int64_t round_div(std::int64_t num, std::int64_t den) {
  const std::int64_t q = floor_div(num, den);
  const std::int64_t rem = num - q * den;
  return 2 * rem > den ? q + 1 : q;
}

// 2x2 sums of the 2n x 2n block at (x0, y0): values in [0, 1020], row-major n x n.
inline void domain_sums(const GrayImage& img, std::size_t x0, std::size_t y0, std::size_t n,
                        std::vector<std::int32_t>& out) {
  out.resize(n * n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t sx = x0 + 2 * x, sy = y0 + 2 * y;
      out[y * n + x] = img.at(sx, sy) + img.at(sx + 1, sy) + img.at(sx, sy + 1) + img.at(sx + 1, sy + 1);
    }
  }
}

// Prediction error is measured in units of 1/(4 * 63)^2 gray levels squared so that it is an
// exact integer: residual_i = s_q * d4_i + K o_q - K r_i with K = 252.
inline constexpr std::int64_t kErrorUnit = 4 * kScaleLevels;

struct Choice {
  std::int64_t error = std::numeric_limits<std::int64_t>::max();
  std::uint16_t dy = 0, dx = 0;
  std::uint8_t iso = 0;
  std::int32_t s = 0, o = 0;

  auto key() const { return std::make_tuple(error, dy, dx, iso, s < 0 ? -s : s, s, o); }
};

}  // namespace detail

/// Exact prediction error (in 1/252^2 gray-level^2 units) of approximating range block `r`
/// by s_q/63 * (2x2-mean of domain) + o_q. Used by tests and diagnostics.
inline std::int64_t transform_error(std::span<const std::int32_t> range_pixels,
                                    std::span<const std::int32_t> transformed_d4, std::int32_t s_q, std::int32_t o_q) {
  std::int64_t e = 0;
  for (std::size_t i = 0; i < range_pixels.size(); ++i) {
    const std::int64_t u = std::int64_t{s_q} * transformed_d4[i] + detail::kErrorUnit * o_q -
                           detail::kErrorUnit * range_pixels[i];
    e += u * u;
  }
  return e;
}

/// Partitioned-IFS encoder.
///
/// Each range block of side R is matched against every 2R x 2R domain block (stepped by
/// domain_step, averaged 2x2 down to R x R) under all eight isometries. For each candidate
/// the least-squares contrast s is clamped to [-s_max, s_max] and quantized; the search then
/// walks outward over neighbouring quantized s values, re-solving the best quantized offset
/// o for each, until the quadratic lower bound rules out any improvement. Errors are exact
/// integers, so the result is the optimum over the quantized lattice. Ties go to the lowest
/// (domain_y, domain_x, isometry, |s|, s, o).
inline PifsCode pifs_encode(const GrayImage& image, const EncoderOptions& opt = {}) {
  const std::size_t R = opt.range_size;
  if (R < 1 || R > 32) throw DomainError("pifs_encode: range_size must lie in [1, 32]");
  if (opt.domain_step == 0) throw DomainError("pifs_encode: domain_step must be positive");
  if (!(opt.s_max >= 0.0 && opt.s_max <= 1.0)) throw DomainError("pifs_encode: s_max must lie in [0, 1]");
  if (image.width == 0 || image.height == 0 || image.width % R != 0 || image.height % R != 0) {
    throw DimensionError("pifs_encode: image dimensions must be multiples of the range size");
  }
  if (image.width < 2 * R || image.height < 2 * R) throw ImageTooSmall("pifs_encode: no domain block fits");
  if (image.width > 65535 || image.height > 65535) throw DimensionError("pifs_encode: image exceeds 65535 pixels");

  const auto s_limit = static_cast<std::int32_t>(std::floor(opt.s_max * kScaleLevels + 1e-9));
  const std::size_t n = R * R;
  const auto n64 = static_cast<std::int64_t>(n);
  constexpr std::int64_t K = detail::kErrorUnit;

  struct Domain {
    std::uint16_t x, y;
    std::vector<std::int32_t> d4;
    std::int64_t sum = 0, sum_sq = 0;
  };
  std::vector<Domain> domains;
  for (std::size_t y = 0; y + 2 * R <= image.height; y += opt.domain_step) {
    for (std::size_t x = 0; x + 2 * R <= image.width; x += opt.domain_step) {
      Domain d{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), {}, 0, 0};
      detail::domain_sums(image, x, y, R, d.d4);
      for (auto v : d.d4) {
        d.sum += v;
        d.sum_sq += std::int64_t{v} * v;
      }
      domains.push_back(std::move(d));
    }
  }

  PifsCode code;
  code.width = image.width;
  code.height = image.height;
  code.range_size = R;
  code.transforms.resize(code.blocks_x() * code.blocks_y());

  parallel_for(
      code.transforms.size(),
      [&](std::size_t block) {
        const std::size_t rx = (block % code.blocks_x()) * R;
        const std::size_t ry = (block / code.blocks_x()) * R;
        std::vector<std::int32_t> r(n);
        std::int64_t sr = 0, srr = 0;
        for (std::size_t y = 0; y < R; ++y) {
          for (std::size_t x = 0; x < R; ++x) {
            const std::int32_t v = image.at(rx + x, ry + y);
            r[y * R + x] = v;
            sr += v;
            srr += std::int64_t{v} * v;
          }
        }

        detail::Choice best;
        for (const Domain& dom : domains) {
          const std::int64_t sd = dom.sum, sdd = dom.sum_sq;
          const std::int64_t curvature = n64 * sdd - sd * sd;  // >= 0
          for (unsigned iso = 0; iso < 8; ++iso) {
            std::int64_t sdr = 0;
            for (std::size_t y = 0; y < R; ++y) {
              for (std::size_t x = 0; x < R; ++x) {
                sdr += std::int64_t{dom.d4[isometry_index(iso, x, y, R)]} * r[y * R + x];
              }
            }
            // n * (error minimised over real o) for a given s.
            auto bound = [&](std::int64_t s) {
              const std::int64_t su = s * sd - K * sr;
              const std::int64_t suu = s * s * sdd - 2 * K * s * sdr + K * K * srr;
              return n64 * suu - su * su;
            };
            auto consider = [&](std::int64_t s) {
              const std::int64_t su = s * sd - K * sr;
              const std::int64_t suu = s * s * sdd - 2 * K * s * sdr + K * K * srr;
              std::int64_t o = detail::round_div(-su, n64 * K);
              o = std::clamp<std::int64_t>(o, -kOffsetLimit, kOffsetLimit);
              const std::int64_t err = suu + 2 * K * o * su + n64 * K * K * o * o;
              detail::Choice c{err, dom.y, dom.x, static_cast<std::uint8_t>(iso), static_cast<std::int32_t>(s),
                               static_cast<std::int32_t>(o)};
              if (c.key() < best.key()) best = c;
            };
            std::int64_t seed = 0;
            if (curvature > 0) seed = detail::round_div(K * (n64 * sdr - sd * sr), curvature);
            seed = std::clamp<std::int64_t>(seed, -s_limit, s_limit);
            auto promising = [&](std::int64_t s) {
              return best.error == std::numeric_limits<std::int64_t>::max() || bound(s) <= n64 * best.error;
            };
            for (std::int64_t s = seed; s <= s_limit && promising(s); ++s) consider(s);
            for (std::int64_t s = seed - 1; s >= -s_limit && promising(s); --s) consider(s);
          }
        }
        code.transforms[block] = RangeTransform{best.dx, best.dy, best.iso, static_cast<std::int8_t>(best.s),
                                                static_cast<std::int16_t>(best.o)};
      },
      opt.threads);
  return code;
}

/// One decoding pass: every range block is rebuilt from the previous image.
inline GrayImage pifs_apply(const PifsCode& code, const GrayImage& previous) {
  const std::size_t R = code.range_size;
  GrayImage next(code.width, code.height);
  std::vector<std::int32_t> d4;
  for (std::size_t block = 0; block < code.transforms.size(); ++block) {
    const RangeTransform& t = code.transforms[block];
    const std::size_t rx = (block % code.blocks_x()) * R;
    const std::size_t ry = (block / code.blocks_x()) * R;
    detail::domain_sums(previous, t.domain_x, t.domain_y, R, d4);
    for (std::size_t y = 0; y < R; ++y) {
      for (std::size_t x = 0; x < R; ++x) {
        const double v = static_cast<double>(std::int64_t{t.s_q} * d4[isometry_index(t.isometry, x, y, R)] +
                                             detail::kErrorUnit * t.o_q) /
                         static_cast<double>(detail::kErrorUnit);
        next.at(rx + x, ry + y) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return next;
}

inline GrayImage pifs_decode(const PifsCode& code, std::size_t iterations,
                             const std::optional<GrayImage>& start = std::nullopt) {
  code.validate();
  if (iterations == 0) throw DomainError("pifs_decode: iterations must be at least 1");
  GrayImage image = start.value_or(GrayImage(code.width, code.height, 128));
  if (image.width != code.width || image.height != code.height) {
    throw DimensionMismatch("pifs_decode: start image is " + std::to_string(image.width) + "x" +
                            std::to_string(image.height) + ", code is " + std::to_string(code.width) + "x" +
                            std::to_string(code.height));
  }
  for (std::size_t i = 0; i < iterations; ++i) image = pifs_apply(code, image);
  return image;
}

inline double mean_squared_error(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height) throw DimensionMismatch("images differ in size");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixels.size());
}

inline double rms_distance(const GrayImage& a, const GrayImage& b) { return std::sqrt(mean_squared_error(a, b)); }

inline constexpr double kPsnrCap = 99.0;

/// Peak signal-to-noise ratio in dB; identical images give kPsnrCap.
inline double psnr(const GrayImage& a, const GrayImage& b) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return kPsnrCap;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

// ---------------------------------------------------------------------------
// Container: "FIC1", u16 width, u16 height, u8 range_size, u8 0, then per transform
// u16 domain_x, u16 domain_y, u8 isometry, i8 s_q, i16 o_q. Little-endian.

inline constexpr std::array<std::uint8_t, 4> kPifsMagic{'F', 'I', 'C', '1'};

inline std::vector<std::uint8_t> serialize_pifs(const PifsCode& code) {
  code.validate();
  if (code.width > 65535 || code.height > 65535 || code.range_size > 255) {
    throw DimensionError("PIFS code dimensions do not fit the container");
  }
  std::vector<std::uint8_t> out(kPifsMagic.begin(), kPifsMagic.end());
  auto u16 = [&out](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  u16(static_cast<std::uint16_t>(code.width));
  u16(static_cast<std::uint16_t>(code.height));
  out.push_back(static_cast<std::uint8_t>(code.range_size));
  out.push_back(0);
  for (const auto& t : code.transforms) {
    u16(t.domain_x);
    u16(t.domain_y);
    out.push_back(t.isometry);
    out.push_back(static_cast<std::uint8_t>(t.s_q));
    u16(static_cast<std::uint16_t>(t.o_q));
  }
  return out;
}

inline PifsCode parse_pifs(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || !std::equal(kPifsMagic.begin(), kPifsMagic.end(), bytes.begin())) {
    throw FormatError("not a FIC1 container");
  }
  auto u16 = [&bytes](std::size_t at) {
    return static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8));
  };
  PifsCode code;
  code.width = u16(4);
  code.height = u16(6);
  code.range_size = bytes[8];
  if (bytes[9] != 0) throw FormatError("FIC1 reserved byte must be zero");
  if (code.range_size == 0 || code.width % code.range_size != 0 || code.height % code.range_size != 0) {
    throw FormatError("FIC1 header has inconsistent dimensions");
  }
  const std::size_t count = code.blocks_x() * code.blocks_y();
  if (bytes.size() != 10 + 8 * count) {
    throw FormatError("FIC1 payload holds " + std::to_string(bytes.size() - 10) + " bytes, expected " +
                      std::to_string(8 * count));
  }
  code.transforms.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = 10 + 8 * i;
    auto& t = code.transforms[i];
    t.domain_x = u16(at);
    t.domain_y = u16(at + 2);
    t.isometry = bytes[at + 4];
    t.s_q = static_cast<std::int8_t>(bytes[at + 5]);
    t.o_q = static_cast<std::int16_t>(u16(at + 6));
  }
  code.validate();
  return code;
}

}  // namespace chaoscope
