#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chaoscope/analysis.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/parallel.hpp"
#include "chaoscope/systems.hpp"

namespace chaoscope {

// ---------------------------------------------------------------------------
// Escape-time rendering

/// Rectangle of the complex plane sampled every `scale` units along both axes.
struct ComplexWindow {
  double xmin = -2.4;
  double xmax = 1.2;
  double ymin = -1.5;
  double ymax = 1.5;
  double scale = 0.005;

  void validate() const {
    if (!(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) && std::isfinite(ymax))) {
      throw DomainError("window bounds must be finite");
    }
    if (!(xmin < xmax) || !(ymin < ymax)) throw DomainError("window requires xmin < xmax and ymin < ymax");
    if (!(scale > 0.0)) throw DomainError("window scale must be positive");
    if ((xmax - xmin) / scale < 2.0 || (ymax - ymin) / scale < 2.0) {
      throw DomainError("window must span at least two grid pitches on each axis");
    }
  }
};

/// Samples lo, lo + step, ... up to hi, the way a colon range does: the count tolerates
/// rounding in (hi - lo) / step, and the upper half is measured back from the snapped end
/// point so a range symmetric about zero produces exactly negated samples.
inline std::vector<double> axis_samples(double lo, double step, double hi) {
  const double q = (hi - lo) / step;
  const auto intervals = static_cast<std::size_t>(std::floor(q + 1e-10 * std::max(1.0, q)));
  const double raw_end = lo + static_cast<double>(intervals) * step;
  const double end = std::abs(raw_end - hi) <= 1e-10 * step ? hi : raw_end;
  std::vector<double> out(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    out[k] = 2 * k <= intervals ? lo + static_cast<double>(k) * step
                                : end - static_cast<double>(intervals - k) * step;
  }
  return out;
}

/// Escape counts over a window. Row j holds imaginary part ys[j], ascending.
struct EscapeGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> counts;
  std::uint32_t nmax = 0;
  double threshold = 4.0;
  ComplexWindow window;
  std::vector<double> xs;
  std::vector<double> ys;

  std::uint32_t at(std::size_t col, std::size_t row) const { return counts[row * width + col]; }
};

inline constexpr std::size_t kDefaultMaxPixels = 100'000'000;

/// First N >= 1 with |w_N| > threshold for w_0 = 0, w_N = w_{N-1}^2 + z; nmax if none.
inline std::uint32_t escape_count(double re, double im, std::uint32_t nmax, double threshold) {
  const double limit = threshold * threshold;
  double wr = 0.0, wi = 0.0;
  for (std::uint32_t n = 1; n <= nmax; ++n) {
    const double r = wr * wr - wi * wi + re;
    wi = 2.0 * wr * wi + im;
    wr = r;
    if (wr * wr + wi * wi > limit) return n;
  }
  return nmax;
}

inline EscapeGrid mandelbrot_grid(const ComplexWindow& window, std::uint32_t nmax, double threshold = 4.0,
                                  std::size_t max_pixels = kDefaultMaxPixels, unsigned threads = 0) {
  window.validate();
  if (nmax == 0) throw DomainError("mandelbrot_grid: nmax must be positive");
  if (!(threshold >= 2.0)) throw DomainError("mandelbrot_grid: threshold must be at least 2");

  EscapeGrid grid;
  grid.xs = axis_samples(window.xmin, window.scale, window.xmax);
  grid.ys = axis_samples(window.ymin, window.scale, window.ymax);
  grid.width = grid.xs.size();
  grid.height = grid.ys.size();
  if (grid.width > max_pixels / grid.height) {
    throw GridTooLarge("mandelbrot_grid: " + std::to_string(grid.width) + "x" + std::to_string(grid.height) +
                       " exceeds the pixel cap of " + std::to_string(max_pixels));
  }
  grid.nmax = nmax;
  grid.threshold = threshold;
  grid.window = window;
  grid.counts.assign(grid.width * grid.height, 0);
  parallel_for(
      grid.height,
      [&](std::size_t row) {
        for (std::size_t col = 0; col < grid.width; ++col) {
          grid.counts[row * grid.width + col] = escape_count(grid.xs[col], grid.ys[row], nmax, threshold);
        }
      },
      threads);
  return grid;
}

// ---------------------------------------------------------------------------
// Iterated function systems

struct AffineMap2 {
  // [a b; c d] * p + (e, f)
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double e = 0.0, f = 0.0;

  Point2 operator()(Point2 p) const { return {a * p.x + b * p.y + e, c * p.x + d * p.y + f}; }

  // Largest singular value of the linear part.
  double operator_norm() const {
    const double p = a * a + c * c;
    const double q = a * b + c * d;
    const double r = b * b + d * d;
    const double mean = 0.5 * (p + r);
    const double dev = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
    return std::sqrt(mean + dev);
  }

  static AffineMap2 similarity(double ratio, double ox, double oy) { return {ratio, 0.0, 0.0, ratio, ox, oy}; }
};

struct IfsSystem {
  std::vector<AffineMap2> maps;

  void validate() const {
    if (maps.empty()) throw DomainError("IFS needs at least one map");
    for (std::size_t i = 0; i < maps.size(); ++i) {
      if (!(maps[i].operator_norm() < 1.0)) {
        throw DomainError("IFS map " + std::to_string(i) + " is not contractive");
      }
    }
  }
};

/// Three half-scale copies at (0,0), (1/2,0), (1/4,1/2).
inline IfsSystem sierpinski_ifs() {
  return {{AffineMap2::similarity(0.5, 0.0, 0.0), AffineMap2::similarity(0.5, 0.5, 0.0),
           AffineMap2::similarity(0.5, 0.25, 0.5)}};
}

/// Raster over the unit square. Pixel (col, row) covers [col/w, (col+1)/w) x [row/h, (row+1)/h);
/// row 0 is at y = 0.
struct BinaryImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;

  BinaryImage() = default;
  BinaryImage(std::size_t w, std::size_t h, bool fill = false) : width(w), height(h), bits(w * h, fill ? 1 : 0) {
    if (w == 0 || h == 0) throw DomainError("binary image dimensions must be positive");
  }

  bool get(std::size_t col, std::size_t row) const { return bits[row * width + col] != 0; }
  void set(std::size_t col, std::size_t row, bool v = true) { bits[row * width + col] = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }
  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

/// One application of the union operator: each set pixel center is pushed through every map
/// and the pixel containing its image is set.
inline BinaryImage ifs_step(const IfsSystem& system, const BinaryImage& in) {
  BinaryImage out(in.width, in.height);
  const auto w = static_cast<double>(in.width);
  const auto h = static_cast<double>(in.height);
  for (std::size_t row = 0; row < in.height; ++row) {
    for (std::size_t col = 0; col < in.width; ++col) {
      if (!in.get(col, row)) continue;
      const Point2 center{(static_cast<double>(col) + 0.5) / w, (static_cast<double>(row) + 0.5) / h};
      for (const auto& m : system.maps) {
        const Point2 q = m(center);
        const double fx = std::floor(q.x * w);
        const double fy = std::floor(q.y * h);
        if (fx < 0.0 || fy < 0.0 || fx >= w || fy >= h) continue;
        out.set(static_cast<std::size_t>(fx), static_cast<std::size_t>(fy));
      }
    }
  }
  return out;
}

inline BinaryImage ifs_iterate(const IfsSystem& system, const BinaryImage& start, std::size_t n) {
  system.validate();
  BinaryImage image = start;
  for (std::size_t i = 0; i < n; ++i) image = ifs_step(system, image);
  return image;
}

// ---------------------------------------------------------------------------
// Dimension

/// D solving N r^D = 1.
inline double similarity_dimension(std::size_t n_copies, double ratio) {
  if (n_copies == 0) throw DomainError("similarity_dimension: n_copies must be at least 1");
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("similarity_dimension: ratio must lie in (0, 1)");
  return -std::log(static_cast<double>(n_copies)) / std::log(ratio);
}

struct BoxCountResult {
  double estimate = 0.0;
  // (ln 2^k, ln occupied boxes) per exponent k
  std::vector<Point2> fit_points;
};

/// Box-counting estimate: for each k, boxes of side ceil(min(w,h) / 2^k) pixels on a grid
/// anchored at pixel (0,0); the estimate is the least-squares slope of ln count vs ln 2^k.
inline BoxCountResult box_count_dimension(const BinaryImage& image, int min_exponent, int max_exponent) {
  if (!(1 <= min_exponent && min_exponent < max_exponent)) {
    throw DomainError("box_count_dimension: requires 1 <= min_exponent < max_exponent");
  }
  const std::size_t dim = std::min(image.width, image.height);
  if (max_exponent >= 63 || (std::size_t{1} << max_exponent) > dim) {
    throw DomainError("box_count_dimension: 2^max_exponent exceeds the image size");
  }
  if (image.count() == 0) throw EmptyImage("box_count_dimension: image has no set pixels");

  BoxCountResult result;
  std::vector<double> xs, ys;
  for (int k = min_exponent; k <= max_exponent; ++k) {
    const std::size_t divisions = std::size_t{1} << k;
    const std::size_t side = (dim + divisions - 1) / divisions;
    const std::size_t boxes_x = (image.width + side - 1) / side;
    std::unordered_set<std::size_t> occupied;
    for (std::size_t row = 0; row < image.height; ++row) {
      for (std::size_t col = 0; col < image.width; ++col) {
        if (image.get(col, row)) occupied.insert((row / side) * boxes_x + col / side);
      }
    }
    const double lx = std::log(static_cast<double>(divisions));
    const double ly = std::log(static_cast<double>(occupied.size()));
    xs.push_back(lx);
    ys.push_back(ly);
    result.fit_points.push_back({lx, ly});
  }
  result.estimate = detail::ls_slope(xs, ys);
  return result;
}

}  // namespace chaoscope
