#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "chaoscope/analysis.hpp"
#include "chaoscope/compression.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/fractals.hpp"
#include "chaoscope/state.hpp"

namespace chaoscope::io {

// ---------------------------------------------------------------------------
// Files

/// Writes to `path.partial` and renames over `path`, so readers never see a torn file.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failed", tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename into place (" + ec.message() + ")", path.string());
  }
}

inline void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed", path.string());
  return bytes;
}

// ---------------------------------------------------------------------------
// CSV: header row, one record per line, LF endings, 17 significant digits.

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw FormatError("malformed number '" + std::string(text) + "'");
  }
  return v;
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (std::size_t i = 0; i < traj.dimension; ++i) out += ",x" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += format_double(traj.times[k]);
    for (double v : traj.states[k]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

/// Column n is the absolute iterate index (discarded + k).
inline std::string orbit_csv(const MapOrbit& orbit, std::size_t dimension) {
  std::string out = "n";
  for (std::size_t i = 0; i < dimension; ++i) out += ",x" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    out += std::to_string(orbit.discarded + k);
    for (double v : orbit.points[k]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string points_csv(std::span<const Point2> points) {
  std::string out = "x,y\n";
  for (const auto& p : points) {
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
  write_file_atomic(path, trajectory_csv(traj));
}
inline void write_csv(const std::filesystem::path& path, const MapOrbit& orbit, std::size_t dimension) {
  write_file_atomic(path, orbit_csv(orbit, dimension));
}
inline void write_csv(const std::filesystem::path& path, const CobwebTrace& trace) {
  write_file_atomic(path, points_csv(trace.vertices));
}
inline void write_csv(const std::filesystem::path& path, const BifurcationDiagram& diagram) {
  write_file_atomic(path, points_csv(diagram.points));
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    parts.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

}  // namespace detail

inline Trajectory parse_trajectory_csv(std::string_view text) {
  std::vector<std::string_view> lines = detail::split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || detail::split(lines[0], ',').front() != "t") throw FormatError("trajectory CSV lacks header");
  Trajectory traj;
  traj.dimension = detail::split(lines[0], ',').size() - 1;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto fields = detail::split(lines[k], ',');
    if (fields.size() != traj.dimension + 1) throw FormatError("trajectory CSV row " + std::to_string(k) + " width");
    traj.times.push_back(parse_double(fields[0]));
    std::vector<double> state;
    for (std::size_t i = 1; i < fields.size(); ++i) state.push_back(parse_double(fields[i]));
    traj.states.emplace_back(std::move(state));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// PGM (binary P5, maxval 255)

inline std::vector<std::uint8_t> encode_pgm(std::size_t width, std::size_t height,
                                            std::span<const std::uint8_t> payload) {
  const std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

inline std::vector<std::uint8_t> to_pgm(const GrayImage& image) {
  return encode_pgm(image.width, image.height, image.pixels);
}

/// Counts map linearly onto 0..255 (count 1 -> 0, nmax -> 255); top row is the largest
/// imaginary part.
inline std::vector<std::uint8_t> to_pgm(const EscapeGrid& grid) {
  std::vector<std::uint8_t> payload(grid.width * grid.height);
  for (std::size_t row = 0; row < grid.height; ++row) {
    const std::size_t src = grid.height - 1 - row;
    for (std::size_t col = 0; col < grid.width; ++col) {
      const std::uint32_t c = grid.at(col, src);
      const double level =
          grid.nmax <= 1 ? 255.0 : std::round(255.0 * static_cast<double>(c - 1) / static_cast<double>(grid.nmax - 1));
      payload[row * grid.width + col] = static_cast<std::uint8_t>(level);
    }
  }
  return encode_pgm(grid.width, grid.height, payload);
}

/// Set pixels are white; top row is y = 1.
inline std::vector<std::uint8_t> to_pgm(const BinaryImage& image) {
  std::vector<std::uint8_t> payload(image.width * image.height);
  for (std::size_t row = 0; row < image.height; ++row) {
    const std::size_t src = image.height - 1 - row;
    for (std::size_t col = 0; col < image.width; ++col) {
      payload[row * image.width + col] = image.get(col, src) ? 255 : 0;
    }
  }
  return encode_pgm(image.width, image.height, payload);
}

template <class Raster>
void write_pgm(const std::filesystem::path& path, const Raster& raster) {
  write_file_atomic(path, to_pgm(raster));
}

inline GrayImage parse_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (bytes[pos] == ' ' || bytes[pos] == '\t' || bytes[pos] == '\n' || bytes[pos] == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&] {
    skip_space();
    std::size_t v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000) throw FormatError("PGM dimension too large");
      ++pos;
    }
    if (pos == start) throw FormatError("PGM header is malformed");
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw FormatError("not a binary PGM (P5) file");
  pos = 2;
  const std::size_t width = number();
  const std::size_t height = number();
  const std::size_t maxval = number();
  if (maxval != 255) throw FormatError("only PGM maxval 255 is supported");
  if (width == 0 || height == 0) throw FormatError("PGM dimensions must be positive");
  if (pos >= bytes.size()) throw FormatError("PGM payload missing");
  ++pos;  // single whitespace after maxval
  if (bytes.size() - pos != width * height) throw FormatError("PGM payload size does not match header");
  GrayImage image(width, height);
  std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), image.pixels.begin());
  return image;
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
  try {
    return parse_pgm(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + ": " + path.string());
  }
}

}  // namespace chaoscope::io
