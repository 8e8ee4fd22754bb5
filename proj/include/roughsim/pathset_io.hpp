#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "roughsim/errors.hpp"
#include "roughsim/volterra.hpp"

namespace roughsim {

namespace detail {

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("pathset: malformed number '" + std::string(s) + "'");
  }
  return v;
}

template <class T>
void write_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_le(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw IoError("pathset: truncated binary file");
  return value;
}

}  // namespace detail

/// CSV layout: one '#' metadata line, a header of grid times, then one row per path.
inline void write_pathset_csv(std::ostream& os, const PathSet& p, const std::string& extra_meta = {}) {
  os << "# roughsim pathset scheme=" << to_string(p.scheme) << " method=" << to_string(p.method)
     << " seed=" << p.seed << " paths=" << p.paths() << " steps=" << p.grid.steps()
     << " horizon=" << detail::format_double(p.grid.horizon());
  if (!extra_meta.empty()) os << ' ' << extra_meta;
  os << '\n';
  for (std::size_t i = 0; i <= p.grid.steps(); ++i) {
    if (i) os << ',';
    os << 't' << detail::format_double(p.grid.time(i));
  }
  os << '\n';
  std::string line;
  for (std::size_t j = 0; j < p.paths(); ++j) {
    line.clear();
    const auto row = p.values.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += detail::format_double(row[i]);
    }
    line += '\n';
    os << line;
  }
  if (!os) throw IoError("pathset: write failed");
}

inline Matrix read_pathset_csv(std::istream& is) {
  std::string line;
  std::vector<double> data;
  std::size_t cols = 0, rows = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::size_t count = 0, start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      data.push_back(detail::parse_double(std::string_view(line).substr(start, end - start)));
      ++count;
      start = end + 1;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw IoError("pathset: ragged CSV row");
    ++rows;
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data().begin());
  return m;
}

inline constexpr std::array<char, 5> kBinaryMagic = {'R', 'V', 'O', 'L', '1'};

/// Binary layout: "RVOL1", u32 M, u32 n+1, f64 T, f64 values row-major (little-endian).
inline void write_pathset_binary(std::ostream& os, const PathSet& p) {
  os.write(kBinaryMagic.data(), kBinaryMagic.size());
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.paths()));
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.grid.steps() + 1));
  detail::write_le<double>(os, p.grid.horizon());
  const auto data = p.values.data();
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!os) throw IoError("pathset: write failed");
}

inline PathSet read_pathset_binary(std::istream& is) {
  std::array<char, 5> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kBinaryMagic) throw IoError("pathset: bad magic");
  const auto m = detail::read_le<std::uint32_t>(is);
  const auto cols = detail::read_le<std::uint32_t>(is);
  const auto horizon = detail::read_le<double>(is);
  if (cols < 2) throw IoError("pathset: need at least two time columns");
  PathSet p{Matrix(m, cols), Grid(cols - 1, horizon)};
  auto data = p.values.data();
  is.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) throw IoError("pathset: truncated binary file");
  return p;
}

inline void save_pathset(const std::string& path, const PathSet& p, bool binary,
                         const std::string& extra_meta = {}) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  if (binary) {
    write_pathset_binary(os, p);
  } else {
    write_pathset_csv(os, p, extra_meta);
  }
}

}  // namespace roughsim
