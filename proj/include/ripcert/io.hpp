#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "ripcert/common.hpp"

namespace ripcert {

static_assert(std::endian::native == std::endian::little,
              "matrix files are little-endian; big-endian hosts need swapping");

namespace detail {

inline constexpr char kMatrixMagic[8] = {'R', 'I', 'P', 'M', 'A', 'T', '0', '1'};
inline constexpr std::uint32_t kMatrixVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace detail

/// Binary layout: magic "RIPMAT01", u32 version, u32 scale tag (0 raw,
/// 1 inv-sqrt-m), u64 m, u64 n, u64 seed, then m*n little-endian float64
/// values in row-major order.
inline void write_matrix_bin(std::ostream& os, const SensingMatrix& x) {
  os.write(detail::kMatrixMagic, sizeof(detail::kMatrixMagic));
  detail::put(os, detail::kMatrixVersion);
  detail::put(os, static_cast<std::uint32_t>(x.scale == Scale::inv_sqrt_m ? 1 : 0));
  detail::put(os, static_cast<std::uint64_t>(x.rows()));
  detail::put(os, static_cast<std::uint64_t>(x.cols()));
  detail::put(os, x.seed);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) detail::put(os, x.data(i, j));
  if (!os) throw data_error("write_matrix_bin: write failed");
}

inline SensingMatrix read_matrix_bin(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, detail::kMatrixMagic, sizeof(magic)) != 0)
    throw data_error("read_matrix_bin: bad magic");
  std::uint32_t version = 0, scale_tag = 0;
  std::uint64_t m = 0, n = 0, seed = 0;
  detail::get(is, version);
  detail::get(is, scale_tag);
  detail::get(is, m);
  detail::get(is, n);
  detail::get(is, seed);
  if (!is || version != detail::kMatrixVersion)
    throw data_error("read_matrix_bin: unsupported version");
  if (scale_tag > 1) throw data_error("read_matrix_bin: bad scale tag");
  if (m == 0 || n == 0 || m > (1u << 20) || n > (1u << 20))
    throw data_error("read_matrix_bin: implausible dimensions");

  SensingMatrix x;
  x.scale = scale_tag == 1 ? Scale::inv_sqrt_m : Scale::raw;
  x.seed = seed;
  x.model = "file";
  x.data.resize(static_cast<Index>(m), static_cast<Index>(n));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) detail::get(is, x.data(i, j));
  if (!is) throw data_error("read_matrix_bin: truncated payload");
  return x;
}

inline void write_matrix_bin(const std::string& path, const SensingMatrix& x) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("write_matrix_bin: cannot open " + path);
  write_matrix_bin(os, x);
}

inline SensingMatrix read_matrix_bin(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("read_matrix_bin: cannot open " + path);
  return read_matrix_bin(is);
}

/// CSV export: a metadata comment line, then one row per matrix row with
/// full-precision entries.
inline void write_matrix_csv(std::ostream& os, const SensingMatrix& x) {
  os << "# m=" << x.rows() << " n=" << x.cols() << " scale=" << to_string(x.scale)
     << " seed=" << x.seed << "\n";
  char buf[40];
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", x.data(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw data_error("write_matrix_csv: write failed");
}

inline void write_matrix_csv(const std::string& path, const SensingMatrix& x) {
  std::ofstream os(path);
  if (!os) throw data_error("write_matrix_csv: cannot open " + path);
  write_matrix_csv(os, x);
}

}  // namespace ripcert
