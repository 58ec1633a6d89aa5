#pragma once

// Binary field dumps.  Layout (all little-endian):
//   magic   "BQF1" (4 bytes)
//   n       uint32, points per axis
//   h       float64, grid spacing
//   tau     float64, slice time
//   order   uint32, stencil order the producer ran with
// followed by n^3 biquaternions as 8 float64 each in the order
// s.re s.im v.x.re v.x.im v.y.re v.y.im v.z.re v.z.im, x-fastest.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "bq/field.hpp"

namespace bq {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace detail

struct DumpHeader {
  int n = 0;
  double h = 0.0;
  double tau = 0.0;
  int order = 2;
};

inline void write_field_dump(std::ostream& os, const BiqField& f, double tau, int order) {
  os.write("BQF1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(f.grid.n));
  detail::put_f64(os, f.grid.h);
  detail::put_f64(os, tau);
  detail::put_u32(os, static_cast<std::uint32_t>(order));
  for (const auto& b : f.data) {
    detail::put_f64(os, b.s.real());
    detail::put_f64(os, b.s.imag());
    for (Complex c : {b.v.x, b.v.y, b.v.z}) {
      detail::put_f64(os, c.real());
      detail::put_f64(os, c.imag());
    }
  }
}

inline void write_field_dump(const std::string& path, const BiqField& f, double tau, int order) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write_field_dump(os, f, tau, order);
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline BiqField read_field_dump(std::istream& is, DumpHeader* hdr = nullptr) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "BQF1", 4) != 0)
    throw std::runtime_error("bad field dump magic");
  DumpHeader h;
  h.n = static_cast<int>(detail::get_u32(is));
  h.h = detail::get_f64(is);
  h.tau = detail::get_f64(is);
  h.order = static_cast<int>(detail::get_u32(is));
  BiqField f(Grid(h.n, h.h));
  for (auto& b : f.data) {
    double s_re = detail::get_f64(is), s_im = detail::get_f64(is);
    double xr = detail::get_f64(is), xi = detail::get_f64(is);
    double yr = detail::get_f64(is), yi = detail::get_f64(is);
    double zr = detail::get_f64(is), zi = detail::get_f64(is);
    b = Biquaternion{Complex(s_re, s_im), Vec3c{Complex(xr, xi), Complex(yr, yi), Complex(zr, zi)}};
  }
  if (!is) throw std::runtime_error("truncated field dump");
  if (hdr) *hdr = h;
  return f;
}

inline BiqField read_field_dump(const std::string& path, DumpHeader* hdr = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read_field_dump(is, hdr);
}

}  // namespace bq
