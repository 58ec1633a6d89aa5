#pragma once

// Periodic cubic grids of biquaternion (and scalar/vector) samples plus the
// short time windows used by discrete time differencing.  Storage is
// x-fastest: index = i1 + n*(i2 + n*i3).

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bq/algebra.hpp"

namespace bq {

struct Grid {
  int n = 0;      // points per axis, all three axes identical
  double h = 0.0; // spacing, c = 1 units

  Grid() = default;
  Grid(int n_, double h_) : n(n_), h(h_) {
    if (n < 8) throw std::invalid_argument("Grid: n must be >= 8");
    if (!(h > 0.0)) throw std::invalid_argument("Grid: h must be positive");
  }

  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  double extent() const { return n * h; }

  int wrap(int i) const {
    i %= n;
    return i < 0 ? i + n : i;
  }
  std::size_t idx(int i1, int i2, int i3) const {
    return static_cast<std::size_t>(wrap(i1)) +
           static_cast<std::size_t>(n) * (static_cast<std::size_t>(wrap(i2)) +
                                          static_cast<std::size_t>(n) * wrap(i3));
  }
  Vec3 coord(int i1, int i2, int i3) const { return {i1 * h, i2 * h, i3 * h}; }

  bool operator==(const Grid& o) const { return n == o.n && h == o.h; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (a != b) throw std::invalid_argument("grid mismatch");
}

// Gridded field of T (T = double, Complex, Vec3, Vec3c, Biquaternion).
template <class T>
struct Field {
  Grid grid;
  std::vector<T> data;

  Field() = default;
  explicit Field(const Grid& g, const T& init = T{}) : grid(g), data(g.size(), init) {}

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  T& at(int i1, int i2, int i3) { return data[grid.idx(i1, i2, i3)]; }
  const T& at(int i1, int i2, int i3) const { return data[grid.idx(i1, i2, i3)]; }
  std::size_t size() const { return data.size(); }
};

using ScalarField = Field<double>;
using CScalarField = Field<Complex>;
using VecField = Field<Vec3>;
using CVecField = Field<Vec3c>;
using BiqField = Field<Biquaternion>;

// Fill from a callable f(x) evaluated at grid coordinates.
template <class T, class F>
Field<T> sample_field(const Grid& g, F&& f) {
  Field<T> out(g);
  for (int i3 = 0; i3 < g.n; ++i3)
    for (int i2 = 0; i2 < g.n; ++i2)
      for (int i1 = 0; i1 < g.n; ++i1) out.at(i1, i2, i3) = f(g.coord(i1, i2, i3));
  return out;
}

// Time window of >= 3 slices at uniform spacing dtau; slice j sits at
// tau0 + j*dtau and diagnostics report at the center slice.
template <class T>
struct Stack {
  std::vector<Field<T>> slices;
  double dtau = 0.0;
  double tau0 = 0.0;

  Stack() = default;
  Stack(std::vector<Field<T>> s, double dtau_, double tau0_ = 0.0)
      : slices(std::move(s)), dtau(dtau_), tau0(tau0_) {
    if (slices.size() < 3) throw std::invalid_argument("Stack: need at least 3 slices");
    if (!(dtau > 0.0)) throw std::invalid_argument("Stack: dtau must be positive");
    for (const auto& f : slices) require_same_grid(f.grid, slices.front().grid);
  }

  const Grid& grid() const { return slices.front().grid; }
  int center() const { return static_cast<int>(slices.size()) / 2; }
  double tau_at(int j) const { return tau0 + j * dtau; }
};

using SampleStack = Stack<Biquaternion>;

// Build a stack by sampling f(tau, x) at times tau_c + j*dtau, j = -half..half.
template <class T, class F>
Stack<T> sample_stack(const Grid& g, double tau_c, double dtau, int half, F&& f) {
  std::vector<Field<T>> slices;
  for (int j = -half; j <= half; ++j) {
    double tau = tau_c + j * dtau;
    slices.push_back(sample_field<T>(g, [&](const Vec3& x) { return f(tau, x); }));
  }
  return Stack<T>(std::move(slices), dtau, tau_c - half * dtau);
}

}  // namespace bq
