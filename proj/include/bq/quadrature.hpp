#pragma once

// Gauss-Legendre nodes/weights and the product rule on the unit sphere
// (Gauss-Legendre in cos(polar) x uniform trapezoid in azimuth).

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bq/algebra.hpp"

namespace bq {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum = 2
};

inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendre out;
  out.nodes.resize(n);
  out.weights.resize(n);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(3.14159265358979323846 * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n and P'_n
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    out.nodes[k] = -x;
    out.nodes[n - 1 - k] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out.weights[k] = w;
    out.weights[n - 1 - k] = w;
  }
  return out;
}

// Directions and weights with sum(w) = 4 pi.
struct SphereRule {
  std::vector<Vec3> dirs;
  std::vector<double> weights;
};

inline SphereRule make_sphere_rule(int n_polar, int n_azimuth) {
  if (n_polar < 1 || n_azimuth < 1) throw std::invalid_argument("sphere rule: bad sizes");
  GaussLegendre gl = gauss_legendre(n_polar);
  SphereRule rule;
  rule.dirs.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  rule.weights.reserve(rule.dirs.capacity());
  const double dphi = 2.0 * 3.14159265358979323846 / n_azimuth;
  for (int i = 0; i < n_polar; ++i) {
    double ct = gl.nodes[i];
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_azimuth; ++j) {
      double phi = dphi * j;
      rule.dirs.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      rule.weights.push_back(gl.weights[i] * dphi);
    }
  }
  return rule;
}

// process-wide cache; rules are tiny and read-only after construction
inline const SphereRule& sphere_rule(int n_polar, int n_azimuth) {
  static std::map<std::pair<int, int>, SphereRule> cache;
  static std::mutex mx;
  std::lock_guard<std::mutex> lock(mx);
  auto key = std::make_pair(n_polar, n_azimuth);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_sphere_rule(n_polar, n_azimuth)).first;
  return it->second;
}

}  // namespace bq
