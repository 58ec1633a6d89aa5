#pragma once

// Light-cone fundamental-solution machinery: sphere means, retarded volume
// potentials, the generalized Kirchhoff solver for biwave equations
// nabla^{+-} K = G with Cauchy data K(0) = K0, its free-field special case,
// and the Picard iteration for the charge-current integral equation.
//
// With S(tau, x) = RV(G) + SM(K0), where
//   RV = integral_{r<=tau} G(tau - r, y)/r dV(y),
//   SM = tau^-1 integral_{r=tau} K0(y) dS(y),
// the solution is 4 pi K = nabla^{-+} S (operator sign opposite to the
// equation), applied by central differencing of the assembled integrals.
// The surface G(0,y) term of the printed formula belongs to the variant
// that differentiates under the integral sign and is absent here; the
// overall sign is fixed against the method-of-lines oracle.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bq/quadrature.hpp"
#include "bq/sampler.hpp"

namespace bq {

struct QuadratureSpec {
  int n_polar = 12;       // Gauss-Legendre nodes in cos(polar), >= 8
  int n_azimuth = 24;     // uniform azimuth nodes, >= 16
  int radial_steps = 24;  // midpoint shells for volume integrals, >= 16
  double fd_step = 0.0;   // outer differencing step; 0 derives from hints

  void validate() const {
    if (n_polar < 8 || n_azimuth < 16 || radial_steps < 16)
      throw std::invalid_argument("QuadratureSpec: below minimum resolution");
  }
};

// tau^-1 * surface integral of K0 over the sphere r = tau about x.
inline Biquaternion sphere_mean(const SourceSampler& K0, const Vec3& x, double tau,
                                const QuadratureSpec& q) {
  if (!(tau > 0.0)) throw std::invalid_argument("sphere_mean: tau must be positive");
  const SphereRule& rule = sphere_rule(q.n_polar, q.n_azimuth);
  Biquaternion acc{};
  for (std::size_t d = 0; d < rule.dirs.size(); ++d) {
    Biquaternion val = K0(0.0, x + tau * rule.dirs[d]);
    acc += rule.weights[d] * val;
  }
  return tau * acc;
}

// integral over r <= tau of G(tau - r, y)/r, by radial midpoint shells of
// spherical means (the 1/r cancels into a factor r after the area element).
inline Biquaternion retarded_volume(const SourceSampler& G, const Vec3& x, double tau,
                                    const QuadratureSpec& q) {
  if (!(tau > 0.0)) throw std::invalid_argument("retarded_volume: tau must be positive");
  const SphereRule& rule = sphere_rule(q.n_polar, q.n_azimuth);
  const double dr = tau / q.radial_steps;
  Biquaternion acc{};
  for (int m = 0; m < q.radial_steps; ++m) {
    double r = (m + 0.5) * dr;
    Biquaternion shell{};
    for (std::size_t d = 0; d < rule.dirs.size(); ++d) {
      Biquaternion val = G(tau - r, x + r * rule.dirs[d]);
      shell += rule.weights[d] * val;
    }
    acc += (dr * r) * shell;
  }
  return acc;
}

namespace detail {

inline double solver_fd_step(const QuadratureSpec& q, const SourceSampler& G,
                             const SourceSampler& K0, double tau) {
  if (q.fd_step > 0.0) return q.fd_step;
  double best = 0.0;
  for (double hint : {G.h_hint, G.dt_hint, K0.h_hint, K0.dt_hint})
    if (hint > 0.0) best = best == 0.0 ? hint : std::min(best, hint);
  if (best > 0.0) return 0.5 * best;
  return 0.5 * tau / q.radial_steps;
}

}  // namespace detail

// Solution of nabla^{sign} K = G with K(0,.) = K0, evaluated at (tau, x).
// Below the resolvable horizon the Cauchy datum itself is the answer.
inline Biquaternion solve_cauchy(const SourceSampler& G, const SourceSampler& K0, Sign sign,
                                 const Vec3& x, double tau, const QuadratureSpec& q) {
  q.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("solve_cauchy: tau must be positive");
  const double delta = detail::solver_fd_step(q, G, K0, tau);
  if (tau <= 2.0 * delta) return K0(0.0, x);

  auto S = [&](double t, const Vec3& p) {
    return retarded_volume(G, p, t, q) + sphere_mean(K0, p, t, q);
  };

  const double inv2d = 1.0 / (2.0 * delta);
  Biquaternion dtau = inv2d * (S(tau + delta, x) - S(tau - delta, x));

  // quaternionic spatial part (0 + i grad) o S; the i rides in the axis factor
  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Biquaternion spatial{};
  for (int a = 0; a < 3; ++a) {
    Biquaternion d = inv2d * (S(tau, x + delta * axes[a]) - S(tau, x - delta * axes[a]));
    spatial += mul(Biquaternion{Vec3c(Vec3{}, axes[a])}, d);
  }
  // outer operator carries the opposite sign: nabla^{-sigma} = dtau - sigma (i grad)
  const double sigma = sign_value(sign);
  Biquaternion out = dtau - sigma * spatial;
  return (1.0 / (4.0 * 3.14159265358979323846)) * out;
}

// Free charge-current propagation: nabla^- Theta = 0 with Theta(0) = Theta0.
inline Biquaternion free_field_cauchy(const SourceSampler& Theta0, const Vec3& x, double tau,
                                      const QuadratureSpec& q) {
  return solve_cauchy(SourceSampler::zero(), Theta0, Sign::minus, x, tau, q);
}

// ---- Picard iteration for the strong-background integral equation ----

struct PicardResult {
  std::vector<SampleStack> iterates;   // Theta^(0), Theta^(1), ...
  std::vector<double> residuals;       // max |Theta^(m+1) - Theta^(m)|
  bool diverged = false;
};

// Fixed point of kappa nabla^- Theta = -Theta o A_ext with Theta(0) = Theta0,
// iterated through the Cauchy solver on an evaluation lattice of n_slices
// time levels over [0, horizon] on eval_grid.
inline PicardResult picard_transform(const SourceSampler& Theta0, const SourceSampler& A_ext,
                                     double kappa, int iters, const QuadratureSpec& q,
                                     const Grid& eval_grid, double horizon, int n_slices) {
  if (iters < 1) throw std::invalid_argument("picard_transform: iters must be >= 1");
  if (n_slices < 3) throw std::invalid_argument("picard_transform: need >= 3 time slices");
  if (!(horizon > 0.0)) throw std::invalid_argument("picard_transform: horizon must be positive");
  if (kappa == 0.0) throw std::invalid_argument("picard_transform: kappa must be nonzero");

  const double dt = horizon / (n_slices - 1);

  // one differencing step for every iterate, so iterates are comparable
  QuadratureSpec qi = q;
  if (qi.fd_step <= 0.0) qi.fd_step = 0.5 * horizon / q.radial_steps;

  auto solve_lattice = [&](const SourceSampler& Gm) {
    std::vector<BiqField> slices;
    for (int j = 0; j < n_slices; ++j) {
      double tau = j * dt;
      BiqField f(eval_grid);
      if (tau == 0.0) {
        for (int i3 = 0; i3 < eval_grid.n; ++i3)
          for (int i2 = 0; i2 < eval_grid.n; ++i2)
            for (int i1 = 0; i1 < eval_grid.n; ++i1)
              f.at(i1, i2, i3) = Theta0(0.0, eval_grid.coord(i1, i2, i3));
      } else {
        for (int i3 = 0; i3 < eval_grid.n; ++i3)
          for (int i2 = 0; i2 < eval_grid.n; ++i2)
            for (int i1 = 0; i1 < eval_grid.n; ++i1)
              f.at(i1, i2, i3) =
                  solve_cauchy(Gm, Theta0, Sign::minus, eval_grid.coord(i1, i2, i3), tau, qi);
      }
      slices.push_back(std::move(f));
    }
    return SampleStack(std::move(slices), dt, 0.0);
  };

  PicardResult out;
  out.iterates.push_back(solve_lattice(SourceSampler::zero()));

  int grow_streak = 0;
  for (int m = 0; m < iters; ++m) {
    const SampleStack& prev = out.iterates.back();
    SourceSampler Gm{[&prev, &A_ext, kappa](double tau, const Vec3& y) {
                       Biquaternion th = interpolate_spacetime(prev, tau, y);
                       return (-1.0 / kappa) * mul(th, A_ext(tau, y));
                     },
                     prev.grid().h, prev.dtau};
    SampleStack next = solve_lattice(Gm);

    double res = 0.0;
    for (std::size_t s = 0; s < next.slices.size(); ++s)
      for (std::size_t i = 0; i < next.slices[s].size(); ++i)
        res = std::max(res, norm(next.slices[s][i] - prev.slices[s][i]));
    out.residuals.push_back(res);
    out.iterates.push_back(std::move(next));

    if (out.residuals.size() >= 2 && res > out.residuals[out.residuals.size() - 2]) {
      if (++grow_streak >= 3) {
        out.diverged = true;
        break;
      }
    } else {
      grow_streak = 0;
    }
  }
  return out;
}

}  // namespace bq
