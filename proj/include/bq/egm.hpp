#pragma once

// Physical model assembly.  The tension biquaternion is
//   A = i a + (sqrt(eps) E + i sqrt(mu) H),
// the charge-current biquaternion
//   Theta = -i rho - J,   rho = rhoE/sqrt(eps) - i rhoH/sqrt(mu),
//                         J   = sqrt(mu) jE - i sqrt(eps) jH,
// and the biquaternionic Maxwell system reads nabla^+ A = Theta.  The
// resistance scalar a vanishes for closed (classical) systems; with a
// kept, extraction follows the modified equations
//   J = grad a - dtau A - i rot A,   rho = div A - dtau a.

#include <stdexcept>

#include "bq/field.hpp"
#include "bq/operators.hpp"

namespace bq {

struct Medium {
  double eps = 1.0;
  double mu = 1.0;

  Medium() = default;
  Medium(double eps_, double mu_) : eps(eps_), mu(mu_) {
    if (!(eps > 0.0) || !(mu > 0.0)) throw std::invalid_argument("Medium: eps, mu must be positive");
  }
  double c() const { return 1.0 / std::sqrt(eps * mu); }
  double se() const { return std::sqrt(eps); }
  double sm() const { return std::sqrt(mu); }
};

struct EgmState {
  VecField E, H;
  ScalarField a;  // resistance; identically zero reproduces the closed system
  Medium medium;

  explicit EgmState(const Grid& g, const Medium& m = {}) : E(g), H(g), a(g), medium(m) {}
};

struct ChargeCurrent {
  ScalarField rhoE, rhoH;
  VecField jE, jH;

  explicit ChargeCurrent(const Grid& g) : rhoE(g), rhoH(g), jE(g), jH(g) {}
};

// Complex assemblies of Eq.-style densities.
inline Complex complex_charge(double rhoE, double rhoH, const Medium& m) {
  return {rhoE / m.se(), -rhoH / m.sm()};
}
inline Vec3c complex_current(const Vec3& jE, const Vec3& jH, const Medium& m) {
  return {m.sm() * jE, -m.se() * jH};
}

struct Assembled {
  BiqField A;
  BiqField Theta;
};

inline Assembled assemble(const EgmState& st, const ChargeCurrent& cc) {
  require_same_grid(st.E.grid, cc.rhoE.grid);
  const Grid& g = st.E.grid;
  Assembled out{BiqField(g), BiqField(g)};
  const Medium& m = st.medium;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3c tension{m.se() * st.E[i], m.sm() * st.H[i]};
    out.A[i] = Biquaternion{I * st.a[i], tension};
    Complex rho = complex_charge(cc.rhoE[i], cc.rhoH[i], m);
    Vec3c J = complex_current(cc.jE[i], cc.jH[i], m);
    out.Theta[i] = Biquaternion{-I * rho, -J};
  }
  return out;
}

struct SplitState {
  EgmState state;
  ChargeCurrent cc;
};

// Inverse of assemble; exact up to rounding for any positive medium.
inline SplitState split(const BiqField& A, const BiqField& Theta, const Medium& m) {
  require_same_grid(A.grid, Theta.grid);
  SplitState out{EgmState(A.grid, m), ChargeCurrent(A.grid)};
  for (std::size_t i = 0; i < A.size(); ++i) {
    out.state.a[i] = A[i].s.imag();
    out.state.E[i] = (1.0 / m.se()) * A[i].v.real();
    out.state.H[i] = (1.0 / m.sm()) * A[i].v.imag();
    Complex rho = I * Theta[i].s;  // Theta.s = -i rho
    Vec3c J = -Theta[i].v;
    out.cc.rhoE[i] = m.se() * rho.real();
    out.cc.rhoH[i] = -m.sm() * rho.imag();
    out.cc.jE[i] = (1.0 / m.sm()) * J.real();
    out.cc.jH[i] = (-1.0 / m.se()) * J.imag();
  }
  return out;
}

struct ExtractedChargeCurrent {
  CScalarField rho;
  CVecField J;
};

// Modified-Maxwell extraction from a tension stack (scalar part i a):
// rho = i * scalar(nabla+ A), J = -vector(nabla+ A), which expands to
// Eq.-form J = grad a - dtau A - i rot A, rho = div A - dtau a.
inline ExtractedChargeCurrent extract_charge_current(const SampleStack& A_stack, int order = 2) {
  BiqField theta = bigradient(A_stack, Sign::plus, order);
  ExtractedChargeCurrent out{CScalarField(A_stack.grid()), CVecField(A_stack.grid())};
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out.rho[i] = I * theta[i].s;
    out.J[i] = -theta[i].v;
  }
  return out;
}

// nabla^+ A - Theta; zero iff the pair solves the Maxwell system.
inline BiqField maxwell_residual(const SampleStack& A_stack, const BiqField& Theta, int order = 2) {
  require_same_grid(A_stack.grid(), Theta.grid);
  BiqField bg = bigradient(A_stack, Sign::plus, order);
  BiqField out(A_stack.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bg[i] - Theta[i];
  return out;
}

struct EnergyPulse {
  ScalarField W;
  VecField P;
  BiqField Xi;
};

// W = 0.5 (A, conj A), P = 0.5 i [A, conj A]; both are exactly real in
// exact arithmetic, so the imaginary residue is checked and dropped.
// Xi carries the full product 0.5 A o A*.
inline EnergyPulse energy_pulse(const BiqField& A) {
  EnergyPulse out{ScalarField(A.grid), VecField(A.grid), BiqField(A.grid)};
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Biquaternion& b = A[i];
    double w = 0.5 * (std::norm(b.s) + norm_sq(b.v));
    Vec3c p = 0.5 * I * cross(b.v, conj(b.v));
    double scale = 1.0 + std::abs(w);
    if (std::abs(p.x.imag()) > 1e-12 * scale || std::abs(p.y.imag()) > 1e-12 * scale ||
        std::abs(p.z.imag()) > 1e-12 * scale)
      throw std::runtime_error("energy_pulse: Poynting vector has imaginary residue");
    out.W[i] = w;
    out.P[i] = p.real();
    out.Xi[i] = 0.5 * mul(b, conj_quat(b));
  }
  return out;
}

struct PotentialTension {
  BiqField A;
  CScalarField gauge_residual;  // dtau phi - div Psi
};

// Potential biquaternion Phi = i phi - Psi; under Lorentz calibration the
// tension is A = nabla^- Phi.  phi and Psi are recovered from the stack's
// scalar/vector parts.
inline PotentialTension tension_from_potential(const SampleStack& pot_stack, int order = 2) {
  const Grid& g = pot_stack.grid();
  PotentialTension out{bigradient(pot_stack, Sign::minus, order), CScalarField(g)};

  CScalarField phi_prev(g), phi_next(g);
  CVecField psi_c(g);
  int j = pot_stack.center();
  for (std::size_t i = 0; i < g.size(); ++i) {
    phi_prev[i] = -I * pot_stack.slices[j - 1][i].s;  // scalar part is i phi
    phi_next[i] = -I * pot_stack.slices[j + 1][i].s;
    psi_c[i] = -pot_stack.slices[j][i].v;
  }
  CScalarField div_psi = divergence(psi_c, order);
  const double f = 1.0 / (2.0 * pot_stack.dtau);
  for (std::size_t i = 0; i < g.size(); ++i)
    out.gauge_residual[i] = f * (phi_next[i] - phi_prev[i]) - div_psi[i];
  return out;
}

struct ConservationResiduals {
  CScalarField charge_res;  // dtau rho + div J
  ScalarField energy_res;   // dtau W + div P + Re(J, conj A)
};

inline ConservationResiduals conservation_residuals(const Stack<Complex>& rho_stack,
                                                    const Stack<Vec3c>& J_stack,
                                                    const Stack<double>& W_stack,
                                                    const Stack<Vec3>& P_stack,
                                                    const BiqField& A_center, int order = 2) {
  const Grid& g = rho_stack.grid();
  require_same_grid(g, J_stack.grid());
  require_same_grid(g, W_stack.grid());
  require_same_grid(g, P_stack.grid());
  require_same_grid(g, A_center.grid);

  ConservationResiduals out{CScalarField(g), ScalarField(g)};

  CScalarField drho = time_derivative(rho_stack);
  CScalarField divJ = divergence(J_stack.slices[J_stack.center()], order);
  ScalarField dW = time_derivative(W_stack);

  CVecField p_c(g);
  const VecField& P = P_stack.slices[P_stack.center()];
  for (std::size_t i = 0; i < g.size(); ++i) p_c[i] = Vec3c(P[i]);
  CScalarField divP = divergence(p_c, order);

  const CVecField& J = J_stack.slices[J_stack.center()];
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.charge_res[i] = drho[i] + divJ[i];
    double jdotA = dot(J[i], conj(A_center[i].v)).real();
    out.energy_res[i] = dW[i] + divP[i].real() + jdotA;
  }
  return out;
}

}  // namespace bq
