#pragma once

// Newton-law analogs for charge-current fields.
//
// Governing system (canonical operator/sign convention, under which the
// component equations for currents, the stress balances and the
// thermodynamic law all hold verbatim):
//   kappa nabla^- Theta^k = -Theta^k o (sum_{m != k} A^m)      (second law)
//   nabla^+ A^k = Theta^k                                       (Maxwell)
//   Theta^1 o A^2 + Theta^2 o A^1 = 0                           (third law)
// Free field: nabla^- Theta = 0 (inertia law).
//
// Time integration is classic RK4 method-of-lines; diagnostics difference
// short re-propagated windows, never the stored step history.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bq/egm.hpp"
#include "bq/field.hpp"
#include "bq/operators.hpp"

namespace bq {

struct PowerForce {
  CScalarField M;  // complex power density (A',J) + a' rho
  VecField FH;     // gravimagnetic force density
  VecField FE;     // electric force density
  BiqField raw;    // Theta o A' = M - i(FH + i FE)
};

// Force of the primed field on the charge-current Theta.
inline PowerForce power_force(const BiqField& Theta, const BiqField& A_other) {
  require_same_grid(Theta.grid, A_other.grid);
  PowerForce out{CScalarField(Theta.grid), VecField(Theta.grid), VecField(Theta.grid),
                 BiqField(Theta.grid)};
  for (std::size_t i = 0; i < Theta.size(); ++i) {
    Biquaternion r = mul(Theta[i], A_other[i]);
    out.raw[i] = r;
    out.M[i] = r.s;
    Vec3c fv = I * r.v;  // raw vector part is -i(FH + i FE)
    out.FH[i] = fv.real();
    out.FE[i] = fv.imag();
  }
  return out;
}

// Theta1 o A2 + Theta2 o A1; zero iff the action-reaction law holds.
inline BiqField action_reaction_residual(const BiqField& Theta1, const BiqField& A2,
                                         const BiqField& Theta2, const BiqField& A1) {
  require_same_grid(Theta1.grid, A2.grid);
  require_same_grid(Theta2.grid, A1.grid);
  require_same_grid(Theta1.grid, Theta2.grid);
  BiqField out(Theta1.grid);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = mul(Theta1[i], A2[i]) + mul(Theta2[i], A1[i]);
  return out;
}

// dtau Theta for the inertia law nabla^- Theta = 0.
inline BiqField free_field_rhs(const BiqField& Theta, int order = 2) {
  return spatial_quaternion_derivative(Theta, order);
}

struct FieldComponent {
  BiqField A;
  BiqField Theta;
  Medium medium;
};

struct InteractionSystem {
  std::vector<FieldComponent> fields;
  double kappa = 1.0;
  int order = 2;
  double tau = 0.0;
  // "much stronger field" mode: a frozen tension every Theta couples to
  std::optional<BiqField> background;

  const Grid& grid() const { return fields.front().A.grid; }
};

struct StepError : std::runtime_error {
  int field_index;
  long long grid_index;
  StepError(const std::string& msg, int f, long long gi)
      : std::runtime_error(msg), field_index(f), grid_index(gi) {}
};

namespace detail {

using SystemState = std::vector<BiqField>;  // [A_1..A_N, T_1..T_N]

inline SystemState state_of(const InteractionSystem& sys) {
  SystemState s;
  for (const auto& f : sys.fields) s.push_back(f.A);
  for (const auto& f : sys.fields) s.push_back(f.Theta);
  return s;
}

struct RhsWorkspace {
  BiqField total;
  BiqField dA, dT;
};

inline void eval_rhs(const InteractionSystem& sys, const SystemState& y, SystemState& dy,
                     RhsWorkspace& ws) {
  const int N = static_cast<int>(sys.fields.size());
  const Grid& g = sys.grid();
  if (dy.size() != static_cast<std::size_t>(2 * N) || dy.front().grid != g)
    dy.assign(2 * N, BiqField(g));
  if (ws.total.grid != g) ws.total = BiqField(g);

  const std::size_t sz = g.size();
  for (std::size_t i = 0; i < sz; ++i) {
    Biquaternion acc = sys.background ? (*sys.background)[i] : Biquaternion{};
    for (int k = 0; k < N; ++k) acc += y[k][i];
    ws.total[i] = acc;
  }

  const double inv_kappa = 1.0 / sys.kappa;
  for (int k = 0; k < N; ++k) {
    const BiqField& A = y[k];
    const BiqField& T = y[N + k];
    spatial_quaternion_derivative_into(A, sys.order, ws.dA);
    spatial_quaternion_derivative_into(T, sys.order, ws.dT);
    for (std::size_t i = 0; i < sz; ++i) {
      Biquaternion partner = ws.total[i] - A[i];
      dy[k][i] = T[i] - ws.dA[i];
      dy[N + k][i] = ws.dT[i] - inv_kappa * mul(T[i], partner);
    }
  }
}

inline void add_scaled(SystemState& out, const SystemState& base, double a,
                       const SystemState& k) {
  for (std::size_t f = 0; f < out.size(); ++f)
    for (std::size_t i = 0; i < out[f].size(); ++i)
      out[f][i] = base[f][i] + a * k[f][i];
}

inline void scan_finite(const SystemState& y, int N, double tau) {
  for (int f = 0; f < 2 * N; ++f)
    for (std::size_t i = 0; i < y[f].size(); ++i)
      if (!finite(y[f][i]))
        throw StepError("step_interaction: non-finite value after step at tau=" +
                            std::to_string(tau) + " field=" + std::to_string(f % N) +
                            (f < N ? " (A)" : " (Theta)") + " index=" + std::to_string(i),
                        f % N, static_cast<long long>(i));
}

inline InteractionSystem repack(const InteractionSystem& sys, SystemState&& y, double tau) {
  InteractionSystem out = sys;
  out.tau = tau;
  const int N = static_cast<int>(sys.fields.size());
  for (int k = 0; k < N; ++k) {
    out.fields[k].A = std::move(y[k]);
    out.fields[k].Theta = std::move(y[N + k]);
  }
  return out;
}

}  // namespace detail

// One classic RK4 step; dt may be negative (used by diagnostic windows).
inline InteractionSystem step_interaction(const InteractionSystem& sys, double dt,
                                          bool enforce_cfl = true) {
  if (sys.fields.empty()) throw std::invalid_argument("step_interaction: empty system");
  if (sys.kappa == 0.0 || !std::isfinite(sys.kappa))
    throw std::invalid_argument("step_interaction: kappa must be finite and nonzero");
  const double h = sys.grid().h;
  if (enforce_cfl && std::abs(dt) > 0.5 * h * (1.0 + 1e-12))
    throw std::invalid_argument("step_interaction: dt exceeds h/2 bound");

  using detail::SystemState;
  detail::RhsWorkspace ws;
  SystemState y = detail::state_of(sys);
  SystemState k1, k2, k3, k4;
  SystemState stage = y;

  detail::eval_rhs(sys, y, k1, ws);
  detail::add_scaled(stage, y, 0.5 * dt, k1);
  detail::eval_rhs(sys, stage, k2, ws);
  detail::add_scaled(stage, y, 0.5 * dt, k2);
  detail::eval_rhs(sys, stage, k3, ws);
  detail::add_scaled(stage, y, dt, k3);
  detail::eval_rhs(sys, stage, k4, ws);

  const double w = dt / 6.0;
  for (std::size_t f = 0; f < y.size(); ++f)
    for (std::size_t i = 0; i < y[f].size(); ++i)
      y[f][i] += w * (k1[f][i] + 2.0 * k2[f][i] + 2.0 * k3[f][i] + k4[f][i]);

  const int N = static_cast<int>(sys.fields.size());
  detail::scan_finite(y, N, sys.tau + dt);
  return detail::repack(sys, std::move(y), sys.tau + dt);
}

// Midpoint (RK2) step used by diagnostic windows: O(dt^3) local accuracy is
// enough for a +-delta sample and costs half the RHS evaluations.
inline InteractionSystem step_interaction_rk2(const InteractionSystem& sys, double dt) {
  if (sys.fields.empty()) throw std::invalid_argument("step_interaction: empty system");
  using detail::SystemState;
  detail::RhsWorkspace ws;
  SystemState y = detail::state_of(sys);
  SystemState k1, k2;
  SystemState stage = y;
  detail::eval_rhs(sys, y, k1, ws);
  detail::add_scaled(stage, y, 0.5 * dt, k1);
  detail::eval_rhs(sys, stage, k2, ws);
  for (std::size_t f = 0; f < y.size(); ++f)
    for (std::size_t i = 0; i < y[f].size(); ++i) y[f][i] += dt * k2[f][i];
  const int N = static_cast<int>(sys.fields.size());
  detail::scan_finite(y, N, sys.tau + dt);
  return detail::repack(sys, std::move(y), sys.tau + dt);
}

// 3-slice window around the current instant obtained by re-propagating the
// system +-delta; decouples diagnostic differencing from the step size.
struct DiagWindow {
  InteractionSystem prev, center, next;
  double delta;
};

// The +-delta samples use full RK4 so the window's central difference keeps
// the classical delta^2/6 truncation signature that the convergence-order
// diagnostics measure (a midpoint window would cancel it on linear systems).
inline DiagWindow diagnostic_window(const InteractionSystem& sys, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("diagnostic_window: delta must be positive");
  return {step_interaction(sys, -delta, false), sys, step_interaction(sys, delta, false), delta};
}

inline SampleStack theta_stack(const DiagWindow& w, int k) {
  return SampleStack({w.prev.fields[k].Theta, w.center.fields[k].Theta, w.next.fields[k].Theta},
                     w.delta, w.center.tau - w.delta);
}

inline SampleStack tension_stack(const DiagWindow& w, int k) {
  return SampleStack({w.prev.fields[k].A, w.center.fields[k].A, w.next.fields[k].A}, w.delta,
                     w.center.tau - w.delta);
}

// Real densities recovered from a charge-current biquaternion.
inline ChargeCurrent real_densities(const BiqField& Theta, const Medium& m) {
  ChargeCurrent cc(Theta.grid);
  for (std::size_t i = 0; i < Theta.size(); ++i) {
    Complex rho = I * Theta[i].s;
    Vec3c J = -Theta[i].v;
    cc.rhoE[i] = m.se() * rho.real();
    cc.rhoH[i] = -m.sm() * rho.imag();
    cc.jE[i] = (1.0 / m.sm()) * J.real();
    cc.jH[i] = (-1.0 / m.se()) * J.imag();
  }
  return cc;
}

// ---- stress pseudotensors ----

using Tensor3 = std::array<double, 9>;  // row-major sigma_ik

struct StressTensors {
  Field<Tensor3> sigmaH;
  Field<Tensor3> sigmaE;
};

inline StressTensors stress_tensors(const ChargeCurrent& cc, const Medium& m, double kappa) {
  StressTensors out{Field<Tensor3>(cc.rhoE.grid), Field<Tensor3>(cc.rhoE.grid)};
  auto levi = [](int i, int k, int l) {
    if (i == k || k == l || i == l) return 0.0;
    // parity of the permutation (i,k,l) of (0,1,2)
    return ((k - i + 3) % 3 == 1) ? 1.0 : -1.0;
  };
  for (std::size_t p = 0; p < cc.rhoE.size(); ++p) {
    double jE[3] = {cc.jE[p].x, cc.jE[p].y, cc.jE[p].z};
    double jH[3] = {cc.jH[p].x, cc.jH[p].y, cc.jH[p].z};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        double eH = 0.0, eE = 0.0;
        for (int l = 0; l < 3; ++l) {
          eH += levi(i, k, l) * jE[l];
          eE += levi(i, k, l) * jH[l];
        }
        out.sigmaH[p][3 * i + k] =
            -kappa * (cc.rhoH[p] / m.sm() * (i == k ? 1.0 : 0.0) + m.sm() * eH);
        out.sigmaE[p][3 * i + k] =
            -kappa * (cc.rhoE[p] / m.se() * (i == k ? 1.0 : 0.0) - m.se() * eE);
      }
  }
  return out;
}

struct StressBalance {
  VecField resH;  // d_k sigmaH_ik + FH_i - kappa sqrt(eps) dtau jH_i
  VecField resE;  // d_k sigmaE_ik + FE_i - kappa sqrt(mu) dtau jE_i
};

// Left-minus-right of the hydrodynamic balance forms; a rearrangement of the
// current transformation equations, so it vanishes along evolved states up to
// discretization error.
inline StressBalance stress_balance_residual(const ChargeCurrent& prev, const ChargeCurrent& cur,
                                             const ChargeCurrent& next, double delta,
                                             const PowerForce& F, const Medium& m, double kappa,
                                             int order = 2) {
  const Grid& g = cur.rhoE.grid;
  StressTensors sig = stress_tensors(cur, m, kappa);
  StressBalance out{VecField(g), VecField(g)};

  // divergence of each tensor row via component fields
  for (int i = 0; i < 3; ++i) {
    CScalarField rowH[3] = {CScalarField(g), CScalarField(g), CScalarField(g)};
    CScalarField rowE[3] = {CScalarField(g), CScalarField(g), CScalarField(g)};
    for (std::size_t p = 0; p < g.size(); ++p)
      for (int k = 0; k < 3; ++k) {
        rowH[k][p] = sig.sigmaH[p][3 * i + k];
        rowE[k][p] = sig.sigmaE[p][3 * i + k];
      }
    CScalarField divH = partial(rowH[0], 0, order);
    CScalarField divE = partial(rowE[0], 0, order);
    for (int k = 1; k < 3; ++k) {
      CScalarField dH = partial(rowH[k], k, order);
      CScalarField dE = partial(rowE[k], k, order);
      for (std::size_t p = 0; p < g.size(); ++p) {
        divH[p] += dH[p];
        divE[p] += dE[p];
      }
    }
    const double fdt = 1.0 / (2.0 * delta);
    for (std::size_t p = 0; p < g.size(); ++p) {
      double djH = fdt * ((i == 0   ? next.jH[p].x - prev.jH[p].x
                           : i == 1 ? next.jH[p].y - prev.jH[p].y
                                    : next.jH[p].z - prev.jH[p].z));
      double djE = fdt * ((i == 0   ? next.jE[p].x - prev.jE[p].x
                           : i == 1 ? next.jE[p].y - prev.jE[p].y
                                    : next.jE[p].z - prev.jE[p].z));
      double fH = i == 0 ? F.FH[p].x : i == 1 ? F.FH[p].y : F.FH[p].z;
      double fE = i == 0 ? F.FE[p].x : i == 1 ? F.FE[p].y : F.FE[p].z;
      double rh = divH[p].real() + fH - kappa * m.se() * djH;
      double re = divE[p].real() + fE - kappa * m.sm() * djE;
      if (i == 0) {
        out.resH[p].x = rh;
        out.resE[p].x = re;
      } else if (i == 1) {
        out.resH[p].y = rh;
        out.resE[p].y = re;
      } else {
        out.resH[p].z = rh;
        out.resE[p].z = re;
      }
    }
  }
  return out;
}

// ---- charge-current energetics ----

struct ChargeCurrentEnergy {
  ScalarField Q;   // 0.5 ||J||^2
  VecField PJ;     // 0.5 i J x conj J = c^-1 [jH, jE]
  BiqField Xi;     // 0.5 Theta o Theta*
};

inline ChargeCurrentEnergy charge_current_energy(const BiqField& Theta) {
  ChargeCurrentEnergy out{ScalarField(Theta.grid), VecField(Theta.grid), BiqField(Theta.grid)};
  for (std::size_t i = 0; i < Theta.size(); ++i) {
    Vec3c J = -Theta[i].v;
    out.Q[i] = 0.5 * norm_sq(J);
    Vec3c pj = 0.5 * I * cross(J, conj(J));
    out.PJ[i] = pj.real();
    out.Xi[i] = 0.5 * mul(Theta[i], conj_quat(Theta[i]));
  }
  return out;
}

// Algebraic core of the thermodynamic-law residual, exposed separately so
// analytic ingredients can be fed straight in.
inline ScalarField thermo_residual_parts(const ScalarField& dQ, const ScalarField& divPJ,
                                         const CVecField& grad_rho, const CVecField& J,
                                         const CVecField& Fv, double kappa) {
  ScalarField out(dQ.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double lhs = kappa * (dQ[i] - divPJ[i] + dot(grad_rho[i], conj(J[i])).real());
    double rhs = dot(Fv[i], conj(J[i])).imag();
    out[i] = lhs - rhs;
  }
  return out;
}

// kappa (dtau Q - div PJ + Re(grad rho, conj J)) - Im(F, conj J) from a
// charge-current window and the acting power-force.
inline ScalarField thermo_residual(const SampleStack& theta_window, const PowerForce& F,
                                   double kappa, int order = 2) {
  const Grid& g = theta_window.grid();
  const int jc = theta_window.center();

  ScalarField qm(g), qp(g);
  VecField pj(g);
  CScalarField rho(g);
  CVecField J(g), Fv(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3c Jm = -theta_window.slices[jc - 1][i].v;
    Vec3c Jp = -theta_window.slices[jc + 1][i].v;
    qm[i] = 0.5 * norm_sq(Jm);
    qp[i] = 0.5 * norm_sq(Jp);
    J[i] = -theta_window.slices[jc][i].v;
    rho[i] = I * theta_window.slices[jc][i].s;
    pj[i] = (0.5 * I * cross(J[i], conj(J[i]))).real();
    Fv[i] = Vec3c(F.FH[i], F.FE[i]);
  }
  ScalarField dQ(g);
  const double fdt = 1.0 / (2.0 * theta_window.dtau);
  for (std::size_t i = 0; i < g.size(); ++i) dQ[i] = fdt * (qp[i] - qm[i]);

  CVecField pj_c(g);
  for (std::size_t i = 0; i < g.size(); ++i) pj_c[i] = Vec3c(pj[i]);
  CScalarField divPJ_c = divergence(pj_c, order);
  ScalarField divPJ(g);
  for (std::size_t i = 0; i < g.size(); ++i) divPJ[i] = divPJ_c[i].real();

  CVecField grad_rho = gradient(rho, order);
  return thermo_residual_parts(dQ, divPJ, grad_rho, J, Fv, kappa);
}

// ---- interaction energy of N charge-current fields ----

enum class EnergyClass : int { absorption = -1, conservation = 0, separation = 1 };

struct InteractionEnergy {
  BiqField total;                  // 0.5 (sum Theta) o (sum Theta)*
  BiqField delta;                  // cross part, sum_{k<l} Xi^{kl}
  std::vector<BiqField> pairwise;  // Xi^{kl} for k < l, lexicographic
  std::vector<EnergyClass> classification;
  long long n_separation = 0, n_absorption = 0, n_conservation = 0;
};

inline InteractionEnergy interaction_energy(const std::vector<const BiqField*>& thetas) {
  if (thetas.empty()) throw std::invalid_argument("interaction_energy: empty field list");
  const Grid& g = thetas.front()->grid;
  for (auto* t : thetas) require_same_grid(t->grid, g);
  const int N = static_cast<int>(thetas.size());

  InteractionEnergy out;
  out.total = BiqField(g);
  out.delta = BiqField(g);
  out.classification.assign(g.size(), EnergyClass::conservation);

  BiqField sum(g);
  for (auto* t : thetas)
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] += (*t)[i];
  ScalarField self_scale(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.total[i] = 0.5 * mul(sum[i], conj_quat(sum[i]));
    for (int k = 0; k < N; ++k)
      self_scale[i] += std::abs(0.5 * mul((*thetas[k])[i], conj_quat((*thetas[k])[i])).s.real());
  }

  for (int k = 0; k < N; ++k)
    for (int l = k + 1; l < N; ++l) {
      BiqField pair(g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        pair[i] = 0.5 * (mul((*thetas[k])[i], conj_quat((*thetas[l])[i])) +
                         mul((*thetas[l])[i], conj_quat((*thetas[k])[i])));
        out.delta[i] += pair[i];
      }
      out.pairwise.push_back(std::move(pair));
    }

  for (std::size_t i = 0; i < g.size(); ++i) {
    double dw = out.delta[i].s.real();
    double tol = 1e-12 * self_scale[i];
    if (dw > tol) {
      out.classification[i] = EnergyClass::separation;
      ++out.n_separation;
    } else if (dw < -tol) {
      out.classification[i] = EnergyClass::absorption;
      ++out.n_absorption;
    } else {
      ++out.n_conservation;
    }
  }
  return out;
}

}  // namespace bq
