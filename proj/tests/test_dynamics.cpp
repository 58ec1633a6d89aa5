#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bq/dynamics.hpp"
#include "bq/rng.hpp"

using namespace bq;

namespace {

constexpr double pi = 3.14159265358979323846;

Grid grid_2pi(int n) { return Grid(n, 2.0 * pi / n); }

BiqField constant_field(const Grid& g, const Biquaternion& b) { return BiqField(g, b); }

// smooth periodic gaussian-like bump
double bump(const Vec3& x, const Vec3& c, double width, double L) {
  auto per = [L](double d) { return std::fmod(d + 1.5 * L, L) - 0.5 * L; };
  double r2 = per(x.x - c.x) * per(x.x - c.x) + per(x.y - c.y) * per(x.y - c.y) +
              per(x.z - c.z) * per(x.z - c.z);
  return std::exp(-r2 / (2.0 * width * width));
}

InteractionSystem two_field_system(int n, double amp) {
  Grid g = grid_2pi(n);
  double L = g.extent();
  Vec3 c1{0.4 * L, 0.5 * L, 0.5 * L}, c2{0.6 * L, 0.5 * L, 0.5 * L};
  InteractionSystem sys;
  sys.kappa = 1.0;
  for (int k = 0; k < 2; ++k) {
    FieldComponent f{BiqField(g), BiqField(g), Medium()};
    const Vec3& c = k == 0 ? c1 : c2;
    double sgn = k == 0 ? 1.0 : -1.0;
    for (int i3 = 0; i3 < g.n; ++i3)
      for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
          double b = amp * sgn * bump(g.coord(i1, i2, i3), c, 0.12 * L, L);
          f.Theta.at(i1, i2, i3) = Biquaternion{-I * b};
          f.A.at(i1, i2, i3) = Biquaternion{Vec3c{Complex(0.5 * b), Complex(0), Complex(0)}};
        }
    sys.fields.push_back(std::move(f));
  }
  return sys;
}

}  // namespace

TEST_CASE("power_force") {
  Grid g(8, 0.5);

  SECTION("static charge in a transverse tension: pure Coulomb-type force") {
    BiqField theta = constant_field(g, Biquaternion{-I});  // rho = 1
    BiqField a_other = constant_field(g, Biquaternion{Vec3c{Complex(1), Complex(0), Complex(0)}});
    auto pf = power_force(theta, a_other);
    CHECK(pf.raw[0].s == Complex(0));
    CHECK(pf.raw[0].v.x == -I);
    CHECK(pf.M[0] == Complex(0));
    CHECK(pf.FH[0].x == Catch::Approx(1.0));
    CHECK(norm(pf.FE[0]) < 1e-15);
  }

  SECTION("resistance force of the primed field") {
    // a' = 1, rho = 0, J = e1  =>  raw = -i e1
    BiqField theta = constant_field(g, Biquaternion{-Vec3c{Complex(1), Complex(0), Complex(0)}});
    BiqField a_other = constant_field(g, Biquaternion{I});
    auto pf = power_force(theta, a_other);
    CHECK(pf.raw[0].s == Complex(0));
    CHECK(pf.raw[0].v.x == -I);
    CHECK(pf.FH[0].x == Catch::Approx(1.0));
  }

  SECTION("zero charge-current gives zero") {
    auto pf = power_force(BiqField(g), constant_field(g, Biquaternion{I, Vec3c{I, I, I}}));
    CHECK(max_norm(pf.raw) == 0.0);
    CHECK(max_norm(pf.FH) == 0.0);
    CHECK(max_norm(pf.FE) == 0.0);
  }

  SECTION("raw vector part reassembles from FH, FE") {
    Rng rng(8);
    BiqField theta(g), a_other(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      theta[i] = rng.biquaternion(2.0);
      a_other[i] = rng.biquaternion(2.0);
    }
    auto pf = power_force(theta, a_other);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec3c rebuilt = -I * Vec3c(pf.FH[i], pf.FE[i]);
      worst = std::max(worst, std::sqrt(norm_sq(pf.raw[i].v - rebuilt)));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("action_reaction_residual") {
  Grid g(8, 0.5);
  Rng rng(9);
  BiqField theta1(g), a1(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    theta1[i] = rng.biquaternion();
    a1[i] = rng.biquaternion();
  }

  SECTION("antisymmetric configuration vanishes") {
    BiqField theta2(g);
    for (std::size_t i = 0; i < g.size(); ++i) theta2[i] = -theta1[i];
    auto r = action_reaction_residual(theta1, a1, theta2, a1);
    CHECK(max_norm(r) < 1e-14);
  }

  SECTION("two equal power-force terms add up") {
    BiqField theta = constant_field(g, Biquaternion{-I});
    BiqField e1f = constant_field(g, Biquaternion{Vec3c{Complex(1), Complex(0), Complex(0)}});
    auto r = action_reaction_residual(theta, e1f, theta, e1f);
    CHECK(r[0].v.x == Complex(0, -2));
    CHECK(r[0].s == Complex(0));
  }

  SECTION("zero tensions give zero") {
    auto r = action_reaction_residual(theta1, BiqField(g), theta1, BiqField(g));
    CHECK(max_norm(r) == 0.0);
  }
}

TEST_CASE("free_field_rhs") {
  Grid g = grid_2pi(32);

  SECTION("spatially uniform charge-current is static") {
    auto rhs = free_field_rhs(constant_field(g, Biquaternion{-I * 2.0, Vec3c{I, Complex(1), I}}));
    CHECK(max_norm(rhs) == 0.0);
  }

  SECTION("rho = sin(x1): current builds against the gradient") {
    auto theta = sample_field<Biquaternion>(g, [](const Vec3& x) {
      return Biquaternion{-I * std::sin(x.x)};
    });
    auto rhs = free_field_rhs(theta);
    double h2 = g.h * g.h;
    for (int i = 0; i < g.n; ++i) {
      Vec3 x = g.coord(i, 3, 11);
      // dtau J = -grad rho: vector rhs is dtau(theta_v) = -dtau J = +cos(x1) e1
      CHECK(std::abs(rhs.at(i, 3, 11).v.x - Complex(std::cos(x.x))) < h2);
      CHECK(std::abs(rhs.at(i, 3, 11).s) < 1e-13);
    }
  }
}

TEST_CASE("step_interaction") {
  SECTION("N=1 reduces to free-field integration") {
    Grid g = grid_2pi(16);
    InteractionSystem sys;
    sys.fields.push_back({BiqField(g), BiqField(g), Medium()});
    double L = g.extent();
    for (int i3 = 0; i3 < g.n; ++i3)
      for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
          double b = bump(g.coord(i1, i2, i3), {0.5 * L, 0.5 * L, 0.5 * L}, 0.12 * L, L);
          sys.fields[0].Theta.at(i1, i2, i3) = Biquaternion{-I * b};
        }

    double dt = g.h / 4.0;
    auto stepped = step_interaction(sys, dt);

    // manual RK4 of dTheta/dtau = D Theta with the same arithmetic
    const BiqField& y0 = sys.fields[0].Theta;
    BiqField k1 = free_field_rhs(y0);
    auto add = [&](const BiqField& base, double a, const BiqField& k) {
      BiqField out(base.grid);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + a * k[i];
      return out;
    };
    BiqField k2 = free_field_rhs(add(y0, 0.5 * dt, k1));
    BiqField k3 = free_field_rhs(add(y0, 0.5 * dt, k2));
    BiqField k4 = free_field_rhs(add(y0, dt, k3));
    BiqField manual(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      manual[i] = y0[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, norm(stepped.fields[0].Theta[i] - manual[i]));
    CHECK(worst < 1e-13);
  }

  SECTION("uniform Theta with no partner field stays put") {
    Grid g = grid_2pi(8);
    InteractionSystem sys;
    sys.fields.push_back({BiqField(g), constant_field(g, Biquaternion{-I, Vec3c{I, I, I}}),
                          Medium()});
    auto stepped = step_interaction(sys, g.h / 4.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, norm(stepped.fields[0].Theta[i] - sys.fields[0].Theta[i]));
    CHECK(worst < 1e-15);
  }

  SECTION("CFL-like guard") {
    Grid g = grid_2pi(8);
    InteractionSystem sys;
    sys.fields.push_back({BiqField(g), BiqField(g), Medium()});
    CHECK_THROWS_AS(step_interaction(sys, g.h), std::invalid_argument);
  }

  SECTION("non-finite values abort with context") {
    Grid g = grid_2pi(8);
    InteractionSystem sys;
    double huge = 1e308;
    sys.fields.push_back({constant_field(g, Biquaternion{Complex(huge)}),
                          constant_field(g, Biquaternion{Complex(huge)}), Medium()});
    sys.fields.push_back({constant_field(g, Biquaternion{Complex(huge)}),
                          constant_field(g, Biquaternion{Complex(huge)}), Medium()});
    CHECK_THROWS_AS(step_interaction(sys, g.h / 4.0), StepError);
  }

  SECTION("fourth-order time accuracy on a smooth two-field run") {
    InteractionSystem sys = two_field_system(12, 0.5);
    double h = sys.grid().h;
    double T = h;
    auto run = [&](double dt) {
      InteractionSystem s = sys;
      int steps = static_cast<int>(std::round(T / dt));
      for (int i = 0; i < steps; ++i) s = step_interaction(s, dt);
      return s;
    };
    auto ref = run(h / 32.0);
    auto coarse = run(h / 4.0);
    auto fine = run(h / 8.0);
    auto err = [&](const InteractionSystem& s) {
      double w = 0.0;
      for (int k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < s.grid().size(); ++i) {
          w = std::max(w, norm(s.fields[k].Theta[i] - ref.fields[k].Theta[i]));
          w = std::max(w, norm(s.fields[k].A[i] - ref.fields[k].A[i]));
        }
      return w;
    };
    double ratio = err(coarse) / err(fine);
    CHECK(ratio > 11.0);
    CHECK(ratio < 22.0);
  }
}

TEST_CASE("stress tensors") {
  Grid g(8, 0.5);

  SECTION("isotropic gravimagnetic charge") {
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) cc.rhoH[i] = 1.0;
    auto st = stress_tensors(cc, Medium(1, 1), 1.0);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        CHECK(st.sigmaH[0][3 * i + k] == Catch::Approx(i == k ? -1.0 : 0.0));
    CHECK(st.sigmaE[0][0] == 0.0);
  }

  SECTION("current along e3 gives an antisymmetric part") {
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) cc.jE[i] = {0, 0, 1};
    auto st = stress_tensors(cc, Medium(1, 1), 1.0);
    CHECK(st.sigmaH[0][3 * 0 + 1] == Catch::Approx(-1.0));  // sigma_12
    CHECK(st.sigmaH[0][3 * 1 + 0] == Catch::Approx(1.0));   // sigma_21
    CHECK(st.sigmaH[0][0] == 0.0);
  }

  SECTION("zero charge-current gives zero tensors") {
    auto st = stress_tensors(ChargeCurrent(g), Medium(2, 3), 1.5);
    for (int c = 0; c < 9; ++c) {
      CHECK(st.sigmaH[0][c] == 0.0);
      CHECK(st.sigmaE[0][c] == 0.0);
    }
  }
}

TEST_CASE("stress balance residual") {
  Grid g = grid_2pi(16);
  Medium m(1.3, 0.7);
  double kappa = 1.7;

  SECTION("static zero fields give zero") {
    ChargeCurrent cc(g);
    PowerForce pf{CScalarField(g), VecField(g), VecField(g), BiqField(g)};
    auto out = stress_balance_residual(cc, cc, cc, 0.01, pf, m, kappa);
    CHECK(max_norm(out.resH) == 0.0);
    CHECK(max_norm(out.resE) == 0.0);
  }

  SECTION("agrees with the direct current-equation evaluation to rounding") {
    Rng rng(21);
    double delta = 0.013;
    auto smooth = [&](const Vec3& x, double a, double b, double c) {
      return std::sin(a * x.x + b) * std::cos(c * x.y) + std::sin(x.z + a);
    };
    double p2 = rng.uniform(0, 3);

    auto make_cc = [&](double shift) {
      ChargeCurrent cc(g);
      for (int i3 = 0; i3 < g.n; ++i3)
        for (int i2 = 0; i2 < g.n; ++i2)
          for (int i1 = 0; i1 < g.n; ++i1) {
            Vec3 x = g.coord(i1, i2, i3);
            cc.rhoE.at(i1, i2, i3) = smooth(x, 1, p2, 1) + shift;
            cc.rhoH.at(i1, i2, i3) = smooth(x, 2, 0, 1);
            cc.jE.at(i1, i2, i3) = {smooth(x, 2, p2, 1), smooth(x, 1, 1, 1) * shift,
                                    smooth(x, 1, 0, 2)};
            cc.jH.at(i1, i2, i3) = {smooth(x, 1, p2, 1) * (1 + shift), smooth(x, 1, p2, 1),
                                    smooth(x, 2, 1, 1)};
          }
      return cc;
    };
    ChargeCurrent prev = make_cc(-0.1), cur = make_cc(0.0), next = make_cc(0.1);

    PowerForce pf{CScalarField(g), VecField(g), VecField(g), BiqField(g)};
    for (std::size_t i = 0; i < g.size(); ++i) {
      pf.FH[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      pf.FE[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }

    auto impl = stress_balance_residual(prev, cur, next, delta, pf, m, kappa);

    // oracle: direct evaluation of the current transformation equations
    CScalarField rhoH(g), rhoE(g);
    CVecField jE(g), jH(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      rhoH[i] = cur.rhoH[i];
      rhoE[i] = cur.rhoE[i];
      jE[i] = Vec3c(cur.jE[i]);
      jH[i] = Vec3c(cur.jH[i]);
    }
    auto grad_rhoH = gradient(rhoH, 2);
    auto grad_rhoE = gradient(rhoE, 2);
    auto rot_jE = curl(jE, 2);
    auto rot_jH = curl(jH, 2);

    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec3 djH = (1.0 / (2 * delta)) * (next.jH[i] - prev.jH[i]);
      Vec3 djE = (1.0 / (2 * delta)) * (next.jE[i] - prev.jE[i]);
      Vec3 oracleH = pf.FH[i] - kappa * (m.se() * djH + m.sm() * rot_jE[i].real() +
                                         (1.0 / m.sm()) * grad_rhoH[i].real());
      Vec3 oracleE = pf.FE[i] - kappa * (m.sm() * djE - m.se() * rot_jH[i].real() +
                                         (1.0 / m.se()) * grad_rhoE[i].real());
      worst = std::max(worst, norm(impl.resH[i] - oracleH));
      worst = std::max(worst, norm(impl.resE[i] - oracleE));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("charge_current_energy") {
  Grid g(8, 0.5);

  SECTION("unit electric current") {
    // J = e1 => Theta = -e1
    BiqField theta = constant_field(g, Biquaternion{-Vec3c{Complex(1), Complex(0), Complex(0)}});
    auto e = charge_current_energy(theta);
    CHECK(e.Q[0] == Catch::Approx(0.5));
    CHECK(norm(e.PJ[0]) < 1e-15);
  }

  SECTION("parallel currents carry no current-Poynting flux") {
    Medium m(1, 1);
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      cc.jE[i] = {2, 0, 0};
      cc.jH[i] = {3, 0, 0};
    }
    EgmState st(g, m);
    auto theta = assemble(st, cc).Theta;
    auto e = charge_current_energy(theta);
    CHECK(norm(e.PJ[0]) < 1e-15);
    // orthogonal components produce flux
    ChargeCurrent cc2(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      cc2.jE[i] = {2, 0, 0};
      cc2.jH[i] = {0, 3, 0};
    }
    auto e2 = charge_current_energy(assemble(st, cc2).Theta);
    CHECK(norm(e2.PJ[0]) > 1.0);
  }

  SECTION("zero") {
    auto e = charge_current_energy(BiqField(g));
    CHECK(max_norm(e.Q) == 0.0);
    CHECK(max_norm(e.PJ) == 0.0);
    CHECK(max_norm(e.Xi) == 0.0);
  }
}

TEST_CASE("thermo residual") {
  Grid g = grid_2pi(16);

  SECTION("static configuration vanishes") {
    BiqField theta = BiqField(g, Biquaternion{-I * 0.7, Vec3c{Complex(0.2), I, Complex(0)}});
    SampleStack window({theta, theta, theta}, 0.01);
    PowerForce pf{CScalarField(g), VecField(g), VecField(g), BiqField(g)};
    auto r = thermo_residual(window, pf, 1.0);
    CHECK(max_norm(r) < 1e-14);
  }

  SECTION("algebraic identity with manufactured force") {
    // kappa(dtau Q - div PJ + Re(grad rho, conj J)) = Im(F, conj J) holds
    // identically when F is built from the same analytic derivatives.
    Grid gg = grid_2pi(8);
    double kappa = 1.9;
    Rng rng(77);

    ScalarField dQ(gg), divPJ(gg);
    CVecField grad_rho(gg), J(gg), Fv(gg);
    for (std::size_t i = 0; i < gg.size(); ++i) {
      Vec3c dtauJ{rng.complex_in(1.0), rng.complex_in(1.0), rng.complex_in(1.0)};
      Vec3c rotJ{rng.complex_in(1.0), rng.complex_in(1.0), rng.complex_in(1.0)};
      Vec3c gr{rng.complex_in(1.0), rng.complex_in(1.0), rng.complex_in(1.0)};
      Vec3c Ji{rng.complex_in(1.0), rng.complex_in(1.0), rng.complex_in(1.0)};
      grad_rho[i] = gr;
      J[i] = Ji;
      dQ[i] = dot(dtauJ, conj(Ji)).real();
      divPJ[i] = -dot(rotJ, conj(Ji)).imag();
      // force from the current transformation equation, governing sign
      Fv[i] = I * kappa * (dtauJ - I * rotJ + gr);
    }
    auto r = thermo_residual_parts(dQ, divPJ, grad_rho, J, Fv, kappa);
    CHECK(max_norm(r) < 1e-10);
  }
}

TEST_CASE("interaction energy") {
  Grid g(8, 0.5);

  SECTION("single field has no cross terms") {
    BiqField theta = BiqField(g, Biquaternion{-I});
    auto e = interaction_energy({&theta});
    CHECK(max_norm(e.delta) == 0.0);
    CHECK(e.n_conservation == static_cast<long long>(g.size()));
    CHECK(e.pairwise.empty());
  }

  SECTION("equal charges separate, opposite charges absorb") {
    BiqField t1 = BiqField(g, Biquaternion{-I});
    BiqField t2 = BiqField(g, Biquaternion{-I});
    auto e = interaction_energy({&t1, &t2});
    CHECK(e.delta[0].s.real() == Catch::Approx(1.0));
    CHECK(e.n_separation == static_cast<long long>(g.size()));

    BiqField t3 = BiqField(g, Biquaternion{I});
    auto e2 = interaction_energy({&t1, &t3});
    CHECK(e2.delta[0].s.real() == Catch::Approx(-1.0));
    CHECK(e2.n_absorption == static_cast<long long>(g.size()));
  }

  SECTION("decomposition identity on random fields") {
    Rng rng(55);
    BiqField t1(g), t2(g), t3(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      t1[i] = rng.biquaternion();
      t2[i] = rng.biquaternion();
      t3[i] = rng.biquaternion();
    }
    auto e = interaction_energy({&t1, &t2, &t3});
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Biquaternion self = 0.5 * (mul(t1[i], conj_quat(t1[i])) + mul(t2[i], conj_quat(t2[i])) +
                                 mul(t3[i], conj_quat(t3[i])));
      Biquaternion sum = self + e.delta[i];
      worst = std::max(worst, norm(e.total[i] - sum) / (1.0 + norm(e.total[i])));
    }
    CHECK(worst < 1e-12);
  }

  SECTION("empty list rejected") {
    CHECK_THROWS_AS(interaction_energy({}), std::invalid_argument);
  }
}
