#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bq/egm.hpp"
#include "bq/rng.hpp"

using namespace bq;

namespace {

constexpr double pi = 3.14159265358979323846;

Grid grid_2pi(int n) { return Grid(n, 2.0 * pi / n); }

// circularly polarized exact free wave A = exp(i(x1 - tau)) (e2 + i e3)
Biquaternion circular_wave(double tau, const Vec3& x) {
  Complex t = std::exp(I * (x.x - tau));
  return Biquaternion{Vec3c{Complex(0), t, I * t}};
}

}  // namespace

TEST_CASE("assemble of tension and charge-current") {
  Grid g(8, 0.5);

  SECTION("eps=4 mu=1 with unit fields") {
    EgmState st(g, Medium(4.0, 1.0));
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      st.E[i] = {1, 0, 0};
      st.H[i] = {0, 1, 0};
    }
    auto out = assemble(st, cc);
    CHECK(out.A[0].s == Complex(0));
    CHECK(out.A[0].v.x == Complex(2));
    CHECK(out.A[0].v.y == Complex(0, 1));
    CHECK(norm(out.Theta[0]) == 0.0);
  }

  SECTION("charge assembly, rhoE=2 rhoH=1") {
    EgmState st(g, Medium(4.0, 1.0));
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      cc.rhoE[i] = 2.0;
      cc.rhoH[i] = 1.0;
    }
    auto out = assemble(st, cc);
    // rho = 2/2 - i*1 = 1 - i, Theta scalar = -i rho = -1 - i
    CHECK(out.Theta[0].s == Complex(-1, -1));
    CHECK(norm_sq(out.Theta[0].v) == 0.0);
  }

  SECTION("all zero") {
    EgmState st(g);
    ChargeCurrent cc(g);
    auto out = assemble(st, cc);
    CHECK(max_norm(out.A) == 0.0);
    CHECK(max_norm(out.Theta) == 0.0);
  }
}

TEST_CASE("assemble/split round-trip is lossless") {
  Grid g(8, 0.5);
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    double eps = std::pow(10.0, rng.uniform(-3, 3));
    double mu = std::pow(10.0, rng.uniform(-3, 3));
    Medium m(eps, mu);
    EgmState st(g, m);
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      st.E[i] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      st.H[i] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      st.a[i] = rng.uniform(-2, 2);
      cc.rhoE[i] = rng.uniform(-2, 2);
      cc.rhoH[i] = rng.uniform(-2, 2);
      cc.jE[i] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      cc.jH[i] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    }
    auto asm_out = assemble(st, cc);
    auto back = split(asm_out.A, asm_out.Theta, m);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::max(worst, norm(back.state.E[i] - st.E[i]));
      worst = std::max(worst, norm(back.state.H[i] - st.H[i]));
      worst = std::max(worst, std::abs(back.state.a[i] - st.a[i]));
      worst = std::max(worst, std::abs(back.cc.rhoE[i] - cc.rhoE[i]));
      worst = std::max(worst, std::abs(back.cc.rhoH[i] - cc.rhoH[i]));
      worst = std::max(worst, norm(back.cc.jE[i] - cc.jE[i]));
      worst = std::max(worst, norm(back.cc.jH[i] - cc.jH[i]));
    }
    CHECK(worst < 1e-14 * 4.0 * (1.0 + std::max(eps, mu)));
  }
}

TEST_CASE("extract_charge_current") {
  Grid g = grid_2pi(32);
  double dtau = g.h / 4.0;

  SECTION("static A = sin(x1) e2, a = 0") {
    auto st = sample_stack<Biquaternion>(g, 0.0, dtau, 1, [](double, const Vec3& x) {
      return Biquaternion{Vec3c{Complex(0), Complex(std::sin(x.x)), Complex(0)}};
    });
    auto out = extract_charge_current(st);
    double h2 = g.h * g.h;
    for (int i = 0; i < g.n; ++i) {
      Vec3 x = g.coord(i, 4, 9);
      CHECK(std::abs(out.rho.at(i, 4, 9)) < 1e-13);
      // J = -i rot A = -i (0,0,cos x1)
      Complex want = -I * std::cos(x.x);
      CHECK(std::abs(out.J.at(i, 4, 9).z - want) < h2);
      CHECK(std::abs(out.J.at(i, 4, 9).x) < 1e-13);
    }
  }

  SECTION("a = tau, A = 0") {
    auto st = sample_stack<Biquaternion>(g, 0.5, dtau, 1, [](double tau, const Vec3&) {
      return Biquaternion{I * tau};
    });
    auto out = extract_charge_current(st);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(out.rho[i] - Complex(-1)) < 1e-12);
      CHECK(norm_sq(out.J[i]) < 1e-24);
    }
  }

  SECTION("circular wave is source free") {
    auto st = sample_stack<Biquaternion>(g, 0.2, dtau, 1, circular_wave);
    auto out = extract_charge_current(st);
    double bound = g.h * g.h + dtau * dtau;
    CHECK(max_norm(out.rho) < 1e-13);
    CHECK(max_norm(out.J) < bound);
  }
}

TEST_CASE("maxwell_residual") {
  Grid g = grid_2pi(32);
  double dtau = g.h / 4.0;

  SECTION("free plane wave with Theta = 0") {
    auto st = sample_stack<Biquaternion>(g, 0.2, dtau, 1, circular_wave);
    BiqField zero(g);
    CHECK(max_norm(maxwell_residual(st, zero)) < (g.h * g.h + dtau * dtau));
  }

  SECTION("A = 0, Theta = 0") {
    auto st = sample_stack<Biquaternion>(g, 0.0, dtau, 1,
                                         [](double, const Vec3&) { return Biquaternion{}; });
    BiqField zero(g);
    CHECK(max_norm(maxwell_residual(st, zero)) == 0.0);
  }

  SECTION("A = 0, Theta = -i gives residual +i") {
    auto st = sample_stack<Biquaternion>(g, 0.0, dtau, 1,
                                         [](double, const Vec3&) { return Biquaternion{}; });
    BiqField theta(g, Biquaternion{-I});
    auto r = maxwell_residual(st, theta);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i].s == I);
  }
}

TEST_CASE("energy_pulse") {
  Grid g(8, 0.5);

  SECTION("unit E, H crossed") {
    EgmState st(g, Medium(1.0, 1.0));
    ChargeCurrent cc(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      st.E[i] = {1, 0, 0};
      st.H[i] = {0, 1, 0};
    }
    auto ep = energy_pulse(assemble(st, cc).A);
    CHECK(ep.W[0] == Catch::Approx(1.0));
    CHECK(ep.P[0].z == Catch::Approx(1.0));
    CHECK(std::abs(ep.P[0].x) < 1e-15);
    // Xi = W + iP for vanishing resistance
    CHECK(ep.Xi[0].s == Complex(1));
    CHECK(ep.Xi[0].v.z == Complex(0, 1));
  }

  SECTION("circular wave: W = 1, P = e1") {
    auto A = sample_field<Biquaternion>(g, [](const Vec3& x) { return circular_wave(0.3, x); });
    auto ep = energy_pulse(A);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(ep.W[i] == Catch::Approx(1.0));
      CHECK(ep.P[i].x == Catch::Approx(1.0));
      CHECK(std::abs(ep.P[i].y) < 1e-14);
      CHECK(ep.W[i] >= 0.0);
    }
  }

  SECTION("zero field") {
    auto ep = energy_pulse(BiqField(g));
    CHECK(max_norm(ep.W) == 0.0);
    CHECK(max_norm(ep.P) == 0.0);
  }

  SECTION("W equals half the squared vector norm when a = 0") {
    Rng rng(5);
    BiqField A(g);
    for (auto& b : A.data) b = Biquaternion{rng.biquaternion(2.0).v};
    auto ep = energy_pulse(A);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(ep.W[i] == Catch::Approx(0.5 * norm_sq(A[i].v)));
  }
}

TEST_CASE("tension_from_potential") {
  Grid g = grid_2pi(32);
  double dtau = g.h / 4.0;

  SECTION("constant potential vector part") {
    auto st = sample_stack<Biquaternion>(g, 0.0, dtau, 1, [](double, const Vec3&) {
      // Phi = i*0 - Psi with Psi constant
      return Biquaternion{-Vec3c{Complex(1), Complex(0, 2), Complex(-1)}};
    });
    auto out = tension_from_potential(st);
    CHECK(max_norm(out.A) == 0.0);
    CHECK(max_norm(out.gauge_residual) == 0.0);
  }

  SECTION("static phi = sin(x1): gradient-driven tension, zero gauge residual") {
    auto st = sample_stack<Biquaternion>(g, 0.0, dtau, 1, [](double, const Vec3& x) {
      return Biquaternion{I * std::sin(x.x)};  // Phi = i phi
    });
    auto out = tension_from_potential(st);
    double h2 = g.h * g.h;
    for (int i = 0; i < g.n; ++i) {
      Vec3 x = g.coord(i, 3, 3);
      // nabla^-(i phi) vector part = -i grad(i phi) = grad(phi)
      CHECK(std::abs(out.A.at(i, 3, 3).v.x - Complex(std::cos(x.x))) < h2);
      CHECK(std::abs(out.gauge_residual.at(i, 3, 3)) < 1e-13);
    }
  }

  SECTION("plane-wave potential against independent stencil evaluation") {
    auto phi_f = [](double tau, const Vec3& x) { return std::exp(I * (tau - x.x)); };
    auto st = sample_stack<Biquaternion>(g, 0.4, dtau, 1, [&](double tau, const Vec3& x) {
      Complex p = phi_f(tau, x);
      return Biquaternion{I * p, -Vec3c{p, Complex(0), Complex(0)}};
    });
    auto out = tension_from_potential(st);

    // same-stencil oracle for the gauge residual
    CScalarField phi_m(g), phi_p(g);
    CVecField psi(g);
    for (int i3 = 0; i3 < g.n; ++i3)
      for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
          Vec3 x = g.coord(i1, i2, i3);
          phi_m.at(i1, i2, i3) = phi_f(0.4 - dtau, x);
          phi_p.at(i1, i2, i3) = phi_f(0.4 + dtau, x);
          psi.at(i1, i2, i3) = Vec3c{phi_f(0.4, x), Complex(0), Complex(0)};
        }
    auto div_psi = divergence(psi, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Complex oracle = (phi_p[i] - phi_m[i]) / (2.0 * dtau) - div_psi[i];
      worst = std::max(worst, std::abs(out.gauge_residual[i] - oracle));
    }
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("conservation residuals") {
  Grid g = grid_2pi(32);
  double dtau = g.h / 4.0;

  SECTION("static configuration gives zero") {
    Stack<Complex> rho_st({CScalarField(g), CScalarField(g), CScalarField(g)}, dtau);
    Stack<Vec3c> j_st({CVecField(g), CVecField(g), CVecField(g)}, dtau);
    Stack<double> w_st({ScalarField(g), ScalarField(g), ScalarField(g)}, dtau);
    Stack<Vec3> p_st({VecField(g), VecField(g), VecField(g)}, dtau);
    auto out = conservation_residuals(rho_st, j_st, w_st, p_st, BiqField(g));
    CHECK(max_norm(out.charge_res) == 0.0);
    CHECK(max_norm(out.energy_res) == 0.0);
  }

  SECTION("manufactured rho = tau, J = -(x-c)/3 inside a plateau window") {
    Vec3 c{g.extent() / 2, g.extent() / 2, g.extent() / 2};
    double r1 = 0.35 * g.extent() / 2, r2 = 0.8 * g.extent() / 2;
    auto window = [&](const Vec3& x) {
      double r = norm(x - c);
      if (r <= r1) return 1.0;
      if (r >= r2) return 0.0;
      double t = (r - r1) / (r2 - r1);
      return 1.0 - t * t * (3.0 - 2.0 * t);
    };
    auto j_at = [&](const Vec3& x) { return Vec3c((-1.0 / 3.0) * window(x) * (x - c)); };

    std::vector<CScalarField> rho_slices;
    std::vector<CVecField> j_slices;
    for (int k = -1; k <= 1; ++k) {
      double tau = 1.0 + k * dtau;
      rho_slices.push_back(sample_field<Complex>(g, [&](const Vec3&) { return Complex(tau); }));
      j_slices.push_back(sample_field<Vec3c>(g, j_at));
    }
    Stack<Complex> rho_st(std::move(rho_slices), dtau);
    Stack<Vec3c> j_st(std::move(j_slices), dtau);
    Stack<double> w_st({ScalarField(g), ScalarField(g), ScalarField(g)}, dtau);
    Stack<Vec3> p_st({VecField(g), VecField(g), VecField(g)}, dtau);

    auto out = conservation_residuals(rho_st, j_st, w_st, p_st, BiqField(g));
    // interior of the plateau: stencil support entirely inside window == 1
    int mid = g.n / 2;
    for (int d = -1; d <= 1; ++d)
      CHECK(std::abs(out.charge_res.at(mid + d, mid, mid)) < 1e-12);
  }
}

TEST_CASE("mixed-partials identity: discrete Theta from any tension is conserved") {
  Grid g = grid_2pi(16);
  double dtau = g.h / 2.0;
  Rng rng(31);
  double a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1), ph = rng.uniform(0, 2 * pi);

  // random smooth tension with zero resistance part
  auto field = [&](double tau, const Vec3& x) {
    Complex f1 = std::exp(I * (x.x - tau + ph));
    Complex f2 = a1 * std::sin(x.y + 0.7 * tau) + a2 * std::cos(x.z - 0.3 * tau);
    return Biquaternion{Vec3c{f1, f2 * I, f1 + 0.5 * f2}};
  };
  auto st5 = sample_stack<Biquaternion>(g, 0.3, dtau, 2, field);

  std::vector<CScalarField> rho_slices;
  std::vector<CVecField> j_slices;
  for (int j = 1; j <= 3; ++j) {
    BiqField theta = bigradient(st5, Sign::plus, 2, j);
    CScalarField rho(g);
    CVecField J(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      rho[i] = I * theta[i].s;
      J[i] = -theta[i].v;
    }
    rho_slices.push_back(std::move(rho));
    j_slices.push_back(std::move(J));
  }
  Stack<Complex> rho_st(std::move(rho_slices), dtau);
  Stack<Vec3c> j_st(std::move(j_slices), dtau);
  Stack<double> w_st({ScalarField(g), ScalarField(g), ScalarField(g)}, dtau);
  Stack<Vec3> p_st({VecField(g), VecField(g), VecField(g)}, dtau);

  auto out = conservation_residuals(rho_st, j_st, w_st, p_st, BiqField(g));
  // stencils commute, so the discrete charge residual vanishes identically
  CHECK(max_norm(out.charge_res) < 1e-13);
}
