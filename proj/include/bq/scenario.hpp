#pragma once

// Scenario configuration, execution and diagnostic emission.  A scenario is
// a deterministic run: the seed fixes any randomized profile phases, and
// identical (config, seed) pairs produce byte-identical outputs.
//
// Diagnostics per step: max residuals of the Maxwell system, charge and
// energy conservation, the action-reaction law and the thermodynamic law,
// plus integrated field/current energies and the interaction-energy
// classification histogram.  Time derivatives for diagnostics come from a
// +-dt/16 re-propagated window, never from the stored step history.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bq/config.hpp"
#include "bq/dynamics.hpp"
#include "bq/identities.hpp"
#include "bq/io.hpp"
#include "bq/propagator.hpp"

namespace bq {

enum class ScenarioKind { free_field, interact, background, cauchy_check, lorentz_check };

struct ProfileSpec {
  std::string profile = "gaussian_bump";  // gaussian_bump|plane_wave|circular_wave|uniform
  std::string target = "rhoE";            // A|a|rhoE|rhoH|jE|jH
  double amplitude = 1.0;
  double width = 0.5;                  // absolute length units
  Vec3 center{0.5, 0.5, 0.5};          // fractions of the extent
  std::array<int, 3> wavevector{1, 0, 0};
  Vec3 direction{1, 0, 0};
  double phase = 0.0;
  bool random_phase = false;
};

struct FieldSpec {
  double eps = 1.0;
  double mu = 1.0;
  std::vector<ProfileSpec> profiles;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::free_field;
  std::uint64_t seed = 0;
  double kappa = 1.0;
  int n = 32;
  double h = 0.19634954084936207;
  int order = 2;
  double dt = 0.0;
  long long steps = 0;
  std::vector<FieldSpec> fields;
  std::optional<FieldSpec> background;

  // cauchy_check
  double horizon = 0.5;
  QuadratureSpec quad{12, 24, 24, 0.0};
  double max_discrepancy = 0.02;
  double max_leak = 1e-4;

  // lorentz_check
  long long count = 1000;
  double vmax = 0.9;
  double boost_v = 0.0;
  Vec3 boost_axis{1, 0, 0};
  double boost_phi = 0.0;
  bool has_boost = false;

  std::string out_dir = "out";
  long long dump_every = 0;

  Grid make_grid() const { return Grid(n, h); }
};

// diagnostic window half-step as a fraction of dt
inline constexpr double kDiagStepFraction = 1.0 / 16.0;

namespace detail {

inline double periodic_delta(double d, double L) {
  d = std::fmod(d, L);
  if (d > 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

inline double profile_scalar(const ProfileSpec& p, const Vec3& x, const Grid& g) {
  const double L = g.extent();
  if (p.profile == "gaussian_bump") {
    Vec3 c = {p.center.x * L, p.center.y * L, p.center.z * L};
    double dx = periodic_delta(x.x - c.x, L);
    double dy = periodic_delta(x.y - c.y, L);
    double dz = periodic_delta(x.z - c.z, L);
    double r2 = dx * dx + dy * dy + dz * dz;
    return p.amplitude * std::exp(-r2 / (2.0 * p.width * p.width));
  }
  if (p.profile == "plane_wave") {
    double k0 = 2.0 * 3.14159265358979323846 / L;
    double arg = k0 * (p.wavevector[0] * x.x + p.wavevector[1] * x.y + p.wavevector[2] * x.z) +
                 p.phase;
    return p.amplitude * std::cos(arg);
  }
  if (p.profile == "uniform") return p.amplitude;
  throw ConfigError("profile '" + p.profile + "' cannot seed target '" + p.target + "'");
}

inline void transverse_frame(const Vec3& khat, Vec3& u, Vec3& w) {
  Vec3 seed = std::abs(khat.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  w = cross(khat, seed);
  w = normalized(w);
  u = cross(w, khat);
}

// add the profile into the physical state / densities
inline void apply_profile(const ProfileSpec& p, const Grid& g, EgmState& st, ChargeCurrent& cc) {
  const Medium& m = st.medium;
  if (p.target == "A" && p.profile == "circular_wave") {
    double L = g.extent();
    double k0 = 2.0 * 3.14159265358979323846 / L;
    Vec3 kvec{k0 * p.wavevector[0], k0 * p.wavevector[1], k0 * p.wavevector[2]};
    double kn = norm(kvec);
    if (kn == 0.0) throw ConfigError("key 'wavevector': circular_wave needs a nonzero mode");
    Vec3 khat = (1.0 / kn) * kvec;
    Vec3 u, w;
    transverse_frame(khat, u, w);
    for (int i3 = 0; i3 < g.n; ++i3)
      for (int i2 = 0; i2 < g.n; ++i2)
        for (int i1 = 0; i1 < g.n; ++i1) {
          Vec3 x = g.coord(i1, i2, i3);
          double arg = dot(kvec, x) + p.phase;
          double cs = std::cos(arg), sn = std::sin(arg);
          // complex tension amp e^{i arg}(u + i w) split into E and H
          std::size_t q = g.idx(i1, i2, i3);
          st.E[q] += (p.amplitude / m.se()) * (cs * u - sn * w);
          st.H[q] += (p.amplitude / m.sm()) * (sn * u + cs * w);
        }
    return;
  }
  for (int i3 = 0; i3 < g.n; ++i3)
    for (int i2 = 0; i2 < g.n; ++i2)
      for (int i1 = 0; i1 < g.n; ++i1) {
        Vec3 x = g.coord(i1, i2, i3);
        double v = profile_scalar(p, x, g);
        std::size_t q = g.idx(i1, i2, i3);
        if (p.target == "A")
          st.E[q] += (v / m.se()) * p.direction;
        else if (p.target == "a")
          st.a[q] += v;
        else if (p.target == "rhoE")
          cc.rhoE[q] += v;
        else if (p.target == "rhoH")
          cc.rhoH[q] += v;
        else if (p.target == "jE")
          cc.jE[q] += v * p.direction;
        else if (p.target == "jH")
          cc.jH[q] += v * p.direction;
        else
          throw ConfigError("unknown profile target '" + p.target + "'");
      }
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---- configuration parsing ----

namespace detail {

inline ProfileSpec read_profile(SectionReader& r, Rng& rng) {
  ProfileSpec p;
  p.profile = r.str("profile", p.profile);
  p.target = r.str("target", p.target);
  p.amplitude = r.number("amplitude", p.amplitude);
  p.width = r.number("width", p.width);
  p.center = r.vec3("center", p.center);
  p.wavevector = r.ivec3("wavevector", p.wavevector);
  p.direction = r.vec3("direction", p.direction);
  if (auto ph = r.raw("phase")) {
    if (*ph == "random") {
      p.random_phase = true;
      p.phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    } else {
      try {
        p.phase = std::stod(*ph);
      } catch (...) {
        throw ConfigError("key 'phase': expected a number or 'random'");
      }
    }
  }
  static const std::set<std::string> profiles{"gaussian_bump", "plane_wave", "circular_wave",
                                              "uniform"};
  static const std::set<std::string> targets{"A", "a", "rhoE", "rhoH", "jE", "jH"};
  if (!profiles.count(p.profile)) throw ConfigError("key 'profile': unknown value '" + p.profile + "'");
  if (!targets.count(p.target)) throw ConfigError("key 'target': unknown value '" + p.target + "'");
  if (p.profile == "circular_wave" && p.target != "A")
    throw ConfigError("key 'profile': circular_wave requires target A");
  if (p.profile == "gaussian_bump" && !(p.width > 0.0))
    throw ConfigError("key 'width': must be positive");
  return p;
}

inline void validate_fit(const ProfileSpec& p, const Grid& g) {
  // wraparound guard: the bump's effective support must fit in half a box
  if (p.profile == "gaussian_bump" && 3.5 * p.width > 0.5 * g.extent())
    throw ConfigError("key 'width': profile does not fit within half the domain");
}

}  // namespace detail

inline Scenario scenario_from_config(const ConfigDoc& doc) {
  Scenario sc;

  SectionReader top(doc, "");
  std::string kind = top.require_str("kind");
  if (kind == "free")
    sc.kind = ScenarioKind::free_field;
  else if (kind == "interact")
    sc.kind = ScenarioKind::interact;
  else if (kind == "background")
    sc.kind = ScenarioKind::background;
  else if (kind == "cauchy_check")
    sc.kind = ScenarioKind::cauchy_check;
  else if (kind == "lorentz_check")
    sc.kind = ScenarioKind::lorentz_check;
  else
    throw ConfigError("key 'kind': unknown value '" + kind + "'");

  sc.seed = static_cast<std::uint64_t>(top.integer("seed", 0));
  sc.kappa = top.number("kappa", 1.0);
  if (!(sc.kappa != 0.0) || !std::isfinite(sc.kappa))
    throw ConfigError("key 'kappa': must be finite and nonzero");

  std::set<std::string> allowed_sections{""};
  Rng rng(sc.seed);

  const bool is_sim = sc.kind == ScenarioKind::free_field || sc.kind == ScenarioKind::interact ||
                      sc.kind == ScenarioKind::background;

  if (is_sim || sc.kind == ScenarioKind::cauchy_check) {
    SectionReader grid(doc, "grid", true);
    sc.n = static_cast<int>(grid.require_integer("n"));
    sc.h = grid.require_number("h");
    sc.order = static_cast<int>(grid.integer("order", 2));
    if (sc.n < 8) throw ConfigError("key 'n': must be >= 8");
    if (!(sc.h > 0.0)) throw ConfigError("key 'h': must be positive");
    if (sc.order != 2 && sc.order != 4) throw ConfigError("key 'order': must be 2 or 4");
    grid.finish();
    allowed_sections.insert("grid");
  }

  if (is_sim) {
    SectionReader time(doc, "time", true);
    sc.dt = time.require_number("dt");
    sc.steps = time.require_integer("steps");
    if (!(sc.dt > 0.0) || sc.dt > 0.5 * sc.h * (1.0 + 1e-12))
      throw ConfigError("key 'dt': must satisfy 0 < dt <= h/2");
    if (sc.steps < 1) throw ConfigError("key 'steps': must be >= 1");
    time.finish();
    allowed_sections.insert("time");

    auto field_secs = doc.find_prefix("field.");
    Grid g = sc.make_grid();
    for (std::size_t k = 1; k <= field_secs.size(); ++k) {
      std::string name = "field." + std::to_string(k);
      const ConfigSection* sec = doc.find(name);
      if (!sec) throw ConfigError("field sections must be numbered consecutively from [field.1]");
      SectionReader r(sec);
      FieldSpec f;
      f.eps = r.number("eps", 1.0);
      f.mu = r.number("mu", 1.0);
      if (!(f.eps > 0.0)) throw ConfigError("key 'eps': must be positive");
      if (!(f.mu > 0.0)) throw ConfigError("key 'mu': must be positive");
      ProfileSpec p = detail::read_profile(r, rng);
      detail::validate_fit(p, g);
      f.profiles.push_back(p);
      r.finish();
      sc.fields.push_back(std::move(f));
      allowed_sections.insert(name);
    }
    if (sc.kind == ScenarioKind::interact && sc.fields.size() < 2)
      throw ConfigError("kind 'interact' needs at least two [field.k] sections");
    if (sc.kind != ScenarioKind::interact && sc.fields.size() != 1)
      throw ConfigError("kind '" + kind + "' needs exactly one [field.1] section");

    if (sc.kind == ScenarioKind::background) {
      SectionReader bg(doc, "background", true);
      FieldSpec f;
      f.eps = bg.number("eps", 1.0);
      f.mu = bg.number("mu", 1.0);
      ProfileSpec p = detail::read_profile(bg, rng);
      detail::validate_fit(p, g);
      f.profiles.push_back(p);
      bg.finish();
      sc.background = std::move(f);
      allowed_sections.insert("background");
    }
  }

  if (sc.kind == ScenarioKind::cauchy_check) {
    sc.horizon = top.number("horizon", 0.5);
    if (!(sc.horizon > 0.0)) throw ConfigError("key 'horizon': must be positive");

    SectionReader src(doc, "source", true);
    FieldSpec f;
    f.eps = src.number("eps", 1.0);
    f.mu = src.number("mu", 1.0);
    ProfileSpec p = detail::read_profile(src, rng);
    detail::validate_fit(p, sc.make_grid());
    if (p.profile != "gaussian_bump")
      throw ConfigError("key 'profile': cauchy_check sources must be gaussian_bump");
    f.profiles.push_back(p);
    src.finish();
    sc.fields.push_back(std::move(f));
    allowed_sections.insert("source");

    SectionReader quad(doc, "quadrature");
    sc.quad.n_polar = static_cast<int>(quad.integer("n_polar", sc.quad.n_polar));
    sc.quad.n_azimuth = static_cast<int>(quad.integer("n_azimuth", sc.quad.n_azimuth));
    sc.quad.radial_steps = static_cast<int>(quad.integer("radial_steps", sc.quad.radial_steps));
    sc.max_discrepancy = quad.number("max_discrepancy", sc.max_discrepancy);
    sc.max_leak = quad.number("max_leak", sc.max_leak);
    quad.finish();
    sc.quad.validate();
    allowed_sections.insert("quadrature");
  }

  if (sc.kind == ScenarioKind::lorentz_check) {
    sc.count = top.integer("count", 1000);
    sc.vmax = top.number("vmax", 0.9);
    if (sc.count < 1) throw ConfigError("key 'count': must be >= 1");
    if (!(sc.vmax > 0.0 && sc.vmax < 1.0)) throw ConfigError("key 'vmax': must be in (0,1)");
    SectionReader boost(doc, "boost");
    if (boost.exists()) {
      sc.has_boost = true;
      sc.boost_v = boost.require_number("v");
      sc.boost_axis = boost.vec3("e", {1, 0, 0});
      sc.boost_phi = boost.number("phi", 0.0);
      if (!(std::abs(sc.boost_v) < 1.0)) throw ConfigError("key 'v': must satisfy |v| < 1");
      boost.finish();
      allowed_sections.insert("boost");
    }
  }

  SectionReader out(doc, "output");
  sc.out_dir = out.str("dir", sc.out_dir);
  sc.dump_every = out.integer("dump_every", 0);
  if (sc.dump_every < 0) throw ConfigError("key 'dump_every': must be >= 0");
  out.finish();
  allowed_sections.insert("output");

  top.finish();
  for (const auto& s : doc.sections)
    if (!allowed_sections.count(s.name))
      throw ConfigError("unknown section [" + s.name + "] for kind '" + kind + "'");
  return sc;
}

// ---- simulation runner ----

struct StepRecord {
  long long step = 0;
  double tau = 0.0;
  double res_maxwell = 0.0;
  double res_charge = 0.0;
  double res_energy = 0.0;
  double res_action_reaction = 0.0;
  double res_thermo = 0.0;
  double W = 0.0;
  double Q = 0.0;
  double deltaW = 0.0;
  long long n_separation = 0, n_absorption = 0, n_conservation = 0;

  bool finite() const {
    for (double v : {tau, res_maxwell, res_charge, res_energy, res_action_reaction, res_thermo,
                     W, Q, deltaW})
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline std::string step_record_json(const StepRecord& r) {
  using detail::fmt;
  std::string s = "{\"step\":" + std::to_string(r.step) + ",\"tau\":" + fmt(r.tau);
  s += ",\"res_maxwell\":" + fmt(r.res_maxwell);
  s += ",\"res_charge\":" + fmt(r.res_charge);
  s += ",\"res_energy\":" + fmt(r.res_energy);
  s += ",\"res_action_reaction\":" + fmt(r.res_action_reaction);
  s += ",\"res_thermo\":" + fmt(r.res_thermo);
  s += ",\"W\":" + fmt(r.W);
  s += ",\"Q\":" + fmt(r.Q);
  s += ",\"deltaW\":" + fmt(r.deltaW);
  s += ",\"n_separation\":" + std::to_string(r.n_separation);
  s += ",\"n_absorption\":" + std::to_string(r.n_absorption);
  s += ",\"n_conservation\":" + std::to_string(r.n_conservation);
  s += "}";
  return s;
}

namespace detail {

inline BiqField partner_tension(const InteractionSystem& sys, int k) {
  BiqField out(sys.grid());
  for (std::size_t m = 0; m < sys.fields.size(); ++m) {
    if (static_cast<int>(m) == k) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sys.fields[m].A[i];
  }
  if (sys.background)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*sys.background)[i];
  return out;
}

}  // namespace detail

// Fused evaluation of the per-step residual maxima; mathematically identical
// to composing the library operators on 3-slice stacks, without the copies.
inline StepRecord diagnose_step(const InteractionSystem& sys, long long step, double diag_delta,
                                int order) {
  StepRecord rec;
  rec.step = step;
  rec.tau = sys.tau;

  DiagWindow w = diagnostic_window(sys, diag_delta);
  const Grid& g = sys.grid();
  const std::size_t sz = g.size();
  const double cell = g.h * g.h * g.h;
  const double inv2d = 1.0 / (2.0 * diag_delta);
  const int N = static_cast<int>(sys.fields.size());

  BiqField DA(g), DT(g);
  for (int k = 0; k < N; ++k) {
    const BiqField& A_m = w.prev.fields[k].A;
    const BiqField& A_c = w.center.fields[k].A;
    const BiqField& A_p = w.next.fields[k].A;
    const BiqField& T_m = w.prev.fields[k].Theta;
    const BiqField& T_c = w.center.fields[k].Theta;
    const BiqField& T_p = w.next.fields[k].Theta;

    spatial_quaternion_derivative_into(A_c, order, DA);
    spatial_quaternion_derivative_into(T_c, order, DT);

    // Maxwell residual nabla^+ A - Theta and charge residual dtau rho + div J
    double rm = 0.0, rc = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
      Biquaternion mx = inv2d * (A_p[i] - A_m[i]) + DA[i] - T_c[i];
      rm = std::max(rm, norm(mx));
      Complex cres = inv2d * (T_p[i].s - T_m[i].s) - DT[i].s;  // times i, same modulus
      rc = std::max(rc, std::abs(cres));
    }
    rec.res_maxwell = std::max(rec.res_maxwell, rm);
    rec.res_charge = std::max(rec.res_charge, rc);

    // energy residual dtau W + div P + Re(J, conj A)
    VecField P(g), PJ(g);
    CScalarField rho_c(g);
    for (std::size_t i = 0; i < sz; ++i) {
      P[i] = (0.5 * I * cross(A_c[i].v, conj(A_c[i].v))).real();
      Vec3c J = -T_c[i].v;
      PJ[i] = (0.5 * I * cross(J, conj(J))).real();
      rho_c[i] = I * T_c[i].s;
    }
    CScalarField px(g), py(g), pz(g), qx(g), qy(g), qz(g);
    for (std::size_t i = 0; i < sz; ++i) {
      px[i] = P[i].x;
      py[i] = P[i].y;
      pz[i] = P[i].z;
      qx[i] = PJ[i].x;
      qy[i] = PJ[i].y;
      qz[i] = PJ[i].z;
    }
    CScalarField divP = partial(px, 0, order);
    CScalarField divPJ = partial(qx, 0, order);
    {
      CScalarField t1 = partial(py, 1, order), t2 = partial(pz, 2, order);
      CScalarField u1 = partial(qy, 1, order), u2 = partial(qz, 2, order);
      for (std::size_t i = 0; i < sz; ++i) {
        divP[i] += t1[i] + t2[i];
        divPJ[i] += u1[i] + u2[i];
      }
    }
    CVecField grad_rho = gradient(rho_c, order);

    BiqField partner = detail::partner_tension(sys, k);

    double re = 0.0, rt = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
      auto wof = [](const Biquaternion& b) { return 0.5 * (std::norm(b.s) + norm_sq(b.v)); };
      double dW = inv2d * (wof(A_p[i]) - wof(A_m[i]));
      Vec3c J = -T_c[i].v;
      double eres = dW + divP[i].real() + dot(J, conj(A_c[i].v)).real();
      re = std::max(re, std::abs(eres));

      Vec3c Jm = -T_m[i].v, Jp = -T_p[i].v;
      double dQ = inv2d * 0.5 * (norm_sq(Jp) - norm_sq(Jm));
      Vec3c Fv = I * mul(T_c[i], partner[i]).v;
      double tres = sys.kappa * (dQ - divPJ[i].real() + dot(grad_rho[i], conj(J)).real()) -
                    dot(Fv, conj(J)).imag();
      rt = std::max(rt, std::abs(tres));

      rec.W += cell * wof(A_c[i]);
      rec.Q += cell * 0.5 * norm_sq(J);
    }
    rec.res_energy = std::max(rec.res_energy, re);
    rec.res_thermo = std::max(rec.res_thermo, rt);
  }

  for (int k = 0; k < N; ++k)
    for (int l = k + 1; l < N; ++l)
      rec.res_action_reaction = std::max(
          rec.res_action_reaction,
          max_norm(action_reaction_residual(sys.fields[k].Theta, sys.fields[l].A,
                                            sys.fields[l].Theta, sys.fields[k].A)));

  if (N >= 2) {
    std::vector<const BiqField*> thetas;
    for (const auto& f : sys.fields) thetas.push_back(&f.Theta);
    auto ie = interaction_energy(thetas);
    for (std::size_t i = 0; i < g.size(); ++i) rec.deltaW += cell * ie.delta[i].s.real();
    rec.n_separation = ie.n_separation;
    rec.n_absorption = ie.n_absorption;
    rec.n_conservation = ie.n_conservation;
  } else {
    rec.n_conservation = static_cast<long long>(g.size());
  }
  return rec;
}

struct RunResult {
  int exit_code = 0;
  std::string message = "ok";
  std::vector<StepRecord> records;
};

inline InteractionSystem build_system(const Scenario& sc) {
  Grid g = sc.make_grid();
  InteractionSystem sys;
  sys.kappa = sc.kappa;
  sys.order = sc.order;
  for (const auto& fs : sc.fields) {
    Medium m(fs.eps, fs.mu);
    EgmState st(g, m);
    ChargeCurrent cc(g);
    for (const auto& p : fs.profiles) detail::apply_profile(p, g, st, cc);
    auto out = assemble(st, cc);
    sys.fields.push_back({std::move(out.A), std::move(out.Theta), m});
  }
  if (sc.background) {
    Medium m(sc.background->eps, sc.background->mu);
    EgmState st(g, m);
    ChargeCurrent cc(g);
    for (const auto& p : sc.background->profiles) detail::apply_profile(p, g, st, cc);
    sys.background = assemble(st, cc).A;
  }
  return sys;
}

inline void dump_system(const InteractionSystem& sys, const std::string& dir, long long step,
                        int order) {
  for (std::size_t k = 0; k < sys.fields.size(); ++k) {
    char name[128];
    std::snprintf(name, sizeof name, "%s/dump_step%06lld_f%zu_A.bqf", dir.c_str(), step, k + 1);
    write_field_dump(name, sys.fields[k].A, sys.tau, order);
    std::snprintf(name, sizeof name, "%s/dump_step%06lld_f%zu_Theta.bqf", dir.c_str(), step,
                  k + 1);
    write_field_dump(name, sys.fields[k].Theta, sys.tau, order);
  }
}

inline RunResult run_scenario(const Scenario& sc) {
  if (sc.kind != ScenarioKind::free_field && sc.kind != ScenarioKind::interact &&
      sc.kind != ScenarioKind::background)
    throw std::invalid_argument("run_scenario: not a simulation scenario");

  RunResult result;
  std::filesystem::create_directories(sc.out_dir);
  std::ofstream nd(sc.out_dir + "/diagnostics.ndjson", std::ios::binary);
  if (!nd) {
    result.exit_code = 2;
    result.message = "cannot open output directory: " + sc.out_dir;
    return result;
  }

  InteractionSystem sys = build_system(sc);
  if (sc.dump_every > 0) dump_system(sys, sc.out_dir, 0, sc.order);

  const double diag_delta = sc.dt * kDiagStepFraction;
  for (long long step = 1; step <= sc.steps; ++step) {
    try {
      sys = step_interaction(sys, sc.dt);
    } catch (const StepError& e) {
      nd.flush();
      result.exit_code = 2;
      result.message = e.what();
      return result;
    }
    StepRecord rec = diagnose_step(sys, step, diag_delta, sc.order);
    if (!rec.finite()) {
      nd.flush();
      result.exit_code = 2;
      result.message = "non-finite diagnostic value at step " + std::to_string(step);
      return result;
    }
    nd << step_record_json(rec) << "\n";
    result.records.push_back(rec);
    if (sc.dump_every > 0 && step % sc.dump_every == 0)
      dump_system(sys, sc.out_dir, step, sc.order);
  }
  nd.close();

  std::ofstream csv(sc.out_dir + "/summary.csv", std::ios::binary);
  csv << "metric,max,final\n";
  auto row = [&](const std::string& name, auto get) {
    double mx = 0.0, fin = 0.0;
    for (const auto& r : result.records) mx = std::max(mx, std::abs(get(r)));
    if (!result.records.empty()) fin = get(result.records.back());
    csv << name << "," << detail::fmt(mx) << "," << detail::fmt(fin) << "\n";
  };
  row("res_maxwell", [](const StepRecord& r) { return r.res_maxwell; });
  row("res_charge", [](const StepRecord& r) { return r.res_charge; });
  row("res_energy", [](const StepRecord& r) { return r.res_energy; });
  row("res_action_reaction", [](const StepRecord& r) { return r.res_action_reaction; });
  row("res_thermo", [](const StepRecord& r) { return r.res_thermo; });
  row("W", [](const StepRecord& r) { return r.W; });
  row("Q", [](const StepRecord& r) { return r.Q; });
  row("deltaW", [](const StepRecord& r) { return r.deltaW; });
  csv.close();
  return result;
}

// ---- cauchy check ----

struct CauchyReport {
  double peak = 0.0;
  double max_rel_discrepancy = 0.0;
  double causality_leak = 0.0;
  bool pass = false;
};

// analytic (unbounded-domain) sampler matching the gridded source profile
inline SourceSampler analytic_theta_sampler(const Scenario& sc) {
  const FieldSpec& fs = sc.fields.front();
  Medium m(fs.eps, fs.mu);
  Grid g = sc.make_grid();
  const ProfileSpec p = fs.profiles.front();
  const double L = g.extent();
  Vec3 c = {p.center.x * L, p.center.y * L, p.center.z * L};
  return SourceSampler::analytic([p, m, c](double, const Vec3& y) {
    Vec3 d = y - c;
    double v = p.amplitude * std::exp(-dot(d, d) / (2.0 * p.width * p.width));
    Complex rho{};
    Vec3c J{};
    if (p.target == "rhoE") rho = Complex(v / m.se());
    else if (p.target == "rhoH") rho = Complex(0.0, -v / m.sm());
    else if (p.target == "jE") J = Complex(m.sm() * v) * Vec3c(p.direction);
    else if (p.target == "jH") J = Complex(0.0, -m.se() * v) * Vec3c(p.direction);
    else throw ConfigError("cauchy_check source target must be a charge or current density");
    return Biquaternion{-I * rho, -J};
  });
}

inline CauchyReport run_cauchy_check(const Scenario& sc, std::vector<std::string>* log = nullptr) {
  Grid g = sc.make_grid();
  const FieldSpec& fs = sc.fields.front();
  const ProfileSpec& p = fs.profiles.front();

  // method-of-lines oracle on the periodic grid
  InteractionSystem sys;
  sys.order = sc.order;
  Medium m(fs.eps, fs.mu);
  EgmState st(g, m);
  ChargeCurrent cc(g);
  detail::apply_profile(p, g, st, cc);
  auto asm_out = assemble(st, cc);
  sys.fields.push_back({std::move(asm_out.A), std::move(asm_out.Theta), m});

  double dt = g.h / 4.0;
  long long steps = static_cast<long long>(std::ceil(sc.horizon / dt));
  dt = sc.horizon / steps;
  for (long long i = 0; i < steps; ++i) sys = step_interaction(sys, dt);

  CauchyReport rep;
  for (std::size_t i = 0; i < g.size(); ++i)
    rep.peak = std::max(rep.peak, norm(sys.fields[0].Theta[i]));

  SourceSampler theta0 = analytic_theta_sampler(sc);

  // probe sub-lattice around the bump
  const double L = g.extent();
  Vec3 c{p.center.x * L, p.center.y * L, p.center.z * L};
  int ic1 = static_cast<int>(std::round(c.x / g.h));
  int ic2 = static_cast<int>(std::round(c.y / g.h));
  int ic3 = static_cast<int>(std::round(c.z / g.h));
  int reach = std::min(g.n / 2 - 1,
                       static_cast<int>(std::ceil((3.0 * p.width + sc.horizon) / g.h)));
  int stride = std::max(1, (2 * reach + 1) / 9);

  double worst = 0.0;
  for (int d3 = -reach; d3 <= reach; d3 += stride)
    for (int d2 = -reach; d2 <= reach; d2 += stride)
      for (int d1 = -reach; d1 <= reach; d1 += stride) {
        Vec3 x = g.coord(ic1 + d1, ic2 + d2, ic3 + d3);
        Biquaternion k = free_field_cauchy(theta0, x, sc.horizon, sc.quad);
        Biquaternion o = sys.fields[0].Theta.at(ic1 + d1, ic2 + d2, ic3 + d3);
        worst = std::max(worst, norm(k - o));
      }
  rep.max_rel_discrepancy = worst / rep.peak;

  // outside the light cone the signal must vanish
  double d_out = 4.0 * p.width + sc.horizon + 0.5;
  double leak = 0.0;
  for (const Vec3& dir : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{-0.577350269189626,
                                                             0.577350269189626,
                                                             0.577350269189626}}) {
    Biquaternion far = free_field_cauchy(theta0, c + d_out * dir, sc.horizon, sc.quad);
    leak = std::max(leak, norm(far));
  }
  rep.causality_leak = leak / std::max(rep.peak, 1e-300);

  rep.pass = rep.max_rel_discrepancy <= sc.max_discrepancy && rep.causality_leak <= sc.max_leak;

  std::filesystem::create_directories(sc.out_dir);
  std::ofstream out(sc.out_dir + "/cauchy_report.ndjson", std::ios::binary);
  out << "{\"peak\":" << detail::fmt(rep.peak)
      << ",\"max_rel_discrepancy\":" << detail::fmt(rep.max_rel_discrepancy)
      << ",\"causality_leak\":" << detail::fmt(rep.causality_leak)
      << ",\"pass\":" << (rep.pass ? "true" : "false") << "}\n";
  if (log) {
    log->push_back("peak " + detail::fmt(rep.peak));
    log->push_back("max_rel_discrepancy " + detail::fmt(rep.max_rel_discrepancy));
    log->push_back("causality_leak " + detail::fmt(rep.causality_leak));
  }
  return rep;
}

// ---- lorentz check ----

struct LorentzReport {
  std::vector<IdentityReport> identities;
  bool pass = true;
};

inline LorentzReport run_lorentz_check(const Scenario& sc) {
  LorentzReport rep;
  rep.identities = lorentz_battery(sc.seed, sc.count, sc.vmax);
  if (sc.has_boost) {
    // consistency of the configured transform against the closed forms
    LorentzBiq lt = make_lorentz(sc.boost_v, sc.boost_axis, 0.0);
    Rng rng(sc.seed + 1);
    IdentityReport configured{"configured-boost-closed-forms", 0, 1e-12};
    for (int i = 0; i < 100; ++i) {
      Complex rho = rng.complex_in(2.0);
      Vec3c J{rng.complex_in(2.0), rng.complex_in(2.0), rng.complex_in(2.0)};
      auto cf = boost_charge_current(rho, J, sc.boost_v, normalized(sc.boost_axis));
      Biquaternion tp = transform_biq(lt, Biquaternion{-I * rho, -J});
      configured.max_residual =
          std::max(configured.max_residual,
                   norm(tp - Biquaternion{-I * cf.rho, -cf.J}) / (1.0 + std::abs(rho)));
    }
    rep.identities.push_back(configured);
  }
  for (const auto& r : rep.identities) rep.pass = rep.pass && r.pass();

  std::filesystem::create_directories(sc.out_dir);
  std::ofstream out(sc.out_dir + "/lorentz_report.ndjson", std::ios::binary);
  for (const auto& r : rep.identities)
    out << "{\"identity\":\"" << r.name << "\",\"max_residual\":" << detail::fmt(r.max_residual)
        << ",\"tolerance\":" << detail::fmt(r.tolerance)
        << ",\"pass\":" << (r.pass() ? "true" : "false") << "}\n";
  return rep;
}

}  // namespace bq
