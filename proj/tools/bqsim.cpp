// bqsim: scenario runner and identity checker for the biquaternionic
// electro-gravimagnetic field model.
//
//   bqsim simulate <config>      free / interact / background runs
//   bqsim cauchy-check <config>  Kirchhoff solver vs method-of-lines oracle
//   bqsim lorentz-check <config> randomized Lorentz identity battery
//   bqsim identities --seed S --count N [--corrupt-mul]
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "bq/scenario.hpp"

namespace {

int run_simulate(const std::string& path, long long dump_every_override,
                 const std::string& out_override, int order_override) {
  bq::Scenario sc;
  try {
    sc = bq::scenario_from_config(bq::ConfigDoc::parse_file(path));
    if (sc.kind != bq::ScenarioKind::free_field && sc.kind != bq::ScenarioKind::interact &&
        sc.kind != bq::ScenarioKind::background) {
      std::fprintf(stderr, "error: key 'kind': not a simulation scenario\n");
      return 1;
    }
    if (dump_every_override >= 0) sc.dump_every = dump_every_override;
    if (!out_override.empty()) sc.out_dir = out_override;
    if (order_override > 0) sc.order = order_override;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  try {
    bq::RunResult r = bq::run_scenario(sc);
    if (r.exit_code != 0) std::fprintf(stderr, "error: %s\n", r.message.c_str());
    if (r.exit_code == 0)
      std::printf("completed %lld steps; diagnostics in %s\n", sc.steps, sc.out_dir.c_str());
    return r.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int run_cauchy(const std::string& path, const std::string& out_override, int order_override) {
  bq::Scenario sc;
  try {
    sc = bq::scenario_from_config(bq::ConfigDoc::parse_file(path));
    if (sc.kind != bq::ScenarioKind::cauchy_check) {
      std::fprintf(stderr, "error: key 'kind': expected cauchy_check\n");
      return 1;
    }
    if (!out_override.empty()) sc.out_dir = out_override;
    if (order_override > 0) sc.order = order_override;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  try {
    std::vector<std::string> log;
    bq::CauchyReport rep = bq::run_cauchy_check(sc, &log);
    for (const auto& line : log) std::printf("%s\n", line.c_str());
    std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
    return rep.pass ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int run_lorentz(const std::string& path, const std::string& out_override) {
  bq::Scenario sc;
  try {
    sc = bq::scenario_from_config(bq::ConfigDoc::parse_file(path));
    if (sc.kind != bq::ScenarioKind::lorentz_check) {
      std::fprintf(stderr, "error: key 'kind': expected lorentz_check\n");
      return 1;
    }
    if (!out_override.empty()) sc.out_dir = out_override;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  try {
    bq::LorentzReport rep = bq::run_lorentz_check(sc);
    for (const auto& r : rep.identities)
      std::printf("%-32s max %.3e tol %.1e %s\n", r.name.c_str(), r.max_residual, r.tolerance,
                  r.pass() ? "PASS" : "FAIL");
    return rep.pass ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

int run_identities(long long seed, long long count, bool corrupt) {
  if (count < 1) {
    std::fprintf(stderr, "error: key 'count': must be >= 1\n");
    return 1;
  }
  auto algebra = bq::algebra_battery(static_cast<std::uint64_t>(seed), count,
                                     corrupt ? &bq::mul_corrupted : &bq::mul);
  auto lorentz = bq::lorentz_battery(static_cast<std::uint64_t>(seed), count);
  bool ok = true;
  for (const auto* batch : {&algebra, &lorentz})
    for (const auto& r : *batch) {
      std::printf("%-32s max %.3e tol %.1e %s\n", r.name.c_str(), r.max_residual, r.tolerance,
                  r.pass() ? "PASS" : "FAIL");
      ok = ok && r.pass();
    }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"biquaternionic electro-gravimagnetic field simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long dump_every = -1;
  int order = 0;

  auto* sim = app.add_subcommand("simulate", "run a configured scenario");
  sim->add_option("config", config_path, "scenario config file")->required();
  sim->add_option("--dump-every", dump_every, "write field dumps every K steps");
  sim->add_option("--out", out_dir, "output directory override");
  sim->add_option("--order", order, "stencil order override")->check(CLI::IsMember({2, 4}));

  auto* cauchy = app.add_subcommand("cauchy-check", "Kirchhoff solver cross-validation");
  cauchy->add_option("config", config_path, "scenario config file")->required();
  cauchy->add_option("--out", out_dir, "output directory override");
  cauchy->add_option("--order", order, "stencil order override")->check(CLI::IsMember({2, 4}));

  auto* lor = app.add_subcommand("lorentz-check", "Lorentz identity battery from config");
  lor->add_option("config", config_path, "scenario config file")->required();
  lor->add_option("--out", out_dir, "output directory override");

  long long seed = 0, count = 1000;
  bool corrupt = false;
  auto* ids = app.add_subcommand("identities", "randomized algebra and Lorentz identities");
  ids->add_option("--seed", seed, "random seed");
  ids->add_option("--count", count, "number of random cases");
  auto* corrupt_opt = ids->add_flag("--corrupt-mul", corrupt, "negative-control product");
  corrupt_opt->group("");  // test hook, hidden from help

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sim->parsed()) return run_simulate(config_path, dump_every, out_dir, order);
  if (cauchy->parsed()) return run_cauchy(config_path, out_dir, order);
  if (lor->parsed()) return run_lorentz(config_path, out_dir);
  if (ids->parsed()) return run_identities(seed, count, corrupt);
  return 1;
}
