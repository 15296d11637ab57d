// eqmflow command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure or failed
// check, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>

#include "eqmflow/eqmflow.hpp"

namespace {

using namespace eqmflow;

Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    std::size_t ua = 0, ub = 0;
    const double re = std::stod(a, &ua), im = std::stod(b, &ub);
    if (ua != a.size() || ub != b.size()) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::exception&) {
    fail(ErrorKind::Config, "--z: expected RE or RE,IM, got \"" + s + "\"");
  }
}

struct Flags {
  std::string scenario, scenario_dir, out = "out", z;
  double dt = 0.0, t_max = -1.0, alpha = 0.0;
  long long seed = -1;
  int trials = 0, fock_dim = 0;
  std::string suite;
};

Overrides overrides_from(const Flags& f) {
  Overrides o;
  if (f.dt > 0.0) o.dt = f.dt;
  if (f.t_max >= 0.0) o.t_max = f.t_max;
  if (f.seed >= 0) o.seed = static_cast<std::uint64_t>(f.seed);
  if (f.fock_dim > 0) o.fock_dim = f.fock_dim;
  if (f.alpha != 0.0) o.alpha = f.alpha;
  if (!f.z.empty()) o.z = parse_complex(f.z);
  return o;
}

int cmd_run(const Flags& f) {
  const Overrides ov = overrides_from(f);
  if (!f.scenario_dir.empty()) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(f.scenario_dir, ec))
      if (e.path().extension() == ".json") files.push_back(e.path());
    if (ec) fail(ErrorKind::Io, "cannot list " + f.scenario_dir + ": " + ec.message());
    std::sort(files.begin(), files.end());
    int worst = 0;
    for (const auto& p : files) {
      try {
        const Scenario s = load_scenario(p.string(), ov);
        const RunResult r = run_scenario(s, (std::filesystem::path(f.out) / s.name).string(), ov);
        std::cout << r.summary << "\n";
      } catch (const Error& e) {
        std::cerr << p.string() << ": " << e.what() << "\n";
        worst = std::max(worst, e.exit_code());
      }
    }
    return worst;
  }
  if (f.scenario.empty()) fail(ErrorKind::Config, "run: --scenario or --scenario-dir is required");
  const Scenario s = load_scenario(f.scenario, ov);
  std::cout << run_scenario(s, f.out, ov).summary << "\n";
  return 0;
}

int cmd_check(const Flags& f) {
  SuiteOptions o;
  if (f.seed >= 0) o.seed = static_cast<std::uint64_t>(f.seed);
  o.trials = f.trials;
  if (f.dt > 0.0) o.dt = f.dt;
  const double scale = tolerance_scale_from_env();
  SuiteReport r = property_suite(f.suite, o);
  if (scale != 1.0) {
    for (auto& c : r.checks) {
      if (!std::isfinite(c.value)) continue;
      c.threshold = c.lower_bound ? c.threshold / scale : c.threshold * scale;
      c.passed = c.lower_bound ? c.value >= c.threshold : c.value <= c.threshold;
    }
    std::cerr << "tolerances scaled by " << scale << " (EQMFLOW_TOL_SCALE)\n";
  }
  std::cerr << r.text();
  std::size_t failed = 0;
  for (const auto& c : r.checks) failed += c.passed ? 0 : 1;
  std::cout << r.suite << ": " << (r.checks.size() - failed) << "/" << r.checks.size() << " checks passed"
            << (r.all_passed() ? "" : " FAILED") << "\n";
  return r.all_passed() ? 0 : 2;
}

Scenario scenario_or(const Flags& f, const std::string& solver, const Json& fallback) {
  const Overrides ov = overrides_from(f);
  if (!f.scenario.empty()) {
    Scenario s = load_scenario(f.scenario, ov);
    if (s.solver != solver) fail(ErrorKind::Config, "scenario.solver: expected \"" + solver + "\" for this subcommand");
    return s;
  }
  return parse_scenario(fallback, ov);
}

int cmd_illustrate(const Flags& f) {
  const Json base = {{"name", "illustration"}, {"solver", "illustration"},
                     {"time", {{"t_max", 2.0 * std::numbers::pi}, {"dt", 1e-3}, {"sample_stride", 10}}}};
  const Scenario s = scenario_or(f, "illustration", base);
  const Overrides ov = overrides_from(f);
  std::cout << run_illustration(s, illustration_params(s.extra, ov), f.out).summary << "\n";
  return 0;
}

int cmd_meanfield(const Flags& f) {
  const Json base = {{"name", "meanfield"},
                     {"solver", "meanfield"},
                     {"system", {{"algebra", "su2"}, {"spin", 0.5}}},
                     {"generator", {{"kind", "classical"}, {"terms", {{{"coef", 1.0}, {"powers", {0, 0, 2}}}}}}},
                     {"initial", {{"kind", "pure"}, {"state", {{"re", {std::sqrt(0.5), std::sqrt(0.5)}}}}}},
                     {"time", {{"t_max", 1.0}, {"dt", 1e-3}}}};
  std::cout << run_meanfield(scenario_or(f, "meanfield", base), f.out).summary << "\n";
  return 0;
}

int cmd_hf(const Flags& f) {
  const Json base = {{"name", "hf"}, {"solver", "hf"}, {"hf", {{"d", 4}, {"N", 2}}}, {"time", {{"t_max", 2.0}}}};
  std::cout << run_hf(scenario_or(f, "hf", base), f.out).summary << "\n";
  return 0;
}

int cmd_mixtures(const Flags& f) {
  const Json base = {{"name", "mixtures"}, {"solver", "mixtures"}, {"time", {{"t_max", 1.0}, {"dt", 1e-3}, {"sample_stride", 10}}}};
  std::cout << run_mixtures(scenario_or(f, "mixtures", base), f.out).summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eqmflow: nonlinear quantum flows on state spaces"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* c) {
    c->add_option("--out", f.out, "output directory");
    c->add_option("--dt", f.dt, "time step override");
    c->add_option("--t-max", f.t_max, "final time override");
    c->add_option("--seed", f.seed, "random seed override");
  };

  auto* run = app.add_subcommand("run", "run a scenario file (or every *.json in a directory)");
  run->add_option("--scenario", f.scenario, "scenario JSON file");
  run->add_option("--scenario-dir", f.scenario_dir, "directory of scenario files");
  run->add_option("--fock-dim", f.fock_dim, "Fock truncation override");
  run->add_option("--alpha", f.alpha, "illustration coupling override");
  run->add_option("--z", f.z, "illustration start point, RE or RE,IM");
  common(run);

  auto* check = app.add_subcommand("check", "run a property suite");
  check->add_option("suite", f.suite, "suite name")
      ->required()
      ->check(CLI::IsMember(suite_names()));
  check->add_option("--seed", f.seed, "random seed");
  check->add_option("--trials", f.trials, "number of random trials");
  check->add_option("--dt", f.dt, "time step of the flow-based checks");

  auto* ill = app.add_subcommand("illustrate", "tangent-circle illustration on the coherent-state orbit");
  ill->add_option("--scenario", f.scenario, "scenario JSON file");
  ill->add_option("--alpha", f.alpha, "coupling alpha");
  ill->add_option("--z", f.z, "start point z0 = q - ip, RE or RE,IM");
  ill->add_option("--fock-dim", f.fock_dim, "Fock truncation");
  common(ill);

  auto* mf = app.add_subcommand("meanfield", "mean-field finite-size error scan");
  mf->add_option("--scenario", f.scenario, "scenario JSON file");
  common(mf);

  auto* hf = app.add_subcommand("hf", "Hartree-Fock SCF and time-dependent run");
  hf->add_option("--scenario", f.scenario, "scenario JSON file");
  common(hf);

  auto* mix = app.add_subcommand("mixtures", "divergence of genuine and elementary mixtures");
  mix->add_option("--scenario", f.scenario, "scenario JSON file");
  common(mix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) return cmd_run(f);
    if (*check) return cmd_check(f);
    if (*ill) return cmd_illustrate(f);
    if (*mf) return cmd_meanfield(f);
    if (*hf) return cmd_hf(f);
    if (*mix) return cmd_mixtures(f);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
