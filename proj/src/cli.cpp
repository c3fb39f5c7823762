#include "popdens/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "popdens/config.hpp"
#include "popdens/descent_solver.hpp"
#include "popdens/diagnostics.hpp"
#include "popdens/errors.hpp"
#include "popdens/io.hpp"
#include "popdens/potential_model.hpp"
#include "popdens/radial_solutions.hpp"

namespace popdens {

namespace {

constexpr const char* kKeyHelp = R"(Config keys (`key = value`, '#' comments):
  alpha              exterior strength, V = alpha^2 off the well      [1/length]
  beta               well strength, V = -beta^2 on the well           [1/length]
  r_tilde            radius of a disc inside the well                 [length]
  R_bound            radius of a disc containing the well             [length]
  shape.kind         disc | ellipse | rectangle | polygon | punctured_disc | none
  shape.radius, shape.center_x, shape.center_y                        [length]
  shape.semi_x, shape.semi_y (ellipse, centre as above)               [length]
  shape.x_min, shape.x_max, shape.y_min, shape.y_max (rectangle)      [length]
  shape.half_planes  "a b c; a b c; ..." meaning a x + b y <= c (polygon)
  shape.hole_radius, shape.hole_center_x, shape.hole_center_y         [length]
  T                  half-width of the square domain (default 5)      [length]
  h                  grid spacing (default 0.1)                       [length]
  tau                descent step (default 0.5)                       [length^2]
  max_iters          descent steps (default 50)
  linear_tol         relative CG residual (default 1e-10)
  stop_tol           relative sup-norm change to stop (default 1e-8)
  use_radial_clamp   clamp between radial bounds (default true)
  contact_eps        threshold for {u = 1} (default 1e-6)
  seed               quasiconcavity probe seed (default 42)
  quasi_pairs        quasiconcavity probe pairs (default 10000)
  decay_r_in, decay_r_out   decay-fit annulus (default min(2R,0.6T), min(4R,0.9T,T-3h))
)";

const std::set<std::string> kRunKeys = {"T",           "h",    "tau",        "max_iters",  "linear_tol",
                                        "stop_tol",    "seed", "quasi_pairs", "decay_r_in", "decay_r_out",
                                        "contact_eps", "use_radial_clamp"};

const std::set<std::string> kPotentialKeys = {
    "alpha",          "beta",           "r_tilde",          "R_bound",          "shape.kind",
    "shape.radius",   "shape.center_x", "shape.center_y",   "shape.semi_x",     "shape.semi_y",
    "shape.x_min",    "shape.x_max",    "shape.y_min",      "shape.y_max",      "shape.half_planes",
    "shape.hole_radius", "shape.hole_center_x", "shape.hole_center_y"};

void reject_unknown_keys(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (!kRunKeys.contains(key) && !kPotentialKeys.contains(key)) throw ConfigError(key, "unknown key");
  }
}

void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw ConfigError(s, "--set expects key=value");
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
}

// Trapping and parameter failures are fatal; geometric containment is only
// checked on sampled boundaries and is reported as a warning.
void screen_spec(const PotentialSpec& spec, bool clamp, std::ostream& err, nlohmann::json* warnings) {
  for (const Violation& v : validate_spec(spec)) {
    const bool fatal = v.condition == "parameters" || (v.condition == "shape" && !spec.shape.empty()) ||
                       (v.condition == "trapping" && clamp);
    if (fatal) throw AdmissibilityError(v.condition + ": " + v.detail);
    err << "warning: " << v.condition << ": " << v.detail << '\n';
    if (warnings != nullptr) warnings->push_back({{"condition", v.condition}, {"detail", v.detail}});
  }
}

SolverConfig solver_config(const KeyValues& kv) {
  SolverConfig cfg;
  cfg.tau = get_double(kv, "tau", cfg.tau);
  cfg.max_iters = get_int(kv, "max_iters", cfg.max_iters);
  cfg.linear_tol = get_double(kv, "linear_tol", cfg.linear_tol);
  cfg.stop_tol = get_double(kv, "stop_tol", cfg.stop_tol);
  cfg.use_radial_clamp = get_bool(kv, "use_radial_clamp", cfg.use_radial_clamp);
  cfg.contact_eps = get_double(kv, "contact_eps", cfg.contact_eps);
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError("solver", e.what());
  }
  return cfg;
}

DiagnosticsOptions diagnostics_options(const KeyValues& kv) {
  DiagnosticsOptions o;
  o.contact_eps = get_double(kv, "contact_eps", o.contact_eps);
  o.quasi_pairs = get_int(kv, "quasi_pairs", o.quasi_pairs);
  const int seed = get_int(kv, "seed", 42);
  if (seed < 0) throw ConfigError("seed", "must be >= 0");
  o.seed = static_cast<std::uint64_t>(seed);
  if (kv.contains("decay_r_in")) o.decay_r_in = require_double(kv, "decay_r_in");
  if (kv.contains("decay_r_out")) o.decay_r_out = require_double(kv, "decay_r_out");
  return o;
}

Grid grid_from(const KeyValues& kv) {
  try {
    return Grid::make(get_double(kv, "T", 5.0), get_double(kv, "h", 0.1));
  } catch (const DomainError& e) {
    throw ConfigError("T/h", e.what());
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void print_solution(std::ostream& out, const RadialSolution& s) {
  out << "r_star " << num(s.r_star) << '\n'
      << "a " << num(s.a) << '\n'
      << "b " << num(s.b) << '\n'
      << "c " << num(s.c) << '\n'
      << "energy " << num(radial_energy(s)) << '\n'
      << "brackets " << s.bracket_count << '\n';
}

struct RadialArgs {
  int d = 2;
  double alpha = 0.0;
  double kappa = 0.0;
  double R = 0.0;
  std::string profile;
  int samples = 1001;
  double r_max = 0.0;
};

int cmd_radial(const RadialArgs& a, std::ostream& out) {
  const RadialSolution s = radial_minimizer({a.d, a.kappa, a.alpha, a.R});
  print_solution(out, s);
  if (a.d == 3) {
    // Cross-check against the sin/cos/exp closed form.
    double gap = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double r = 3.0 * a.R * i / 1000.0;
      gap = std::max(gap, std::abs(eval_radial(s, r) - eval_radial_3d_elementary(s, r)));
    }
    out << "elementary_max_gap " << num(gap) << '\n';
  }
  if (!a.profile.empty()) {
    std::ofstream f(a.profile);
    if (!f) throw ConfigError(a.profile, "cannot open for writing");
    const double r_max = a.r_max > 0.0 ? a.r_max : 2.0 * a.R;
    f << "r,u\n";
    for (int i = 0; i < a.samples; ++i) {
      const double r = r_max * i / std::max(a.samples - 1, 1);
      f << num(r) << ',' << num(eval_radial(s, r)) << '\n';
    }
  }
  return kExitOk;
}

struct BoundsArgs {
  int d = 2;
  double alpha = 0.0;
  double beta = 0.0;
  double r_tilde = 0.0;
  double R = 0.0;
  std::string profile;
  int samples = 1001;
  double r_max = 0.0;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const RadialBounds b = radial_bounds_pair(a.d, a.alpha, a.beta, a.r_tilde, a.R);
  out << "[lower]\n";
  print_solution(out, b.lower);
  out << "[upper]\n";
  print_solution(out, b.upper);
  if (!a.profile.empty()) {
    std::ofstream f(a.profile);
    if (!f) throw ConfigError(a.profile, "cannot open for writing");
    const double r_max = a.r_max > 0.0 ? a.r_max : 2.0 * a.R;
    f << "r,u_lower,u_upper\n";
    for (int i = 0; i < a.samples; ++i) {
      const double r = r_max * i / std::max(a.samples - 1, 1);
      f << num(r) << ',' << num(eval_radial(b.lower, r)) << ',' << num(eval_radial(b.upper, r)) << '\n';
    }
  }
  return kExitOk;
}

struct SweepArgs {
  int d = 2;
  double alpha = 0.0;
  double kappa = 0.0;
  double R = 0.0;
  std::string param = "kappa";
  double from = 0.0;
  double to = 0.0;
  int steps = 11;
  std::string out_path;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::ofstream file;
  if (!a.out_path.empty()) {
    file.open(a.out_path);
    if (!file) throw ConfigError(a.out_path, "cannot open for writing");
  }
  std::ostream& os = a.out_path.empty() ? out : file;
  os << a.param << ",admissible,r_star,energy,contact_area\n";
  for (int i = 0; i < a.steps; ++i) {
    const double v = a.steps == 1 ? a.from : a.from + (a.to - a.from) * i / (a.steps - 1);
    RadialParams p{a.d, a.kappa, a.alpha, a.R};
    if (a.param == "kappa") p.kappa = v;
    else if (a.param == "alpha") p.alpha = v;
    else p.R = v;
    os << num(v);
    try {
      const RadialSolution s = radial_minimizer(p);
      os << ",1," << num(s.r_star) << ',' << num(radial_energy(s)) << ','
         << num(unit_ball_volume(a.d) * std::pow(s.r_star, a.d)) << '\n';
    } catch (const AdmissibilityError&) {
      os << ",0,nan,nan,nan\n";
    }
  }
  return kExitOk;
}

struct SolveArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<double> tau, T, h;
  std::optional<int> max_iters, seed;
  std::optional<bool> clamp;
  std::string out_dir = "out";
};

KeyValues load_config(const std::string& path, const std::vector<std::string>& sets) {
  KeyValues kv = path.empty() ? KeyValues{} : read_key_values(path);
  apply_overrides(kv, sets);
  reject_unknown_keys(kv);
  return kv;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  KeyValues kv = load_config(a.config, a.sets);
  if (a.tau) kv["tau"] = num(*a.tau);
  if (a.T) kv["T"] = num(*a.T);
  if (a.h) kv["h"] = num(*a.h);
  if (a.max_iters) kv["max_iters"] = std::to_string(*a.max_iters);
  if (a.seed) kv["seed"] = std::to_string(*a.seed);
  if (a.clamp) kv["use_radial_clamp"] = *a.clamp ? "true" : "false";

  const PotentialSpec spec = potential_from_config(kv);
  const SolverConfig cfg = solver_config(kv);
  const DiagnosticsOptions dopt = diagnostics_options(kv);
  const Grid grid = grid_from(kv);
  nlohmann::json warnings = nlohmann::json::array();
  screen_spec(spec, cfg.use_radial_clamp, err, &warnings);

  const RunResult run = run_descent(spec, cfg, grid);
  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  write_field_csv(dir / "field.csv", run.field);
  write_history_csv(dir / "history.csv", run.history);

  nlohmann::json resolved(kv);
  nlohmann::json meta = {{"config", resolved},
                         {"grid", grid_to_json(grid)},
                         {"iterations", run.history.size() - 1},
                         {"converged", run.converged},
                         {"warnings", warnings}};
  if (cfg.use_radial_clamp) {
    meta["radial_bounds"] = {{"lower_r_star", run.bounds.lower.r_star}, {"upper_r_star", run.bounds.upper.r_star}};
  }
  const DiagnosticsReport rep = build_report(run.field, spec, dopt);
  const nlohmann::json rj = report_to_json(rep);
  meta["diagnostics"] = rj;
  write_json(dir / "report.json", rj);
  write_json(dir / "run.json", meta);

  out << "iterations " << run.history.size() - 1 << (run.converged ? " (converged)" : "") << '\n'
      << "energy " << num(rep.energy) << '\n'
      << "contact_area " << num(rep.contact_area) << '\n'
      << "quasiconcavity_min_gap " << num(rep.quasiconcavity_min_gap) << '\n'
      << "asserted_contracts " << (rep.all_pass() ? "PASS" : "FAIL") << '\n'
      << "wrote " << (dir / "field.csv").string() << ", history.csv, report.json, run.json\n";
  return kExitOk;
}

struct CheckArgs {
  std::string field;
  std::string config;
  std::vector<std::string> sets;
  std::string out_path;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const KeyValues kv = load_config(a.config, a.sets);
  const PotentialSpec spec = potential_from_config(kv);
  screen_spec(spec, false, err, nullptr);
  const ScalarField u = read_field_csv(std::filesystem::path(a.field));
  if (!u.satisfies_constraints()) throw DomainError("field violates 0 <= u <= 1 or the zero boundary");
  const DiagnosticsReport rep = build_report(u, spec, diagnostics_options(kv));
  const nlohmann::json rj = report_to_json(rep);
  if (!a.out_path.empty()) write_json(a.out_path, rj);
  out << rj.dump(2) << '\n';
  const double h = u.grid.h;
  const auto line = [&](const char* name, bool ok, double value, const std::string& bound) {
    out << (ok ? "PASS " : "FAIL ") << name << ' ' << num(value) << ' ' << bound << '\n';
  };
  line("lewy_stampacchia", rep.lewy_stampacchia_pass, std::max(rep.lewy_stampacchia_lower, rep.lewy_stampacchia_upper),
       "<= " + num(10.0 * h));
  line("distance_bound", rep.distance_bound_pass, rep.distance_bound_max_ratio, "<= " + num(1.0 + 10.0 * h));
  line("decay_fit", rep.decay_pass, rep.decay_fit_slope, "alpha = " + num(spec.alpha) + " +- 20%");
  line("positivity", rep.positivity_pass, rep.positivity_min, "> 0");
  line("contact_in_well", rep.contact_in_well, rep.contact_area, "area");
  out << "INFO energy_contact_identity " << num(rep.energy_contact_identity_gap) << '\n'
      << "INFO quasiconcavity_min_gap " << num(rep.quasiconcavity_min_gap) << '\n';
  return rep.all_pass() ? kExitOk : kExitValidation;
}

struct SampleArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out_path = "field.csv";
};

// The exact d = 2 minimizer for a centred disc well, sampled on the grid.
int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const KeyValues kv = load_config(a.config, a.sets);
  const PotentialSpec spec = potential_from_config(kv);
  const auto* disc = std::get_if<Disc>(&spec.shape.variant());
  if (disc == nullptr || disc->center.x != 0.0 || disc->center.y != 0.0) {
    throw ConfigError("shape.kind", "sample needs a disc well centred at the origin");
  }
  const RadialSolution s = radial_minimizer({2, spec.beta, spec.alpha, disc->radius});
  const ScalarField u = sample_radial(s, grid_from(kv));
  write_field_csv(std::filesystem::path(a.out_path), u);
  out << "r_star " << num(s.r_star) << "\nenergy " << num(radial_energy(s)) << "\nwrote " << a.out_path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained population-density minimizers: exact radial solutions, a grid solver and checks",
               "popdens"};
  // -h stays free for the grid spacing; subcommands inherit this flag.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  app.footer(kKeyHelp);

  RadialArgs ra;
  auto* radial = app.add_subcommand("radial", "exact radial minimizer: R*, coefficients, energy");
  radial->add_option("--d", ra.d, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  radial->add_option("--alpha", ra.alpha, "exterior strength")->required();
  radial->add_option("--kappa", ra.kappa, "well strength")->required();
  radial->add_option("--R", ra.R, "well radius")->required();
  radial->add_option("--profile", ra.profile, "write r,u samples to this CSV");
  radial->add_option("--samples", ra.samples, "profile samples")->check(CLI::PositiveNumber);
  radial->add_option("--r-max", ra.r_max, "profile extent (default 2R)");

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "lower/upper radial comparison profiles");
  bounds->add_option("--d", ba.d, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  bounds->add_option("--alpha", ba.alpha, "exterior strength")->required();
  bounds->add_option("--beta", ba.beta, "well strength")->required();
  bounds->add_option("--r-tilde", ba.r_tilde, "radius of a disc inside the well")->required();
  bounds->add_option("--R", ba.R, "radius of a disc containing the well")->required();
  bounds->add_option("--profile", ba.profile, "write r,u_lower,u_upper samples to this CSV");
  bounds->add_option("--samples", ba.samples, "profile samples")->check(CLI::PositiveNumber);
  bounds->add_option("--r-max", ba.r_max, "profile extent (default 2R)");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "vary one radial parameter; CSV of R*, energy, contact area");
  sweep->add_option("--d", wa.d, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  sweep->add_option("--alpha", wa.alpha, "exterior strength")->required();
  sweep->add_option("--kappa", wa.kappa, "well strength")->required();
  sweep->add_option("--R", wa.R, "well radius")->required();
  sweep->add_option("--param", wa.param, "parameter to vary")->check(CLI::IsMember({"kappa", "alpha", "R"}));
  sweep->add_option("--from", wa.from, "first value")->required();
  sweep->add_option("--to", wa.to, "last value")->required();
  sweep->add_option("--steps", wa.steps, "number of values")->check(CLI::PositiveNumber);
  sweep->add_option("--out", wa.out_path, "CSV path (default stdout)");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "projected descent on the grid; writes field, history and reports");
  solve->add_option("--config", sa.config, "key = value config file")->required()->check(CLI::ExistingFile);
  solve->add_option("--set", sa.sets, "override a config key (key=value), repeatable");
  solve->add_option("--tau", sa.tau, "descent step");
  solve->add_option("--T", sa.T, "domain half-width");
  solve->add_option("--h", sa.h, "grid spacing");
  solve->add_option("--max-iters", sa.max_iters, "descent steps");
  solve->add_option("--seed", sa.seed, "quasiconcavity probe seed");
  solve->add_option("--use-radial-clamp", sa.clamp, "clamp between radial bounds (true/false)");
  solve->add_option("--out", sa.out_dir, "output directory");
  solve->footer(kKeyHelp);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "run every diagnostic on a dumped field");
  check->add_option("--field", ca.field, "field CSV (x,y,u)")->required()->check(CLI::ExistingFile);
  check->add_option("--config", ca.config, "key = value config file")->required()->check(CLI::ExistingFile);
  check->add_option("--set", ca.sets, "override a config key (key=value), repeatable");
  check->add_option("--out", ca.out_path, "also write the report JSON here");

  SampleArgs pa;
  auto* sample = app.add_subcommand("sample", "sample the exact d = 2 minimizer of a centred disc well");
  sample->add_option("--config", pa.config, "key = value config file")->required()->check(CLI::ExistingFile);
  sample->add_option("--set", pa.sets, "override a config key (key=value), repeatable");
  sample->add_option("--out", pa.out_path, "field CSV path");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("popdens");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*radial) return cmd_radial(ra, out);
    if (*bounds) return cmd_bounds(ba, out);
    if (*sweep) return cmd_sweep(wa, out);
    if (*solve) return cmd_solve(sa, out, err);
    if (*check) return cmd_check(ca, out, err);
    if (*sample) return cmd_sample(pa, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const AdmissibilityError& e) {
    err << "inadmissible: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BoundOrderError& e) {
    err << "bound order: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NoRootError& e) {
    err << "no root: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << " (residual " << e.residual() << ", " << e.iterations()
        << " iterations)\n";
    return kExitNumerical;
  } catch (const DiagnosticsError& e) {
    err << "diagnostics: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "filesystem: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace popdens
