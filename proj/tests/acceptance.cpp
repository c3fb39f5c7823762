// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "popdens/cli.hpp"
#include "popdens/config.hpp"
#include "popdens/descent_solver.hpp"
#include "popdens/diagnostics.hpp"
#include "popdens/radial_solutions.hpp"
#include "popdens/special_functions.hpp"

using namespace popdens;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const fs::path kConfigs = POPDENS_CONFIG_DIR;
const fs::path kWork = fs::temp_directory_path() / "popdens_acceptance";

const RadialParams kSets[] = {{3, 3.0, 5.0, 3.0}, {2, 3.0, 5.0, 1.0}};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out != nullptr) *out = o.str();
  return code;
}

// Five-point central difference; the step follows t below 1.
double derivative(const std::function<double(double)>& f, double t) {
  const double s = 1e-3 * std::min(t, 1.0);
  return (f(t - 2 * s) - 8 * f(t - s) + 8 * f(t + s) - f(t + 2 * s)) / (12 * s);
}

Outcome ac1() {
  Outcome o;
  double wr = 0.0, rec = 0.0;
  for (Order nu : {Order::integer(0), Order::half_odd(0), Order::integer(1)}) {
    const double v = nu.value();
    for (int k = 0; k < 200; ++k) {
      const double t = 0.05 + (50.0 - 0.05) * k / 199;
      wr = std::max(wr, std::abs(wronskian_residual(nu, t)));
      using F = double (*)(Order, double);
      for (F f : {F(bessel_j), F(bessel_y)}) {
        rec = std::max(rec, std::abs(derivative([&](double s) { return std::pow(s, -v) * f(nu, s); }, t) +
                                     std::pow(t, -v) * f(nu + 1, t)));
        rec = std::max(rec, std::abs(derivative([&](double s) { return std::pow(s, v) * f(nu, s); }, t) -
                                     std::pow(t, v) * f(nu - 1, t)));
      }
      rec = std::max(rec, std::abs(derivative([&](double s) { return std::pow(s, -v) * bessel_k(nu, s); }, t) +
                                   std::pow(t, -v) * bessel_k(nu + 1, t)));
      rec = std::max(rec, std::abs(derivative([&](double s) { return std::pow(s, v) * bessel_k(nu, s); }, t) +
                                   std::pow(t, v) * bessel_k(nu - 1, t)));
    }
  }
  o.require(wr <= 1e-10, "wronskian " + fmt(wr) + " <= 1e-10");
  o.require(rec <= 1e-6, "recurrences " + fmt(rec) + " <= 1e-6");
  return o;
}

Outcome ac2() {
  Outcome o;
  for (const RadialParams& p : kSets) {
    const RadialSolution s = radial_minimizer(p);
    const std::string tag = "d=" + std::to_string(p.d) + " ";
    const double res = std::abs(rstar_residual(p, s.r_star));
    const double g0 = std::max(std::abs(eval_middle_branch(s, s.r_star) - 1.0),
                               std::abs(eval_middle_branch_derivative(s, s.r_star)));
    const double g1 = std::max(std::abs(eval_middle_branch(s, p.R) - eval_outer_branch(s, p.R)),
                               std::abs(eval_middle_branch_derivative(s, p.R) - eval_outer_branch_derivative(s, p.R)));
    double lo = 1.0, hi = 0.0;
    for (int k = 1; k <= 10000; ++k) {
      const double v = eval_middle_branch(s, s.r_star + (p.R - s.r_star) * k / 10001.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    o.require(res <= 1e-10, tag + "residual " + fmt(res) + " <= 1e-10");
    o.require(g0 <= 1e-8 && g1 <= 1e-8, tag + "C1 gaps " + fmt(g0) + ", " + fmt(g1));
    o.require(lo > 0.0 && hi < 1.0, tag + "middle in (" + fmt(lo) + ", " + fmt(hi) + ")");
  }
  return o;
}

// d omega_d int r^{d-1} (u'^2 + V u^2) dr by composite Simpson on
// [0, R*], [R*, R], [R, 10 R], with u' by central differences of u.
double quadrature_energy(const RadialSolution& s) {
  const RadialParams& p = s.params;
  const auto integrand = [&](double r, double V) {
    const double step = 1e-6 * std::max(r, 1.0);
    const double du = r > step ? (eval_radial(s, r + step) - eval_radial(s, r - step)) / (2 * step)
                               : (eval_radial(s, r + step) - eval_radial(s, r)) / step;
    const double u = eval_radial(s, r);
    return std::pow(r, p.d - 1) * (du * du + V * u * u);
  };
  const auto simpson = [&](double a, double b, double V, int n) {
    // Pull the ends in by a hair so the difference quotient stays on one branch.
    const double eps = 1e-7 * (b - a);
    a += eps;
    b -= eps;
    const double h = (b - a) / n;
    double sum = integrand(a, V) + integrand(b, V);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(a + i * h, V);
    return sum * h / 3;
  };
  const int n = 20000;
  const double k2 = p.kappa * p.kappa, a2 = p.alpha * p.alpha;
  const double sum = simpson(0.0, s.r_star, -k2, n) + simpson(s.r_star, p.R, -k2, n) + simpson(p.R, 10 * p.R, a2, n);
  return p.d * unit_ball_volume(p.d) * sum;
}

Outcome ac3() {
  Outcome o;
  for (const RadialParams& p : kSets) {
    const RadialSolution s = radial_minimizer(p);
    const double closed = radial_energy(s);
    const double quad = quadrature_energy(s);
    const double rel = std::abs(closed - quad) / std::abs(quad);
    o.require(rel <= 1e-4, "d=" + std::to_string(p.d) + " E " + fmt(closed) + " vs " + fmt(quad) + " rel " + fmt(rel));
  }
  return o;
}

Outcome ac4() {
  Outcome o;
  const RadialSolution s = radial_minimizer(kSets[0]);
  double gap = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double r = 10.0 * s.params.R * (k + 1) / 1000;
    gap = std::max(gap, std::abs(eval_radial(s, r) - eval_radial_3d_elementary(s, r)));
  }
  o.require(gap <= 1e-10, "max gap " + fmt(gap) + " over 1000 radii");
  return o;
}

PotentialSpec load_spec(const std::string& name) { return potential_from_config(read_key_values(kConfigs / name)); }

Outcome ac5() {
  Outcome o;
  SolverConfig cfg;
  cfg.tau = 0.5;
  cfg.max_iters = 50;
  const Grid grid = Grid::make(5.0, 0.1);
  for (const char* name : {"triangle.cfg", "square.cfg", "ellipse.cfg", "punctured.cfg"}) {
    const auto t0 = Clock::now();
    const PotentialSpec spec = load_spec(name);
    const RunResult run = run_descent(spec, cfg, grid);
    const double secs = seconds_since(t0);
    const double E = discrete_energy(run.field, spec);
    const double area = contact_area(run.field, cfg.contact_eps);
    bool sandwiched = true;
    for (std::size_t k = 0; k < run.field.values.size(); ++k) {
      sandwiched = sandwiched && run.lower.values[k] <= run.field.values[k] && run.field.values[k] <= run.upper.values[k];
    }
    const bool ok = E < 0.0 && area > 0.0 && contact_in_well(run.field, spec, cfg.contact_eps) && sandwiched &&
                    secs < 120.0;
    o.require(ok, std::string(name) + " E " + fmt(E) + " area " + fmt(area) + (sandwiched ? "" : " unsandwiched") +
                      " " + fmt(secs) + "s");
  }
  return o;
}

// Local linear fit of u against r over nodes with |r - rho| <= h, evaluated at rho.
Outcome ac6() {
  Outcome o;
  const Grid g = Grid::make(5.0, 0.1);
  const RunResult run = run_descent(load_spec("disc.cfg"), {}, g);
  struct Node {
    double r, u;
  };
  std::vector<Node> nodes;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const double r = std::hypot(g.coord(i), g.coord(j));
      if (r <= g.T - g.h) nodes.push_back({r, run.field.at(i, j)});
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.r < b.r; });
  double worst = 0.0;
  for (const Node& q : nodes) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), q.r - g.h, [](const Node& a, double r) { return a.r < r; });
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (; it != nodes.end() && it->r <= q.r + g.h; ++it) {
      const double x = it->r - q.r;
      n += 1;
      sx += x;
      sy += it->u;
      sxx += x * x;
      sxy += x * it->u;
    }
    const double det = n * sxx - sx * sx;
    const double avg = det > 1e-14 ? (sxx * sy - sx * sxy) / det : sy / n;
    worst = std::max(worst, std::abs(q.u - avg));
  }
  o.require(worst <= 5 * g.h * g.h, "max angular deviation " + fmt(worst) + " <= 5h^2 = " + fmt(5 * g.h * g.h));
  return o;
}

Outcome ac7() {
  Outcome o;
  const fs::path cfg = kConfigs / "exact_disc.cfg";
  const fs::path field = kWork / "exact_field.csv";
  const fs::path report = kWork / "exact_report.json";
  const KeyValues kv = read_key_values(cfg);
  const double h = require_double(kv, "h"), alpha = require_double(kv, "alpha");
  o.require(require_double(kv, "T") >= 6 * require_double(kv, "R_bound"), "T >= 6R");
  o.require(cli({"sample", "--config", cfg.string(), "--out", field.string()}) == kExitOk, "sample");
  const int code = cli({"check", "--field", field.string(), "--config", cfg.string(), "--out", report.string()});
  o.require(code == kExitOk, "check exit " + std::to_string(code));
  const auto j = nlohmann::json::parse(slurp(report));
  const double lo = j["lewy_stampacchia_max_violation"][0], up = j["lewy_stampacchia_max_violation"][1];
  const double ratio = j["distance_bound_max_ratio"], slope = j["decay_fit_slope"], pos = j["positivity_min"];
  o.require(lo <= 10 * h && up <= 10 * h, "LS (" + fmt(lo) + ", " + fmt(up) + ") <= " + fmt(10 * h));
  o.require(ratio <= 1 + 10 * h, "distance ratio " + fmt(ratio));
  o.require(j["decay_annulus"][0] == 2.0 && j["decay_annulus"][1] == 4.0, "annulus (2R, 4R)");
  o.require(std::abs(slope - alpha) <= 0.05 * alpha, "decay slope " + fmt(slope));
  o.require(pos > 0.0, "positivity " + fmt(pos));
  return o;
}

Outcome ac8() {
  Outcome o;
  SolverConfig cfg;
  cfg.use_radial_clamp = false;
  const PotentialSpec spec{5.0, 3.0, WellShape{}, 3.0, 1.0};
  const RunResult run = run_descent(spec, cfg, Grid::make(5.0, 0.1));
  const double sup = run.field.sup_norm();
  const double E = discrete_energy(run.field, spec);
  o.require(sup <= 1e-6, "sup " + fmt(sup));
  o.require(E >= 0.0 && E <= 1e-10, "energy " + fmt(E));
  return o;
}

Outcome ac9() {
  Outcome o;
  const fs::path cfg = kConfigs / "square.cfg";
  for (const char* run : {"run_a", "run_b"}) {
    o.require(cli({"solve", "--config", cfg.string(), "--out", (kWork / run).string()}) == kExitOk,
              std::string("solve ") + run);
  }
  const std::string a = slurp(kWork / "run_a" / "field.csv");
  o.require(!a.empty() && a == slurp(kWork / "run_b" / "field.csv"),
            "field.csv identical (" + std::to_string(a.size()) + " bytes)");
  return o;
}

Outcome ac10() {
  Outcome o;
  const fs::path path = kWork / "run_a" / "report.json";
  if (!fs::exists(path)) cli({"solve", "--config", (kConfigs / "square.cfg").string(), "--out", (kWork / "run_a").string()});
  const auto j = nlohmann::json::parse(slurp(path));
  const bool present = j.contains("quasiconcavity_min_gap") && j["quasiconcavity_min_gap"].is_number();
  o.require(present, present ? "quasiconcavity_min_gap " + fmt(j["quasiconcavity_min_gap"].get<double>()) + " (reported)"
                             : "quasiconcavity_min_gap missing");
  return o;
}

struct Criterion {
  const char* name;
  double budget;  // seconds, 0 when none is stated
  Outcome (*run)();
};

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const Criterion all[] = {{"AC1 Bessel identities", 1.0, ac1},
                           {"AC2 radial constructor", 1.0, ac2},
                           {"AC3 energy identity", 5.0, ac3},
                           {"AC4 d=3 elementary form", 0.0, ac4},
                           {"AC5 four wells", 4 * 120.0, ac5},
                           {"AC6 disc symmetry", 0.0, ac6},
                           {"AC7 exact-solution closure", 30.0, ac7},
                           {"AC8 trivial minimizer", 0.0, ac8},
                           {"AC9 determinism", 0.0, ac9},
                           {"AC10 quasiconcavity report", 0.0, ac10}};
  int failed = 0;
  for (const Criterion& c : all) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = seconds_since(t0);
    if (c.budget > 0.0) o.require(secs < c.budget, "runtime " + fmt(secs) + "s < " + fmt(c.budget) + "s");
    else o.detail += "; " + fmt(secs) + "s";
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(all)) - failed, std::size(all));
  return failed == 0 ? 0 : 1;
}
