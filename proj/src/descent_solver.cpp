#include "popdens/descent_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "popdens/errors.hpp"

namespace popdens {

Grid Grid::make(double T, double h) {
  if (!(h > 0.0) || !(T > 0.0)) throw DomainError("grid: T and h must be positive");
  const int half = static_cast<int>(std::floor(T / h + 1e-9));
  if (half < 1) throw DomainError("grid: need T >= h");
  return {T, h, half, 2 * half + 1};
}

ScalarField ScalarField::constant(const Grid& grid, double interior_value) {
  ScalarField f = zeros(grid);
  for (int j = 1; j < grid.n - 1; ++j) {
    for (int i = 1; i < grid.n - 1; ++i) f.at(i, j) = interior_value;
  }
  return f;
}

bool ScalarField::satisfies_constraints() const {
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      const double v = at(i, j);
      if (grid.on_boundary(i, j) ? v != 0.0 : !(v >= 0.0 && v <= 1.0)) return false;
    }
  }
  return true;
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void SolverConfig::validate() const {
  if (!(tau > 0.0)) throw DomainError("solver: tau must be positive");
  if (max_iters < 0) throw DomainError("solver: max_iters must be >= 0");
  if (!(linear_tol > 0.0)) throw DomainError("solver: linear_tol must be positive");
  if (!(stop_tol > 0.0)) throw DomainError("solver: stop_tol must be positive");
  if (!(contact_eps > 0.0)) throw DomainError("solver: contact_eps must be positive");
}

std::vector<double> sample_potential(const PotentialSpec& spec, const Grid& grid) {
  std::vector<double> v(grid.size());
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) v[grid.index(i, j)] = potential_value(spec, grid.point(i, j));
  }
  return v;
}

ScalarField sample_radial(const RadialSolution& sol, const Grid& grid) {
  ScalarField f = ScalarField::zeros(grid);
  for (int j = 1; j < grid.n - 1; ++j) {
    for (int i = 1; i < grid.n - 1; ++i) {
      f.at(i, j) = eval_radial(sol, std::hypot(grid.coord(i), grid.coord(j)));
    }
  }
  return f;
}

double discrete_energy(const ScalarField& u, std::span<const double> potential) {
  const Grid& g = u.grid;
  double gradient = 0.0;
  double well = 0.0;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const double v = u.at(i, j);
      if (i + 1 < g.n) {
        const double dx = u.at(i + 1, j) - v;
        gradient += dx * dx;
      }
      if (j + 1 < g.n) {
        const double dy = u.at(i, j + 1) - v;
        gradient += dy * dy;
      }
      well += potential[g.index(i, j)] * v * v;
    }
  }
  return gradient + g.h * g.h * well;
}

double discrete_energy(const ScalarField& u, const PotentialSpec& spec) {
  return discrete_energy(u, sample_potential(spec, u.grid));
}

double discrete_laplacian(const ScalarField& u, int i, int j) {
  const double h2 = u.grid.h * u.grid.h;
  return ((u.at(i + 1, j) + u.at(i - 1, j)) + (u.at(i, j + 1) + u.at(i, j - 1)) - 4.0 * u.at(i, j)) / h2;
}

namespace {

// Sum of a_k b_k over the grid, adding mirror images first so that the result
// is bit-identical for fields reflected across either axis.
double dot(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
  const auto term = [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    return a[k] * b[k];
  };
  const auto row = [&](int i, int j) {
    const int mi = g.n - 1 - i;
    return i == mi ? term(i, j) : term(i, j) + term(mi, j);
  };
  double s = 0.0;
  for (int j = 0; j <= g.half; ++j) {
    const int mj = g.n - 1 - j;
    for (int i = 0; i <= g.half; ++i) s += j == mj ? row(i, j) : row(i, j) + row(i, mj);
  }
  return s;
}

// M = I + tau (-Lap_h + diag(w)), restricted to the nodes flagged in `free`.
// Entries of x outside `free` are treated as 0 and y is 0 there.
struct StepOperator {
  const Grid& g;
  double tau;
  const std::vector<double>& w;
  const NodeMask& free;

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const double inv_h2 = 1.0 / (g.h * g.h);
    const std::size_t n = static_cast<std::size_t>(g.n);
    std::fill(y.begin(), y.end(), 0.0);
    for (int j = 1; j < g.n - 1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * n;
      for (int i = 1; i < g.n - 1; ++i) {
        const std::size_t k = row + static_cast<std::size_t>(i);
        if (!free[k]) continue;
        const auto at = [&](std::size_t q) { return free[q] ? x[q] : 0.0; };
        const double lap = ((at(k + 1) + at(k - 1)) + (at(k + n) + at(k - n)) - 4.0 * x[k]) * inv_h2;
        y[k] = x[k] + tau * (w[k] * x[k] - lap);
      }
    }
  }

  // Full operator on every interior node, no masking.
  void apply_all(const std::vector<double>& x, std::vector<double>& y) const {
    const double inv_h2 = 1.0 / (g.h * g.h);
    const std::size_t n = static_cast<std::size_t>(g.n);
    std::fill(y.begin(), y.end(), 0.0);
    for (int j = 1; j < g.n - 1; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * n;
      for (int i = 1; i < g.n - 1; ++i) {
        const std::size_t k = row + static_cast<std::size_t>(i);
        const double lap = ((x[k + 1] + x[k - 1]) + (x[k + n] + x[k - n]) - 4.0 * x[k]) * inv_h2;
        y[k] = x[k] + tau * (w[k] * x[k] - lap);
      }
    }
  }
};

// CG on the free block, warm-started from x. Restarts from the true residual
// so the exit test is not fooled by recurrence drift.
int solve_free_block(const StepOperator& op, const std::vector<double>& rhs, std::vector<double>& x,
                     double tol, long cap, int& total_iters, double& rel_residual) {
  const std::size_t size = rhs.size();
  std::vector<double> r(size, 0.0), p(size, 0.0), ap(size, 0.0);
  const double b_norm = std::sqrt(dot(op.g, rhs, rhs));
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rel_residual = 0.0;
    return 0;
  }
  const double target = tol * b_norm;
  int iters = 0;
  double residual = 0.0;
  for (int restart = 0; restart < 8; ++restart) {
    op.apply(x, ap);
    for (std::size_t k = 0; k < size; ++k) r[k] = op.free[k] ? rhs[k] - ap[k] : 0.0;
    double rr = dot(op.g, r, r);
    residual = std::sqrt(rr);
    if (residual <= target) break;
    p = r;
    while (std::sqrt(rr) > target) {
      if (total_iters + iters >= cap) {
        throw ConvergenceError("descent_step: conjugate gradient hit the iteration cap", std::sqrt(rr) / b_norm,
                               total_iters + iters);
      }
      op.apply(p, ap);
      const double pap = dot(op.g, p, ap);
      if (!(pap > 0.0)) {
        throw ConvergenceError("descent_step: conjugate gradient breakdown", std::sqrt(rr) / b_norm,
                               total_iters + iters);
      }
      const double step = rr / pap;
      for (std::size_t k = 0; k < size; ++k) {
        x[k] += step * p[k];
        r[k] -= step * ap[k];
      }
      const double rr_next = dot(op.g, r, r);
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t k = 0; k < size; ++k) p[k] = r[k] + beta * p[k];
      ++iters;
    }
  }
  total_iters += iters;
  rel_residual = residual / b_norm;
  if (residual > target) {
    throw ConvergenceError("descent_step: residual stagnated above linear_tol", rel_residual, total_iters);
  }
  return iters;
}

}  // namespace

StepResult descent_step(const ScalarField& u, std::span<const double> potential, const SolverConfig& cfg,
                        const ScalarField* lower, const ScalarField* upper) {
  cfg.validate();
  const Grid& g = u.grid;
  if (potential.size() != g.size()) throw DomainError("descent_step: potential size does not match grid");
  if ((lower != nullptr && !(lower->grid == g)) || (upper != nullptr && !(upper->grid == g))) {
    throw DomainError("descent_step: bound fields live on a different grid");
  }

  const std::size_t size = g.size();
  std::vector<double> w(size, 0.0), f(size, 0.0), lo(size, 0.0), hi(size, 0.0);
  NodeMask interior(size, 0);
  for (int j = 1; j < g.n - 1; ++j) {
    for (int i = 1; i < g.n - 1; ++i) {
      const std::size_t k = g.index(i, j);
      interior[k] = 1;
      // Positive part implicit, negative part explicit.
      w[k] = std::max(potential[k], 0.0);
      f[k] = u.values[k] * (1.0 + cfg.tau * std::max(-potential[k], 0.0));
      lo[k] = lower != nullptr ? std::max(lower->values[k], 0.0) : 0.0;
      hi[k] = upper != nullptr ? std::min(upper->values[k], 1.0) : 1.0;
      if (lo[k] > hi[k]) {
        throw BoundOrderError("descent_step: lower > upper at node (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
    }
  }

  // Primal-dual active set on the box [lo, hi]. M is an M-matrix, so the
  // iteration terminates once the active sets repeat.
  NodeMask free = interior;
  const StepOperator op{g, cfg.tau, w, free};
  const double c = 1.0 / (1.0 + cfg.tau * 4.0 / (g.h * g.h));
  const long cap = 10L * g.n * g.n;
  std::vector<double> v(size, 0.0), mu(size, 0.0), mv(size, 0.0), rhs(size, 0.0), fixed(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) v[k] = interior[k] ? std::clamp(u.values[k], lo[k], hi[k]) : 0.0;
  op.apply_all(v, mv);
  for (std::size_t k = 0; k < size; ++k) mu[k] = interior[k] ? f[k] - mv[k] : 0.0;

  StepResult result{ScalarField::zeros(g), 0, 0.0, 0};
  std::vector<std::int8_t> state(size, 0), prev(size, 2);
  for (int sweep = 0;; ++sweep) {
    if (sweep >= 200) {
      throw ConvergenceError("descent_step: active set did not settle", result.linear_residual,
                             result.linear_iters);
    }
    for (std::size_t k = 0; k < size; ++k) {
      if (!interior[k]) continue;
      const double trial = v[k] + c * mu[k];
      state[k] = trial > hi[k] ? 1 : (trial < lo[k] ? -1 : 0);
      if (hi[k] == lo[k]) state[k] = 1;
    }
    if (state == prev) break;
    prev = state;
    for (std::size_t k = 0; k < size; ++k) {
      free[k] = interior[k] && state[k] == 0;
      fixed[k] = state[k] == 1 ? hi[k] : (state[k] == -1 ? lo[k] : 0.0);
    }
    op.apply_all(fixed, mv);
    for (std::size_t k = 0; k < size; ++k) {
      rhs[k] = free[k] ? f[k] - mv[k] : 0.0;
      if (!free[k]) v[k] = 0.0;
    }
    solve_free_block(op, rhs, v, cfg.linear_tol, cap, result.linear_iters, result.linear_residual);
    for (std::size_t k = 0; k < size; ++k) {
      if (!free[k]) v[k] = fixed[k];
    }
    op.apply_all(v, mv);
    for (std::size_t k = 0; k < size; ++k) mu[k] = interior[k] && !free[k] ? f[k] - mv[k] : 0.0;
    ++result.active_set_sweeps;
  }
  result.field.values = std::move(v);
  return result;
}

StepResult descent_step(const ScalarField& u, const PotentialSpec& spec, const SolverConfig& cfg,
                        const ScalarField* lower, const ScalarField* upper) {
  const std::vector<double> potential = sample_potential(spec, u.grid);
  return descent_step(u, potential, cfg, lower, upper);
}

ScalarField project_bounds(const ScalarField& u, const ScalarField* lower, const ScalarField* upper) {
  const Grid& g = u.grid;
  if ((lower != nullptr && !(lower->grid == g)) || (upper != nullptr && !(upper->grid == g))) {
    throw DomainError("project_bounds: bound fields live on a different grid");
  }
  ScalarField out = ScalarField::zeros(g);
  for (int j = 1; j < g.n - 1; ++j) {
    for (int i = 1; i < g.n - 1; ++i) {
      const double lo = lower != nullptr ? std::max(lower->at(i, j), 0.0) : 0.0;
      const double hi = upper != nullptr ? std::min(upper->at(i, j), 1.0) : 1.0;
      if (lo > hi) {
        throw BoundOrderError("project_bounds: lower > upper at node (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
      out.at(i, j) = std::clamp(u.at(i, j), lo, hi);
    }
  }
  return out;
}

NodeMask contact_set(const ScalarField& u, double eps) {
  NodeMask mask(u.values.size(), 0);
  for (std::size_t k = 0; k < u.values.size(); ++k) mask[k] = u.values[k] >= 1.0 - eps ? 1 : 0;
  return mask;
}

std::size_t mask_count(const NodeMask& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

RunResult run_descent(const PotentialSpec& spec, const SolverConfig& cfg, const Grid& grid) {
  cfg.validate();
  RunResult run;
  run.bounds = radial_bounds_pair(2, spec.alpha, spec.beta, spec.r_tilde, spec.R);
  run.lower = sample_radial(run.bounds.lower, grid);
  run.upper = sample_radial(run.bounds.upper, grid);
  const std::vector<double> potential = sample_potential(spec, grid);

  const ScalarField* lo = cfg.use_radial_clamp ? &run.lower : nullptr;
  const ScalarField* hi = cfg.use_radial_clamp ? &run.upper : nullptr;
  const double cell = grid.h * grid.h;

  ScalarField u = project_bounds(run.upper, lo, hi);
  run.history.push_back(
      {0, discrete_energy(u, potential), 0.0, cell * static_cast<double>(mask_count(contact_set(u, cfg.contact_eps))), 0});

  for (int m = 1; m <= cfg.max_iters; ++m) {
    StepResult step = descent_step(u, potential, cfg, lo, hi);
    ScalarField next = project_bounds(step.field, lo, hi);
    double change = 0.0;
    for (std::size_t k = 0; k < next.values.size(); ++k) {
      change = std::max(change, std::abs(next.values[k] - u.values[k]));
    }
    const double scale = next.sup_norm();
    const double relative = scale > 0.0 ? change / scale : (change > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    u = std::move(next);
    run.history.push_back({m, discrete_energy(u, potential), relative,
                           cell * static_cast<double>(mask_count(contact_set(u, cfg.contact_eps))),
                           step.linear_iters});
    if (relative <= cfg.stop_tol) {
      run.converged = true;
      break;
    }
  }
  run.field = std::move(u);
  return run;
}

}  // namespace popdens
