#pragma once

// Projected semi-implicit gradient descent for
//   F(u) = sum over grid edges (u_p - u_q)^2 + h^2 sum over nodes V u^2
// on a uniform grid over [-T, T]^2 with homogeneous Dirichlet boundary.
// Each step is implicit in the gradient and in V+ = max(V, 0), explicit in
// V- = max(-V, 0), and keeps the new iterate inside the box [lower, upper]:
//   u_new = argmin_{lower <= v <= upper} |v - u|^2 / 2 + tau q(v) - tau <V- u, v>,
//   q(v) = (|grad_h v|^2 + <V+ v, v>) / 2.
// The contact set {u_new = 1} is therefore decided at the new iterate.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "popdens/potential_model.hpp"
#include "popdens/radial_solutions.hpp"

namespace popdens {

struct Grid {
  double T = 0.0;
  double h = 0.0;
  int half = 0;  ///< nodes per half-axis; node i sits at x = (i - half) h
  int n = 0;     ///< 2 * half + 1

  /// half = floor(T / h), so the grid is symmetric about the origin.
  static Grid make(double T, double h);

  double coord(int i) const { return (i - half) * h; }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n - 1 || j == n - 1; }
  Point point(int i, int j) const { return {coord(i), coord(j)}; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Node values, row-major with x varying fastest.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  static ScalarField zeros(const Grid& grid) { return {grid, std::vector<double>(grid.size(), 0.0)}; }
  static ScalarField constant(const Grid& grid, double interior_value);

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }

  /// 0 <= u <= 1 everywhere and u == 0 on the boundary.
  bool satisfies_constraints() const;
  double sup_norm() const;
};

using NodeMask = std::vector<std::uint8_t>;

struct SolverConfig {
  double tau = 0.5;
  int max_iters = 50;
  double linear_tol = 1e-10;
  double stop_tol = 1e-8;
  bool use_radial_clamp = true;
  double contact_eps = 1e-6;

  /// Throws DomainError when a field is out of range.
  void validate() const;
};

/// V sampled pointwise at every node.
std::vector<double> sample_potential(const PotentialSpec& spec, const Grid& grid);

/// eval_radial(sol, |x|) at interior nodes, 0 on the boundary.
ScalarField sample_radial(const RadialSolution& sol, const Grid& grid);

double discrete_energy(const ScalarField& u, std::span<const double> potential);
double discrete_energy(const ScalarField& u, const PotentialSpec& spec);

/// (Lap_h u) at interior node (i, j).
double discrete_laplacian(const ScalarField& u, int i, int j);

struct StepResult {
  ScalarField field;
  int linear_iters = 0;
  double linear_residual = 0.0;  ///< last free-block CG residual, relative to its rhs
  int active_set_sweeps = 0;
};

/// One step from u. Bounds default to 0 and 1; the result already lies in the
/// box, so a following project_bounds is the identity.
StepResult descent_step(const ScalarField& u, std::span<const double> potential, const SolverConfig& cfg,
                        const ScalarField* lower = nullptr, const ScalarField* upper = nullptr);
StepResult descent_step(const ScalarField& u, const PotentialSpec& spec, const SolverConfig& cfg,
                        const ScalarField* lower = nullptr, const ScalarField* upper = nullptr);

/// Clamp into [max(lower, 0), min(upper, 1)] with the boundary forced to 0.
/// Throws BoundOrderError if lower > upper at any interior node.
ScalarField project_bounds(const ScalarField& u, const ScalarField* lower = nullptr,
                           const ScalarField* upper = nullptr);

/// Nodes with u >= 1 - eps.
NodeMask contact_set(const ScalarField& u, double eps);
std::size_t mask_count(const NodeMask& mask);

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double sup_change = 0.0;  ///< ||u_m - u_{m-1}||_inf / ||u_m||_inf
  double contact_area = 0.0;
  int linear_iters = 0;
};

struct RunResult {
  ScalarField field;
  std::vector<IterationRecord> history;
  RadialBounds bounds;
  ScalarField lower;
  ScalarField upper;
  bool converged = false;  ///< stop_tol reached before max_iters
};

/// Starts from the sampled upper radial profile and alternates descent_step
/// and project_bounds.
RunResult run_descent(const PotentialSpec& spec, const SolverConfig& cfg, const Grid& grid);

}  // namespace popdens
