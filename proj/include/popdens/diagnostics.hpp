#pragma once

// Checks of the structure theory on a grid field: two-sided Lewy-Stampacchia
// residual, distance-to-contact bounds, exponential decay rate, the energy /
// contact-area identity, positivity and a quasiconcavity probe.

#include <cstdint>
#include <optional>

#include "popdens/descent_solver.hpp"
#include "popdens/potential_model.hpp"

namespace popdens {

struct LewyStampacchiaResult {
  double lower = 0.0;  ///< max(0, -min r)
  double upper = 0.0;  ///< max(0, r off contact, r - V- on contact)
  std::size_t nodes_checked = 0;

  bool passes(double tol_scale, double h) const { return lower <= tol_scale * h && upper <= tol_scale * h; }
};

/// r = Lap_h u - V u at interior nodes, skipping nodes within 2h of the
/// contact boundary and nodes whose 5-point stencil sees two values of V.
LewyStampacchiaResult lewy_stampacchia_check(const ScalarField& u, const PotentialSpec& spec,
                                             double contact_eps = 1e-6);

/// Constants of the "1 - u" bounds: 1 - u <= C1 d^2 and |grad u| <= C2 d.
struct DistanceConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};
DistanceConstants distance_constants(int d, const PotentialSpec& spec);

struct DistanceBoundResult {
  double ratio = 0.0;           ///< max (1 - u) / (C1 d^2 + h^2), interior nodes
  double gradient_ratio = 0.0;  ///< max |grad_h u| / (C2 d), nodes with d > 0
  DistanceConstants constants;
};

/// Exact Euclidean distance to the contact mask. Throws DiagnosticsError if
/// the mask is empty.
DistanceBoundResult distance_bound_check(const ScalarField& u, const PotentialSpec& spec, double contact_eps = 1e-6);

/// Euclidean distance from every node to the nearest masked node.
std::vector<double> distance_to_mask(const Grid& grid, const NodeMask& mask);

struct DecayFit {
  double slope = 0.0;  ///< fitted rate, expected close to alpha
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least squares of log u + (d-1)/2 log r against -r over r_in <= |x| <= r_out.
/// DomainError unless 0 <= r_in < r_out < T - 2h; DiagnosticsError on u <= 0
/// in the annulus or fewer than three samples.
DecayFit decay_fit(const ScalarField& u, double r_in, double r_out, int d = 2);

/// |E_h(u) - h^2 sum_{contact} V| / max(|E_h(u)|, 1).
double energy_contact_identity(const ScalarField& u, const PotentialSpec& spec, double contact_eps = 1e-6);

/// min over sampled segments of u(t x + (1-t) y) - min(u(x), u(y)),
/// t in {0.1, ..., 0.9}, bilinear interpolation, interior node pairs.
double quasiconcavity_probe(const ScalarField& u, int n_pairs, std::uint64_t seed);

/// Bilinear interpolation at an arbitrary point of the grid square.
double interpolate(const ScalarField& u, Point p);

/// min of u over nodes at least two cells away from the grid boundary.
double positivity_check(const ScalarField& u);

/// Area of the contact mask; true iff every contact node lies in the closed well.
double contact_area(const ScalarField& u, double contact_eps);
bool contact_in_well(const ScalarField& u, const PotentialSpec& spec, double contact_eps);

struct DiagnosticsOptions {
  double contact_eps = 1e-6;
  int quasi_pairs = 10000;
  std::uint64_t seed = 42;
  std::optional<double> decay_r_in;   ///< default min(2 R, 0.6 T)
  std::optional<double> decay_r_out;  ///< default min(4 R, 0.9 T, T - 3h)
  double ls_tol_scale = 10.0;
  double decay_rel_tol = 0.2;
  double identity_tol = 0.1;
};

struct DiagnosticsReport {
  double energy = 0.0;
  double energy_contact_identity_gap = 0.0;
  double lewy_stampacchia_lower = 0.0;
  double lewy_stampacchia_upper = 0.0;
  double distance_bound_max_ratio = 0.0;
  double distance_gradient_max_ratio = 0.0;
  double decay_fit_slope = 0.0;
  double decay_fit_r2 = 0.0;
  double decay_r_in = 0.0;
  double decay_r_out = 0.0;
  double contact_area = 0.0;
  double contact_area_h2 = 0.0;  ///< same with eps = h^2
  bool contact_in_well = false;
  double quasiconcavity_min_gap = 0.0;
  double positivity_min = 0.0;

  bool lewy_stampacchia_pass = false;
  bool distance_bound_pass = false;
  bool decay_pass = false;
  bool positivity_pass = false;
  bool identity_pass = false;

  /// Contracts asserted by `check`. The identity gap is O(h) and only
  /// reported; the quasiconcavity value is never asserted.
  bool all_pass() const {
    return lewy_stampacchia_pass && distance_bound_pass && decay_pass && positivity_pass && contact_in_well;
  }
};

/// Runs every check. Throws DiagnosticsError when a check cannot be evaluated
/// (empty contact set, nonpositive tail).
DiagnosticsReport build_report(const ScalarField& u, const PotentialSpec& spec, const DiagnosticsOptions& opts = {});

}  // namespace popdens
