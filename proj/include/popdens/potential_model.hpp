#pragma once

// Piecewise-constant planar potentials V = -beta^2 on a well G, alpha^2
// elsewhere. Wells are closed: boundary points count as inside.

#include <concepts>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace popdens {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Disc {
  Point center;
  double radius = 0.0;
};

/// Axis-aligned ellipse (x - cx)^2 / semi_x^2 + (y - cy)^2 / semi_y^2 <= 1.
struct Ellipse {
  Point center;
  double semi_x = 0.0;
  double semi_y = 0.0;
};

struct Rectangle {
  Point lower;
  Point upper;
};

/// a x + b y <= c
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Intersection of half-planes; must be bounded.
struct HalfPlanePolygon {
  std::vector<HalfPlane> half_planes;
};

/// No well at all; V is alpha^2 everywhere.
struct NoWell {};

class WellShape;

/// Closure of outer \ hole.
struct Difference {
  std::shared_ptr<const WellShape> outer;
  std::shared_ptr<const WellShape> hole;
};

class WellShape {
 public:
  using Variant = std::variant<Disc, Ellipse, Rectangle, HalfPlanePolygon, Difference, NoWell>;

  WellShape() : shape_(NoWell{}) {}
  template <class Shape>
    requires std::constructible_from<Variant, Shape>
  WellShape(Shape shape) : shape_(std::move(shape)) {}  // NOLINT(google-explicit-constructor)

  static WellShape disc(Point center, double radius) { return Disc{center, radius}; }
  static WellShape ellipse(double semi_x, double semi_y) { return Ellipse{{}, semi_x, semi_y}; }
  static WellShape rectangle(Point lower, Point upper) { return Rectangle{lower, upper}; }
  static WellShape polygon(std::vector<HalfPlane> half_planes) {
    return HalfPlanePolygon{std::move(half_planes)};
  }
  static WellShape difference(WellShape outer, WellShape hole) {
    return Difference{std::make_shared<const WellShape>(std::move(outer)),
                      std::make_shared<const WellShape>(std::move(hole))};
  }

  const Variant& variant() const { return shape_; }

  /// Closed membership.
  bool contains(Point p) const;
  /// Membership in the interior.
  bool contains_interior(Point p) const;
  bool empty() const { return std::holds_alternative<NoWell>(shape_); }

  /// Points on the boundary; roughly `per_piece` samples per curve or edge.
  std::vector<Point> boundary_samples(int per_piece = 720) const;

  /// Short kind name as used by the config format.
  std::string kind() const;

 private:
  Variant shape_;
};

/// Vertices of a bounded half-plane polygon in counter-clockwise order.
std::vector<Point> polygon_vertices(const HalfPlanePolygon& polygon);

struct PotentialSpec {
  double alpha = 0.0;
  double beta = 0.0;
  WellShape shape;
  double R = 0.0;        ///< G is contained in the closed disc of radius R
  double r_tilde = 0.0;  ///< the disc of radius r_tilde is contained in G
};

/// -beta^2 inside the (closed) well, alpha^2 outside.
double potential_value(const PotentialSpec& spec, Point x);

struct Violation {
  std::string condition;  ///< "trapping", "inner_disc", "outer_disc", "shape", "parameters"
  std::string detail;
};

/// Empty iff beta^2 > lambda*(B_{r_tilde}) in d = 2 and B_{r_tilde} in G in B_R
/// (sampled on the boundaries). Violations carry a witness value or point.
std::vector<Violation> validate_spec(const PotentialSpec& spec);

/// Builds a spec from `key = value` entries. Keys: alpha, beta, r_tilde,
/// R_bound, shape.kind, and the shape-specific shape.* fields. Throws
/// ConfigError naming the offending key.
PotentialSpec potential_from_config(const std::map<std::string, std::string>& entries);

/// Inverse of potential_from_config for the keys it understands.
std::map<std::string, std::string> potential_to_config(const PotentialSpec& spec);

}  // namespace popdens
