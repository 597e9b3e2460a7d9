#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace robinrec {

struct Point {
  double x = 0.0;
  double y = 0.0;

  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point& o) const { return x * o.x + y * o.y; }
  double cross(const Point& o) const { return x * o.y - y * o.x; }
  double norm() const;
};

inline Point operator*(double s, const Point& p) { return p * s; }

/// Shapes used as interior boundaries, plus the circle used for Sigma and
/// for initial guesses. Smooth kinds map t in [0, 2pi) to the plane;
/// LShape is a fixed 6-vertex polygon.
enum class ShapeKind { Circle, Kite, Ribbon, Peanut, LShape };

ShapeKind shape_kind_from_string(const std::string& name);
std::string to_string(ShapeKind kind);

struct ParametricBoundary {
  ShapeKind kind = ShapeKind::Circle;
  Point center{0.0, 0.0};
  double radius = 1.0;

  static ParametricBoundary circle(Point center, double radius);
  static ParametricBoundary shape(ShapeKind kind);

  /// Point at parameter t (smooth kinds only; throws for LShape).
  Point at(double t) const;
};

/// The fixed L-shape corner set: boundary of (-0.55,0.55)^2 \ [0,0.55]^2.
std::vector<Point> lshape_vertices();

/// True when no two non-adjacent edges of the closed loop cross; the
/// cheap guard behind Polyline validation, exposed for step-acceptance
/// tests that must not throw.
bool is_simple_loop(const std::vector<Point>& vertices);

/// Closed, counterclockwise, simple polygonal curve.
class Polyline {
 public:
  Polyline() = default;

  /// Validates orientation (CCW), non-degenerate edges, and simplicity.
  /// Throws std::invalid_argument on violation.
  static Polyline from_vertices(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return verts_; }
  std::size_t size() const { return verts_.size(); }
  const Point& operator[](std::size_t i) const { return verts_[i]; }

  double signed_area() const;
  double perimeter() const;
  double diameter() const;

  double edge_length(std::size_t i) const;  // edge i -> i+1 (mod n)

  /// True if p is strictly inside the enclosed region (crossing count).
  bool contains(const Point& p) const;

  /// Minimum distance from p to the curve (point-to-segment scan).
  double distance_to(const Point& p) const;

  /// Resample to exactly n vertices, equispaced in arc length. Vertices
  /// whose interior turning angle exceeds corner_angle (radians) are kept
  /// exactly; remaining points are distributed per edge chain.
  Polyline resampled(std::size_t n, double corner_angle = 0.35) const;

  /// Resample with vertex spacing close to h.
  Polyline resampled_by_spacing(double h, double corner_angle = 0.35) const;

  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;
  static Polyline read_csv(std::istream& in);
  static Polyline read_csv_file(const std::string& path);

 private:
  std::vector<Point> verts_;
};

enum class BoundarySide { InnerBoundary, OuterBoundary };

/// Discrete differential geometry of a closed curve. The normal is
/// oriented outward from the annulus: on the inner boundary it points
/// into the inclusion, on the outer boundary away from the annulus.
/// Curvature is the turning-angle curvature of the CCW curve (positive
/// on a convex CCW circle, 1/r); it does not depend on side.
struct CurveFrame {
  std::vector<Point> tangent;
  std::vector<Point> normal;
  std::vector<double> curvature;
  std::vector<double> arc_weight;  // half the sum of adjacent edge lengths
  std::vector<std::size_t> corner_indices;  // vertices with large turning angle
};

Polyline sample_boundary(const ParametricBoundary& boundary, std::size_t n);

CurveFrame curve_frame(const Polyline& curve, BoundarySide side);

/// Central-difference derivative with respect to arc length on the
/// closed curve; one value per vertex.
std::vector<double> arc_derivative(const std::vector<double>& values,
                                   const Polyline& curve);

/// Symmetric Hausdorff distance between two closed curves, computed from
/// dense resamplings (>= 4x vertex count) against the segments of the
/// other curve.
double hausdorff_distance(const Polyline& a, const Polyline& b);

}  // namespace robinrec
