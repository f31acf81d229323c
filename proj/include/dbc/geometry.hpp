#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dbc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Distance from `p` to the closed segment [a, b].
double distance_to_segment(Point p, Point a, Point b);

/// A simple polygon with counterclockwise vertices. Edge j runs from vertex j
/// to vertex j+1 (cyclically).
class PolygonalDomain {
 public:
  /// Validates the polygon: at least three distinct vertices, no
  /// self-intersections, counterclockwise orientation. Throws InvalidInput.
  static PolygonalDomain from_vertices(std::string name, std::vector<Point> vertices);

  const std::string& name() const { return name_; }
  std::span<const Point> vertices() const { return vertices_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  Point vertex(std::size_t j) const { return vertices_[j]; }

  /// Interior angle at each vertex, in (0, 2pi).
  std::span<const double> corner_angles() const { return angles_; }
  /// pi / omega_j per vertex.
  std::vector<double> singular_exponents() const;
  double omega_max() const;
  /// pi / omega_max, the smallest singular exponent.
  double lambda_bar() const;

  double area() const;
  double perimeter() const;
  double diameter() const;

  /// Outward unit normal of edge j.
  Point edge_normal(std::size_t j) const;
  double distance_to_boundary(Point p) const;
  /// Index of the vertex within `tol` of `p`, if any.
  std::optional<std::size_t> corner_at(Point p, double tol = 1e-12) const;
  /// Index of the polygon edge closest to `p`.
  std::size_t nearest_edge(Point p) const;

 private:
  PolygonalDomain(std::string name, std::vector<Point> vertices);

  std::string name_;
  std::vector<Point> vertices_;
  std::vector<double> angles_;
};

/// omega90 = (0,1)^2, omega135 = (-1,1)^2 cut to the sector 0 < phi < 3pi/4,
/// omega270 = (-1,1)^2 \ [0,1]^2. Throws InvalidInput for other names.
PolygonalDomain builtin_domain(std::string_view name);
std::vector<std::string> builtin_domain_names();

}  // namespace dbc
