#include "dbc/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "dbc/error.hpp"

namespace dbc {

namespace {

constexpr double kPi = std::numbers::pi;

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({norm(b - a), norm(c - a), 1.0});
  if (std::abs(v) <= 1e-14 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) - 1e-14 <= p.x && p.x <= std::max(a.x, b.x) + 1e-14 &&
         std::min(a.y, b.y) - 1e-14 <= p.y && p.y <= std::max(a.y, b.y) + 1e-14;
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

double signed_area(std::span<const Point> v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

}  // namespace

double distance_to_segment(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return norm(p - (a + t * d));
}

PolygonalDomain::PolygonalDomain(std::string name, std::vector<Point> vertices)
    : name_(std::move(name)), vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  angles_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Point v = vertices_[j];
    const Point to_next = vertices_[(j + 1) % n] - v;
    const Point to_prev = vertices_[(j + n - 1) % n] - v;
    double angle = std::atan2(cross(to_next, to_prev), dot(to_next, to_prev));
    if (angle <= 0.0) angle += 2.0 * kPi;
    angles_[j] = angle;
  }
}

PolygonalDomain PolygonalDomain::from_vertices(std::string name, std::vector<Point> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw InvalidInput("polygon '" + name + "' needs at least 3 vertices");
  for (const Point& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("polygon '" + name + "' has non-finite vertex");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norm(vertices[i] - vertices[j]) < 1e-12) {
        throw InvalidInput("polygon '" + name + "' has repeated vertex " + std::to_string(j));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
        throw InvalidInput("polygon '" + name + "' is not simple: edges " + std::to_string(i) + " and " +
                           std::to_string(j) + " intersect");
      }
    }
  }
  const double area = signed_area(vertices);
  if (area <= 0.0) throw InvalidInput("polygon '" + name + "' must be counterclockwise with positive area");

  PolygonalDomain domain(std::move(name), std::move(vertices));
  for (std::size_t j = 0; j < n; ++j) {
    const double w = domain.angles_[j];
    if (!(w > 1e-12 && w < 2.0 * kPi - 1e-12)) {
      throw InvalidInput("polygon '" + domain.name_ + "' folds back on itself at vertex " + std::to_string(j));
    }
  }
  return domain;
}

std::vector<double> PolygonalDomain::singular_exponents() const {
  std::vector<double> out(angles_.size());
  std::transform(angles_.begin(), angles_.end(), out.begin(), [](double w) { return kPi / w; });
  return out;
}

double PolygonalDomain::omega_max() const { return *std::max_element(angles_.begin(), angles_.end()); }

double PolygonalDomain::lambda_bar() const { return kPi / omega_max(); }

double PolygonalDomain::area() const { return signed_area(vertices_); }

double PolygonalDomain::perimeter() const {
  double p = 0.0;
  for (std::size_t j = 0; j < vertices_.size(); ++j) p += norm(vertices_[(j + 1) % vertices_.size()] - vertices_[j]);
  return p;
}

double PolygonalDomain::diameter() const {
  double d = 0.0;
  for (const Point& a : vertices_) {
    for (const Point& b : vertices_) d = std::max(d, norm(a - b));
  }
  return d;
}

Point PolygonalDomain::edge_normal(std::size_t j) const {
  const Point d = vertices_[(j + 1) % vertices_.size()] - vertices_[j];
  const double len = norm(d);
  return {d.y / len, -d.x / len};
}

double PolygonalDomain::distance_to_boundary(Point p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < vertices_.size(); ++j) {
    best = std::min(best, distance_to_segment(p, vertices_[j], vertices_[(j + 1) % vertices_.size()]));
  }
  return best;
}

std::optional<std::size_t> PolygonalDomain::corner_at(Point p, double tol) const {
  for (std::size_t j = 0; j < vertices_.size(); ++j) {
    if (std::abs(p.x - vertices_[j].x) <= tol && std::abs(p.y - vertices_[j].y) <= tol) return j;
  }
  return std::nullopt;
}

std::size_t PolygonalDomain::nearest_edge(Point p) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < vertices_.size(); ++j) {
    const double d = distance_to_segment(p, vertices_[j], vertices_[(j + 1) % vertices_.size()]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

PolygonalDomain builtin_domain(std::string_view name) {
  if (name == "omega90") {
    return PolygonalDomain::from_vertices("omega90", {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  }
  if (name == "omega135") {
    // The ray phi = 3pi/4 leaves (-1,1)^2 through the corner (-1,1).
    return PolygonalDomain::from_vertices("omega135", {{0, 0}, {1, 0}, {1, 1}, {-1, 1}});
  }
  if (name == "omega270") {
    return PolygonalDomain::from_vertices("omega270", {{0, 0}, {0, 1}, {-1, 1}, {-1, -1}, {1, -1}, {1, 0}});
  }
  throw InvalidInput("unknown domain '" + std::string(name) + "' (expected omega90, omega135 or omega270)");
}

std::vector<std::string> builtin_domain_names() { return {"omega90", "omega135", "omega270"}; }

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_input:
      return "invalid_input";
    case ErrorCategory::solver_failure:
      return "solver_failure";
    case ErrorCategory::config_error:
      return "config_error";
    case ErrorCategory::io_error:
      return "io_error";
  }
  return "unknown";
}

}  // namespace dbc
