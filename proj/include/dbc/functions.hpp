#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dbc/fem.hpp"

namespace dbc {

/// Bivariate polynomial sum c_ij x^i y^j.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial x();
  static Polynomial y();

  double operator()(Point p) const;
  Polynomial derivative_x() const;
  Polynomial derivative_y() const;
  int degree() const;
  const std::map<std::pair<int, int>, double>& terms() const { return terms_; }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const;
  Polynomial pow(int exponent) const;

 private:
  void add_term(int i, int j, double c);
  std::map<std::pair<int, int>, double> terms_;
};

/// Parses a polynomial in x and y: numbers, + - * /, ^ with non-negative
/// integer exponents, parentheses. Division only by constants.
/// Throws ConfigError with the column of the offending token.
Polynomial parse_polynomial(const std::string& text);

/// r^(2/3) sin(2 theta / 3) around the origin, theta measured
/// counterclockwise from the positive y axis; vanishes on the two edges of
/// the reentrant corner of omega270. Harmonic.
AnalyticFunction singular_2_3();

/// Named builtins that are not polynomials.
std::vector<std::string> builtin_function_names();

/// Builtin name or polynomial expression, with exact gradient.
AnalyticFunction make_function(const std::string& spec);

/// grad v . n on the polygon edge `tag`; needs v.gradient.
EdgeFunction normal_derivative_of(const AnalyticFunction& v, const PolygonalDomain& domain);

}  // namespace dbc
