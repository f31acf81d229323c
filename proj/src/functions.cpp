#include "dbc/functions.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string_view>

#include "dbc/error.hpp"

namespace dbc {

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term(0, 0, c);
  return p;
}

Polynomial Polynomial::x() {
  Polynomial p;
  p.add_term(1, 0, 1.0);
  return p;
}

Polynomial Polynomial::y() {
  Polynomial p;
  p.add_term(0, 1, 1.0);
  return p;
}

void Polynomial::add_term(int i, int j, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(std::make_pair(i, j), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(Point p) const {
  double s = 0.0;
  for (const auto& [ij, c] : terms_) s += c * std::pow(p.x, ij.first) * std::pow(p.y, ij.second);
  return s;
}

Polynomial Polynomial::derivative_x() const {
  Polynomial d;
  for (const auto& [ij, c] : terms_) {
    if (ij.first > 0) d.add_term(ij.first - 1, ij.second, c * ij.first);
  }
  return d;
}

Polynomial Polynomial::derivative_y() const {
  Polynomial d;
  for (const auto& [ij, c] : terms_) {
    if (ij.second > 0) d.add_term(ij.first, ij.second - 1, c * ij.second);
  }
  return d;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [ij, c] : terms_) d = std::max(d, ij.first + ij.second);
  return d;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial r = a;
  for (const auto& [ij, c] : b.terms_) r.add_term(ij.first, ij.second, c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r;
  for (const auto& [ij, c] : terms_) r.add_term(ij.first, ij.second, -c);
  return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (const auto& [ij, c] : a.terms_) {
    for (const auto& [kl, d] : b.terms_) r.add_term(ij.first + kl.first, ij.second + kl.second, c * d);
  }
  return r;
}

Polynomial Polynomial::pow(int exponent) const {
  Polynomial r = constant(1.0);
  for (int k = 0; k < exponent; ++k) r = r * *this;
  return r;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Polynomial parse() {
    Polynomial p = expression();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + std::string(text_) + "\", column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expression() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    for (;;) {
      if (accept('*')) {
        p = p * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        const Polynomial d = unary();
        if (d.degree() != 0) {
          pos_ = at;
          fail("division by a non-constant");
        }
        const double c = d(Point{0.0, 0.0});
        if (c == 0.0) {
          pos_ = at;
          fail("division by zero");
        }
        p = p * Polynomial::constant(1.0 / c);
      } else {
        return p;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("exponent must be a non-negative integer");
      const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (e > 32) fail("exponent too large");
      return base.pow(e);
    }
    return base;
  }

  Polynomial primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expression();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == 'x') {
      ++pos_;
      return Polynomial::x();
    }
    if (c == 'y') {
      ++pos_;
      return Polynomial::y();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text_.substr(pos_));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return Polynomial::constant(v);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text) { return Parser(text).parse(); }

AnalyticFunction singular_2_3() {
  constexpr double a = 2.0 / 3.0;
  auto angle = [](Point p) {
    double t = std::atan2(p.y, p.x) - std::numbers::pi / 2.0;
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    return t;
  };
  AnalyticFunction f;
  f.value = [angle](Point p) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return 0.0;
    return std::pow(r, a) * std::sin(a * angle(p));
  };
  f.gradient = [angle](Point p) {
    const double r = std::hypot(p.x, p.y);
    if (r == 0.0) return Point{0.0, 0.0};
    const double t = angle(p);
    const double dr = a * std::pow(r, a - 1.0) * std::sin(a * t);
    const double dt = a * std::pow(r, a - 1.0) * std::cos(a * t);
    const double c = p.x / r;
    const double s = p.y / r;
    return Point{dr * c - dt * s, dr * s + dt * c};
  };
  return f;
}

std::vector<std::string> builtin_function_names() { return {"singular_2_3"}; }

AnalyticFunction make_function(const std::string& spec) {
  if (spec == "singular_2_3") return singular_2_3();
  const Polynomial p = parse_polynomial(spec);
  const Polynomial px = p.derivative_x();
  const Polynomial py = p.derivative_y();
  AnalyticFunction f;
  f.value = [p](Point q) { return p(q); };
  f.gradient = [px, py](Point q) { return Point{px(q), py(q)}; };
  return f;
}

EdgeFunction normal_derivative_of(const AnalyticFunction& v, const PolygonalDomain& domain) {
  if (!v.has_gradient()) throw InvalidInput("normal derivative needs an analytic gradient");
  std::vector<Point> normals;
  for (std::size_t j = 0; j < domain.vertices().size(); ++j) normals.push_back(domain.edge_normal(j));
  return [grad = v.gradient, normals](Point p, int tag) {
    if (tag < 0 || static_cast<std::size_t>(tag) >= normals.size()) throw InvalidInput("edge tag out of range");
    return dot(grad(p), normals[static_cast<std::size_t>(tag)]);
  };
}

}  // namespace dbc
