#pragma once

#include <map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace loudsn {

// Dense univariate polynomial, constant term first.
class UnivariatePoly {
 public:
  UnivariatePoly() = default;
  explicit UnivariatePoly(std::vector<double> coefficients);
  static UnivariatePoly constant(double c) { return UnivariatePoly({c}); }

  const std::vector<double>& coefficients() const { return coeffs_; }
  double coefficient(int k) const;
  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  double operator()(double x) const;
  UnivariatePoly derivative() const;
  // Sum of |k c_k| r^(k-1); bounds |p'(x)| on [-r, r].
  double derivative_bound(double r) const;
  UnivariatePoly scaled_argument(double r) const;  // x -> p(r x)
  UnivariatePoly operator*(double k) const;

  friend bool operator==(const UnivariatePoly&, const UnivariatePoly&) = default;

 private:
  void trim();
  std::vector<double> coeffs_;
};

// Sparse bivariate polynomial sum c_ij x^i y^j with a total-degree cap.
// Exact zeros are never stored; products are truncated at max_degree.
class BivariatePoly {
 public:
  using Exponent = std::pair<int, int>;
  using Terms = std::map<Exponent, double>;

  explicit BivariatePoly(int max_degree = 0);
  BivariatePoly(Terms terms, int max_degree);
  static BivariatePoly constant(double c, int max_degree = 0);

  const Terms& terms() const { return terms_; }
  int max_degree() const { return max_degree_; }
  // Highest total degree actually present, -1 when zero.
  int total_degree() const;
  double coefficient(int i, int j) const;
  bool is_zero() const { return terms_.empty(); }

  double operator()(double x, double y) const;
  // P(x, 0).
  UnivariatePoly at_y_zero() const;
  // x^dx y^dy P; raises max_degree by dx + dy.
  BivariatePoly shifted(int dx, int dy) const;
  BivariatePoly scaled_arguments(double rx, double ry) const;  // (x,y) -> P(rx x, ry y)
  BivariatePoly with_max_degree(int max_degree) const;

  BivariatePoly operator+(const BivariatePoly& other) const;
  BivariatePoly operator*(const BivariatePoly& other) const;
  BivariatePoly operator*(double k) const;

  friend bool operator==(const BivariatePoly&, const BivariatePoly&) = default;

 private:
  void add_term(int i, int j, double c);
  void normalize();
  Terms terms_;
  int max_degree_ = 0;
};

// Split x U(x,y) = x U0(x) + y Uhat(x,y) with U0(x) = U(x,0).
// Every monomial of x U with a positive y-exponent moves to Uhat with that
// exponent decremented, so the identity holds coefficient by coefficient.
struct WeierstrassSplit {
  UnivariatePoly U0;
  BivariatePoly Uhat;
};

WeierstrassSplit weierstrass_split(const BivariatePoly& U);

// Both sides of x U = x U0 + y Uhat as coefficient maps; equal iff the split is exact.
bool weierstrass_reconstructs(const BivariatePoly& U, const WeierstrassSplit& split);

void to_json(nlohmann::json& j, const UnivariatePoly& p);
void from_json(const nlohmann::json& j, UnivariatePoly& p);
void to_json(nlohmann::json& j, const BivariatePoly& p);
void from_json(const nlohmann::json& j, BivariatePoly& p);

}  // namespace loudsn
