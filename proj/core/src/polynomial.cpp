#include "loudsn/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "loudsn/errors.hpp"

namespace loudsn {

UnivariatePoly::UnivariatePoly(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  trim();
}

void UnivariatePoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double UnivariatePoly::coefficient(int k) const {
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<std::size_t>(k)];
}

double UnivariatePoly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

UnivariatePoly UnivariatePoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return UnivariatePoly(std::move(d));
}

double UnivariatePoly::derivative_bound(double r) const {
  double bound = 0.0;
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    bound += static_cast<double>(k) * std::abs(coeffs_[k]) * std::pow(r, static_cast<double>(k - 1));
  return bound;
}

UnivariatePoly UnivariatePoly::scaled_argument(double r) const {
  std::vector<double> c(coeffs_);
  double rk = 1.0;
  for (auto& ck : c) {
    ck *= rk;
    rk *= r;
  }
  return UnivariatePoly(std::move(c));
}

UnivariatePoly UnivariatePoly::operator*(double k) const {
  std::vector<double> c(coeffs_);
  for (auto& ck : c) ck *= k;
  return UnivariatePoly(std::move(c));
}

// ---------------------------------------------------------------------------

BivariatePoly::BivariatePoly(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0) throw ParameterError("BivariatePoly: negative degree cap");
}

BivariatePoly::BivariatePoly(Terms terms, int max_degree) : BivariatePoly(max_degree) {
  for (const auto& [e, c] : terms) {
    if (e.first < 0 || e.second < 0) throw ParameterError("BivariatePoly: negative exponent");
    if (e.first + e.second > max_degree_)
      throw ParameterError("BivariatePoly: monomial exceeds the degree cap");
    add_term(e.first, e.second, c);
  }
  normalize();
}

BivariatePoly BivariatePoly::constant(double c, int max_degree) {
  return BivariatePoly({{{0, 0}, c}}, max_degree);
}

void BivariatePoly::add_term(int i, int j, double c) {
  if (i + j > max_degree_) return;
  terms_[{i, j}] += c;
}

void BivariatePoly::normalize() {
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; });
}

int BivariatePoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
  return d;
}

double BivariatePoly::coefficient(int i, int j) const {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? 0.0 : it->second;
}

double BivariatePoly::operator()(double x, double y) const {
  const int n = std::max(total_degree(), 0);
  std::vector<double> xp(static_cast<std::size_t>(n) + 1, 1.0), yp(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k <= n; ++k) {
    xp[k] = xp[k - 1] * x;
    yp[k] = yp[k - 1] * y;
  }
  double acc = 0.0;
  for (const auto& [e, c] : terms_) acc += c * xp[e.first] * yp[e.second];
  return acc;
}

UnivariatePoly BivariatePoly::at_y_zero() const {
  std::vector<double> c;
  for (const auto& [e, v] : terms_) {
    if (e.second != 0) continue;
    if (c.size() <= static_cast<std::size_t>(e.first)) c.resize(static_cast<std::size_t>(e.first) + 1, 0.0);
    c[static_cast<std::size_t>(e.first)] = v;
  }
  return UnivariatePoly(std::move(c));
}

BivariatePoly BivariatePoly::shifted(int dx, int dy) const {
  BivariatePoly out(max_degree_ + dx + dy);
  for (const auto& [e, c] : terms_) out.terms_[{e.first + dx, e.second + dy}] = c;
  return out;
}

BivariatePoly BivariatePoly::scaled_arguments(double rx, double ry) const {
  BivariatePoly out(max_degree_);
  for (const auto& [e, c] : terms_)
    out.terms_[e] = c * std::pow(rx, e.first) * std::pow(ry, e.second);
  out.normalize();
  return out;
}

BivariatePoly BivariatePoly::with_max_degree(int max_degree) const {
  BivariatePoly out(max_degree);
  for (const auto& [e, c] : terms_) out.add_term(e.first, e.second, c);
  out.normalize();
  return out;
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& other) const {
  BivariatePoly out(std::max(max_degree_, other.max_degree_));
  for (const auto& [e, c] : terms_) out.add_term(e.first, e.second, c);
  for (const auto& [e, c] : other.terms_) out.add_term(e.first, e.second, c);
  out.normalize();
  return out;
}

BivariatePoly BivariatePoly::operator*(const BivariatePoly& other) const {
  BivariatePoly out(std::max(max_degree_, other.max_degree_));
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : other.terms_) out.add_term(a.first + b.first, a.second + b.second, ca * cb);
  out.normalize();
  return out;
}

BivariatePoly BivariatePoly::operator*(double k) const {
  BivariatePoly out(max_degree_);
  for (const auto& [e, c] : terms_) out.terms_[e] = c * k;
  out.normalize();
  return out;
}

// ---------------------------------------------------------------------------

WeierstrassSplit weierstrass_split(const BivariatePoly& U) {
  WeierstrassSplit split{U.at_y_zero(), BivariatePoly(U.max_degree())};
  BivariatePoly::Terms hat;
  for (const auto& [e, c] : U.terms())
    if (e.second >= 1) hat[{e.first + 1, e.second - 1}] = c;
  split.Uhat = BivariatePoly(std::move(hat), U.max_degree());
  return split;
}

bool weierstrass_reconstructs(const BivariatePoly& U, const WeierstrassSplit& split) {
  const BivariatePoly lhs = U.shifted(1, 0);
  BivariatePoly::Terms rhs;
  const auto& u0 = split.U0.coefficients();
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (u0[i] != 0.0) rhs[{static_cast<int>(i) + 1, 0}] += u0[i];
  for (const auto& [e, c] : split.Uhat.terms()) {
    auto& slot = rhs[{e.first, e.second + 1}];
    if (slot != 0.0) return false;  // the two parts must not overlap
    slot = c;
  }
  return lhs.terms() == rhs;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const UnivariatePoly& p) {
  j = nlohmann::json{{"terms", nlohmann::json::array()}};
  const auto& c = p.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) j["terms"].push_back({{"i", i}, {"j", 0}, {"c", c[i]}});
}

void from_json(const nlohmann::json& j, UnivariatePoly& p) {
  std::vector<double> c;
  for (const auto& t : j.at("terms")) {
    const int i = t.at("i").get<int>();
    if (i < 0 || t.value("j", 0) != 0) throw ParameterError("univariate polynomial: bad exponent");
    if (c.size() <= static_cast<std::size_t>(i)) c.resize(static_cast<std::size_t>(i) + 1, 0.0);
    c[static_cast<std::size_t>(i)] += t.at("c").get<double>();
  }
  p = UnivariatePoly(std::move(c));
}

void to_json(nlohmann::json& j, const BivariatePoly& p) {
  j = nlohmann::json{{"max_degree", p.max_degree()}, {"terms", nlohmann::json::array()}};
  for (const auto& [e, c] : p.terms()) j["terms"].push_back({{"i", e.first}, {"j", e.second}, {"c", c}});
}

void from_json(const nlohmann::json& j, BivariatePoly& p) {
  BivariatePoly::Terms terms;
  int degree = 0;
  for (const auto& t : j.at("terms")) {
    const int i = t.at("i").get<int>(), k = t.at("j").get<int>();
    terms[{i, k}] += t.at("c").get<double>();
    degree = std::max(degree, i + k);
  }
  p = BivariatePoly(std::move(terms), j.value("max_degree", degree));
}

}  // namespace loudsn
