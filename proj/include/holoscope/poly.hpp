#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "sphere.hpp"

namespace holoscope {

/// Dense univariate polynomial with complex coefficients in ascending order.
/// Trailing exact zeros are stripped; the zero polynomial has no coefficients.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Cx> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<Cx> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(Cx a) { return Poly({a}); }
  static Poly monomial(int k, Cx a = 1.0) {
    std::vector<Cx> c(static_cast<std::size_t>(k) + 1, Cx{});
    c.back() = a;
    return Poly(std::move(c));
  }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  std::span<const Cx> coeffs() const { return c_; }
  Cx operator[](int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)] : Cx{};
  }
  Cx leading() const { return c_.empty() ? Cx{} : c_.back(); }

  Cx operator()(Cx z) const {
    Cx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Value and first derivative by a single Horner pass.
  std::pair<Cx, Cx> eval_with_derivative(Cx z) const {
    Cx p{}, dp{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      dp = dp * z + p;
      p = p * z + *it;
    }
    return {p, dp};
  }

  /// Sum of |a_k| |z|^k; the natural scale for backward-error tests.
  double abs_eval(double r) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const Cx& a : c_) m = std::max(m, std::abs(a));
    return m;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Cx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Poly(std::move(d));
  }

  /// Coefficients of z^n P(1/z) for n >= degree.
  Poly reversed(int n) const {
    std::vector<Cx> r(static_cast<std::size_t>(n) + 1, Cx{});
    for (int k = 0; k <= degree(); ++k) r[static_cast<std::size_t>(n - k)] = c_[static_cast<std::size_t>(k)];
    return Poly(std::move(r));
  }

  /// Taylor coefficients at p: P(p + h) = sum b_k h^k.
  Poly shifted(Cx p) const {
    std::vector<Cx> b = c_;
    const int n = degree();
    for (int i = 0; i < n; ++i)
      for (int k = n - 1; k >= i; --k) b[static_cast<std::size_t>(k)] += p * b[static_cast<std::size_t>(k) + 1];
    return Poly(std::move(b));
  }

  bool all_finite() const {
    return std::all_of(c_.begin(), c_.end(),
                       [](const Cx& a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); });
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Cx{});
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Cx{});
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  Poly& operator*=(Cx s) {
    for (Cx& a : c_) a *= s;
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, Cx s) { return a *= s; }
  friend Poly operator*(Cx s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Cx> r(a.c_.size() + b.c_.size() - 1, Cx{});
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == Cx{}) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(r));
  }
  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == Cx{}) c_.pop_back();
  }

  std::vector<Cx> c_;
};

/// The polynomial z.
inline Poly identity_poly() { return Poly({Cx{0.0}, Cx{1.0}}); }

}  // namespace holoscope
