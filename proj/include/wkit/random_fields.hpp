#pragma once

#include <map>
#include <random>
#include <vector>

#include "wkit/jet.hpp"

namespace wkit {

/// Dense polynomial with exact evaluation and exact partial derivatives.
class Polynomial {
 public:
  Polynomial(int dimension, std::map<std::vector<int>, double> coefficients);

  /// Coefficients uniform in [-1, 1] over all monomials of degree <= max_degree.
  static Polynomial random(int dimension, int max_degree, std::mt19937_64& rng,
                           double scale = 1.0);

  int dimension() const { return dimension_; }
  int degree() const;
  double operator()(const Vec& x) const;
  double partial(const Vec& x, const MultiIndex& alpha) const;
  ScalarField as_field() const;

  Polynomial scaled(double factor) const;

 private:
  int dimension_ = 0;
  std::map<std::vector<int>, double> coefficients_;  // exponent vector -> coefficient
};

/// Real trigonometric polynomial a_0 + sum_k a_k cos(k t) + b_k sin(k t)
/// with closed-form derivatives of every order.
class TrigPolynomial {
 public:
  TrigPolynomial(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  static TrigPolynomial random(int max_frequency, std::mt19937_64& rng, double scale = 1.0);

  double operator()(double t) const { return derivative(t, 0); }
  double derivative(double t, int order) const;

 private:
  double a0_ = 0.0;
  std::vector<double> cos_coeffs_;
  std::vector<double> sin_coeffs_;
};

/// C-infinity ramp: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);

/// C-infinity cutoff equal to 1 on [lo, hi], 0 outside [lo - margin, hi + margin].
double smooth_cutoff(double t, double lo, double hi, double margin);

}  // namespace wkit
