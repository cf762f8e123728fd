#include "wkit/random_fields.hpp"

#include <cmath>
#include <numbers>

#include "wkit/errors.hpp"

namespace wkit {

Polynomial::Polynomial(int dimension, std::map<std::vector<int>, double> coefficients)
    : dimension_(dimension), coefficients_(std::move(coefficients)) {
  for (const auto& [exponents, coeff] : coefficients_) {
    (void)coeff;
    if (static_cast<int>(exponents.size()) != dimension_)
      throw ArgumentError("polynomial exponent vector has wrong dimension");
  }
}

Polynomial Polynomial::random(int dimension, int max_degree, std::mt19937_64& rng,
                              double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  std::map<std::vector<int>, double> coefficients;
  for (const MultiIndex& gamma : multi_indices_up_to(dimension, max_degree)) {
    coefficients[gamma.entries()] = unif(rng);
  }
  return Polynomial(dimension, std::move(coefficients));
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [exponents, coeff] : coefficients_) {
    if (coeff == 0.0) continue;
    int total = 0;
    for (int e : exponents) total += e;
    deg = std::max(deg, total);
  }
  return deg;
}

double Polynomial::operator()(const Vec& x) const {
  double sum = 0.0;
  for (const auto& [exponents, coeff] : coefficients_) {
    double mono = coeff;
    for (int i = 0; i < dimension_; ++i) {
      for (int k = 0; k < exponents[static_cast<size_t>(i)]; ++k) mono *= x[i];
    }
    sum += mono;
  }
  return sum;
}

double Polynomial::partial(const Vec& x, const MultiIndex& alpha) const {
  double sum = 0.0;
  for (const auto& [exponents, coeff] : coefficients_) {
    double term = coeff;
    bool vanishes = false;
    for (int i = 0; i < dimension_; ++i) {
      const int g = exponents[static_cast<size_t>(i)];
      const int a = alpha[i];
      if (g < a) {
        vanishes = true;
        break;
      }
      for (int k = 0; k < a; ++k) term *= (g - k);       // falling factorial
      for (int k = 0; k < g - a; ++k) term *= x[i];
    }
    if (!vanishes) sum += term;
  }
  return sum;
}

ScalarField Polynomial::as_field() const {
  Polynomial copy = *this;
  ScalarField field;
  field.value = [copy](const Vec& x) { return copy(x); };
  field.partial = [copy](const Vec& x, const MultiIndex& alpha) {
    return copy.partial(x, alpha);
  };
  return field;
}

Polynomial Polynomial::scaled(double factor) const {
  std::map<std::vector<int>, double> coefficients = coefficients_;
  for (auto& [exponents, coeff] : coefficients) coeff *= factor;
  return Polynomial(dimension_, std::move(coefficients));
}

TrigPolynomial::TrigPolynomial(double a0, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs)
    : a0_(a0), cos_coeffs_(std::move(cos_coeffs)), sin_coeffs_(std::move(sin_coeffs)) {
  if (cos_coeffs_.size() != sin_coeffs_.size())
    throw ArgumentError("trig polynomial coefficient lists must have equal length");
}

TrigPolynomial TrigPolynomial::random(int max_frequency, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  std::vector<double> cs(static_cast<size_t>(max_frequency));
  std::vector<double> ss(static_cast<size_t>(max_frequency));
  const double a0 = unif(rng);
  for (auto& c : cs) c = unif(rng);
  for (auto& s : ss) s = unif(rng);
  return TrigPolynomial(a0, std::move(cs), std::move(ss));
}

double TrigPolynomial::derivative(double t, int order) const {
  double sum = (order == 0) ? a0_ : 0.0;
  for (size_t i = 0; i < cos_coeffs_.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double phase = k * t + order * std::numbers::pi / 2.0;
    const double gain = std::pow(k, order);
    sum += cos_coeffs_[i] * gain * std::cos(phase);
    sum += sin_coeffs_[i] * gain * std::sin(phase);
  }
  return sum;
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double smooth_cutoff(double t, double lo, double hi, double margin) {
  if (t < lo) return smooth_step((t - (lo - margin)) / margin);
  if (t > hi) return smooth_step(((hi + margin) - t) / margin);
  return 1.0;
}

}  // namespace wkit
