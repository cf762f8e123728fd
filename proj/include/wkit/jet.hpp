#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wkit/geometry.hpp"
#include "wkit/multi_index.hpp"

namespace wkit {

/// Finite-order jet on a sampled compact set: one value f^alpha(x) per sample
/// point x and per multi-index |alpha| <= order. Immutable after construction.
class JetField {
 public:
  JetField(int order, int dimension, std::vector<Vec> points,
           std::vector<std::vector<double>> values);

  int order() const { return order_; }
  int dimension() const { return dimension_; }
  int point_count() const { return static_cast<int>(points_.size()); }
  const std::vector<Vec>& points() const { return points_; }
  const Vec& point(int i) const { return points_[static_cast<size_t>(i)]; }

  /// Multi-indices |alpha| <= order in graded lexicographic order; values are
  /// stored in this order.
  const std::vector<MultiIndex>& index_set() const { return index_set_; }

  double value(int point_index, int rank) const {
    return values_[static_cast<size_t>(point_index)][static_cast<size_t>(rank)];
  }
  double value(int point_index, const MultiIndex& alpha) const;
  const std::vector<double>& values_at(int point_index) const {
    return values_[static_cast<size_t>(point_index)];
  }

  /// Exact-coordinate lookup; throws MissingPointError when absent.
  int find_point(const Vec& x) const;

  /// a*f + b*g on an identical sample layout.
  static JetField linear_combination(double a, const JetField& f, double b, const JetField& g);

 private:
  int order_;
  int dimension_;
  std::vector<Vec> points_;
  std::vector<std::vector<double>> values_;  // values_[point][rank]
  std::vector<MultiIndex> index_set_;
};

/// Tay_x^m f(y) = sum_{|alpha|<=m} f^alpha(x)/alpha! (y-x)^alpha.
double taylor_poly(const JetField& jet, const Vec& x, int m, const Vec& y);
double taylor_poly_at(const JetField& jet, int base_index, int m, const Vec& y);

/// (R_x^m f)^alpha(y) = f^alpha(y) - Tay_x^{m-|alpha|}((f^{alpha+beta})_beta)(y).
double taylor_remainder(const JetField& jet, const Vec& x, int m, const MultiIndex& alpha,
                        const Vec& y);
double taylor_remainder_at(const JetField& jet, int base_index, int m, const MultiIndex& alpha,
                           int target_index);

/// |f|_{m,K}: max of |f^alpha(x)| over samples and |alpha| <= m.
double seminorm_abs(const JetField& jet, int m);

struct QValue {
  double t = 0.0;
  double q = 0.0;
  bool empty_sup = false;  // no sampled pair with 0 < |x-y| <= t
};

/// q_m(K,f,t): sup of |R_x^m(f)^alpha(y)| |y-x|^{|alpha|-m} over sampled pairs
/// with 0 < |x-y| <= t and |alpha| <= m. Empty sup returns 0 (flag set in
/// grid-based reports).
double q_seminorm(const JetField& jet, int m, double t);

struct SeminormReport {
  int m = 0;
  double abs = 0.0;
  std::vector<QValue> q_values;  // along a decreasing t-grid
  double whitney_norm = 0.0;     // abs + max recorded q
};

SeminormReport seminorm_report(const JetField& jet, int m, const std::vector<double>& t_grid);

struct WhitneyWitness {
  int x_index = -1;
  int y_index = -1;
  MultiIndex alpha = MultiIndex::zero(1);
  double ratio = 0.0;  // |R| * |y-x|^{|alpha|-m} at the witness pair
};

struct WhitneyVerdict {
  bool pass = false;
  double tol = 0.0;
  double q_at_smallest_t = 0.0;
  std::vector<QValue> q_values;
  std::optional<WhitneyWitness> witness;  // present on FAIL
};

/// Checks the finite-order Whitney criterion: PASS iff q_m drops below tol at
/// the smallest grid t. The t-grid must be decreasing with >= 3 entries
/// spanning >= 2 decades.
WhitneyVerdict whitney_jet_check(const JetField& jet, int m, const std::vector<double>& t_grid,
                                 double tol);

/// Scalar field with optional closed-form partial derivatives. When `partial`
/// is absent, jets fall back to central finite differences.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<double(const Vec&, const MultiIndex&)> partial;  // may be empty
};

struct JetOfFunctionOptions {
  double fd_step_scale = 1e-5;  // h = max(scale, scale*|x_i|) per axis
  std::function<bool(const Vec&)> membership;  // guards FD stencils when set
};

/// Jet of a function on sample points K: f^alpha(x) = d^alpha f(x).
JetField jet_of_function(const ScalarField& f, const std::vector<Vec>& K, int m,
                         const JetOfFunctionOptions& options = {});

/// Central finite-difference d^alpha f(x); steps h per axis.
double finite_difference(const std::function<double(const Vec&)>& f, const Vec& x,
                         const MultiIndex& alpha, const Vec& h);

// --- serialization ------------------------------------------------------

/// Line format: "x_1 ... x_d | a1,...,ad: value ..." with 17 significant
/// digits; bit-exact round trip at double precision.
std::string to_text(const JetField& jet);
JetField jet_from_text(const std::string& text);

std::string to_json_string(const JetField& jet);
JetField jet_from_json_string(const std::string& text);

}  // namespace wkit
