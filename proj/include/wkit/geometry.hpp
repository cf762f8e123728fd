#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace wkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Distance oracle between two points.
using MetricFn = std::function<double(const Vec&, const Vec&)>;

inline double euclidean(const Vec& a, const Vec& b) { return (a - b).norm(); }

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Axis-aligned box [lo, hi].
struct Box {
  Vec lo;
  Vec hi;

  int dimension() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x, double pad = 0.0) const {
    for (int i = 0; i < dimension(); ++i) {
      if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
    }
    return true;
  }

  Vec center() const { return 0.5 * (lo + hi); }

  double max_side() const { return (hi - lo).maxCoeff(); }

  bool intersects(const Box& other) const {
    for (int i = 0; i < dimension(); ++i) {
      if (hi[i] < other.lo[i] || other.hi[i] < lo[i]) return false;
    }
    return true;
  }
};

inline Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  return Box{make_vec(lo), make_vec(hi)};
}

/// Strict lexicographic order on coordinates, used for deterministic tie-breaks.
inline bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

/// Index of the sample nearest to x; ties broken lexicographically.
inline int nearest_index(const std::vector<Vec>& samples, const Vec& x) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const double d = (samples[i] - x).norm();
    if (d < best_d || (d == best_d && best >= 0 && lex_less(samples[i], samples[best]))) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace wkit
