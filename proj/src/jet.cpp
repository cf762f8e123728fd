#include "wkit/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wkit/errors.hpp"

namespace wkit {

JetField::JetField(int order, int dimension, std::vector<Vec> points,
                   std::vector<std::vector<double>> values)
    : order_(order),
      dimension_(dimension),
      points_(std::move(points)),
      values_(std::move(values)),
      index_set_(multi_indices_up_to(dimension, order)) {
  if (order_ < 0) throw ArgumentError("jet order must be >= 0");
  if (points_.size() != values_.size())
    throw ArgumentError("jet points and value rows differ in count");
  const size_t expected = index_set_.size();
  for (size_t p = 0; p < points_.size(); ++p) {
    if (points_[p].size() != dimension_)
      throw ArgumentError("jet sample point has wrong dimension");
    if (values_[p].size() != expected)
      throw ArgumentError("jet value row has wrong length; expected C(m+d,d) entries");
    for (double v : values_[p]) {
      if (!std::isfinite(v)) throw ArgumentError("jet values must be finite");
    }
  }
}

double JetField::value(int point_index, const MultiIndex& alpha) const {
  const int rank = multi_index_rank(alpha, order_);
  if (rank < 0) throw OrderError("multi-index order exceeds jet order");
  return value(point_index, rank);
}

int JetField::find_point(const Vec& x) const {
  for (int i = 0; i < point_count(); ++i) {
    if ((points_[static_cast<size_t>(i)] - x).lpNorm<Eigen::Infinity>() == 0.0) return i;
  }
  throw MissingPointError("point is not a sample point of the jet");
}

JetField JetField::linear_combination(double a, const JetField& f, double b, const JetField& g) {
  if (f.order() != g.order() || f.dimension() != g.dimension() ||
      f.point_count() != g.point_count())
    throw ArgumentError("jets must share layout for linear combination");
  std::vector<std::vector<double>> values(f.values_);
  for (size_t p = 0; p < values.size(); ++p) {
    if ((f.points_[p] - g.points_[p]).lpNorm<Eigen::Infinity>() != 0.0)
      throw ArgumentError("jets must share sample points for linear combination");
    for (size_t k = 0; k < values[p].size(); ++k) {
      values[p][k] = a * f.values_[p][k] + b * g.values_[p][k];
    }
  }
  return JetField(f.order(), f.dimension(), f.points_, std::move(values));
}

double taylor_poly_at(const JetField& jet, int base_index, int m, const Vec& y) {
  if (m > jet.order()) throw OrderError("Taylor order exceeds jet order");
  const Vec diff = y - jet.point(base_index);
  const auto& idx = jet.index_set();
  double sum = 0.0;
  for (size_t k = 0; k < idx.size(); ++k) {
    const MultiIndex& alpha = idx[k];
    if (alpha.order() > m) break;  // graded order: all later indices are higher
    sum += jet.value(base_index, static_cast<int>(k)) / alpha.factorial() *
           alpha.monomial(diff);
  }
  return sum;
}

double taylor_poly(const JetField& jet, const Vec& x, int m, const Vec& y) {
  return taylor_poly_at(jet, jet.find_point(x), m, y);
}

namespace {

// Tay_x^{m-|alpha|} of the shifted jet (f^{alpha+beta})_{|beta|<=m-|alpha|},
// evaluated at y. Works directly off the parent jet's value table.
double shifted_taylor(const JetField& jet, int base_index, int m, const MultiIndex& alpha,
                      const Vec& y) {
  const int sub_order = m - alpha.order();
  const Vec diff = y - jet.point(base_index);
  const auto betas = multi_indices_up_to(jet.dimension(), sub_order);
  double sum = 0.0;
  for (const MultiIndex& beta : betas) {
    const MultiIndex shifted = alpha.plus(beta);
    sum += jet.value(base_index, shifted) / beta.factorial() * beta.monomial(diff);
  }
  return sum;
}

}  // namespace

double taylor_remainder_at(const JetField& jet, int base_index, int m, const MultiIndex& alpha,
                           int target_index) {
  if (m > jet.order()) throw OrderError("remainder order exceeds jet order");
  if (alpha.order() > m) throw OrderError("|alpha| exceeds remainder order");
  const double direct = jet.value(target_index, alpha);
  return direct - shifted_taylor(jet, base_index, m, alpha, jet.point(target_index));
}

double taylor_remainder(const JetField& jet, const Vec& x, int m, const MultiIndex& alpha,
                        const Vec& y) {
  return taylor_remainder_at(jet, jet.find_point(x), m, alpha, jet.find_point(y));
}

double seminorm_abs(const JetField& jet, int m) {
  if (m > jet.order()) throw OrderError("seminorm order exceeds jet order");
  const auto& idx = jet.index_set();
  double sup = 0.0;
  for (int p = 0; p < jet.point_count(); ++p) {
    for (size_t k = 0; k < idx.size(); ++k) {
      if (idx[k].order() > m) break;
      sup = std::max(sup, std::abs(jet.value(p, static_cast<int>(k))));
    }
  }
  return sup;
}

namespace {

struct PairScanResult {
  std::vector<QValue> q_values;
  // witness of the overall max at the smallest t that admits pairs
  int witness_x = -1;
  int witness_y = -1;
  int witness_rank = -1;
  double witness_ratio = 0.0;
};

// Precomputed expansion of (R_x^m f)^alpha for every |alpha| <= m:
// R = f^alpha(y) - sum_beta f^{alpha+beta}(x)/beta! (y-x)^beta.
struct RemainderTable {
  struct Term {
    int shifted_rank;  // rank of alpha + beta in the jet's index set
    double inv_beta_factorial;
    MultiIndex beta;
  };
  std::vector<int> active_ranks;            // ranks with |alpha| <= m
  std::vector<std::vector<Term>> terms;     // per active rank
  std::vector<int> order_gap;               // |alpha| - m per active rank

  RemainderTable(const JetField& jet, int m) {
    const auto& idx = jet.index_set();
    std::map<std::vector<int>, int> rank_of;
    for (size_t k = 0; k < idx.size(); ++k) rank_of[idx[k].entries()] = static_cast<int>(k);
    for (size_t k = 0; k < idx.size(); ++k) {
      const MultiIndex& alpha = idx[k];
      if (alpha.order() > m) continue;
      active_ranks.push_back(static_cast<int>(k));
      order_gap.push_back(alpha.order() - m);
      std::vector<Term> row;
      for (const MultiIndex& beta : multi_indices_up_to(jet.dimension(), m - alpha.order())) {
        const auto it = rank_of.find(alpha.plus(beta).entries());
        row.push_back(Term{it->second, 1.0 / beta.factorial(), beta});
      }
      terms.push_back(std::move(row));
    }
  }

  double remainder(const JetField& jet, int x_index, int y_index, size_t active,
                   const Vec& diff) const {
    double tay = 0.0;
    for (const Term& term : terms[active]) {
      tay += jet.value(x_index, term.shifted_rank) * term.inv_beta_factorial *
             term.beta.monomial(diff);
    }
    return jet.value(y_index, active_ranks[active]) - tay;
  }
};

// One pass over all sampled pairs; q for each grid entry is the max ratio
// over pairs with separation <= t. The witness tracks the max at the
// smallest t with any pair.
PairScanResult scan_pairs(const JetField& jet, int m, const std::vector<double>& t_grid) {
  const RemainderTable table(jet, m);

  PairScanResult result;
  result.q_values.resize(t_grid.size());
  for (size_t g = 0; g < t_grid.size(); ++g) {
    result.q_values[g].t = t_grid[g];
    result.q_values[g].empty_sup = true;
  }
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  const double t_min = *std::min_element(t_grid.begin(), t_grid.end());

  const int n = jet.point_count();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vec diff = jet.point(j) - jet.point(i);
      const double d = diff.norm();
      if (d == 0.0 || d > t_max) continue;
      double best = 0.0;
      int best_rank = -1;
      for (size_t a = 0; a < table.active_ranks.size(); ++a) {
        const double r = table.remainder(jet, i, j, a, diff);
        const double ratio = std::abs(r) * std::pow(d, table.order_gap[a]);
        if (ratio > best) {
          best = ratio;
          best_rank = table.active_ranks[a];
        }
      }
      for (size_t g = 0; g < t_grid.size(); ++g) {
        if (d <= t_grid[g]) {
          result.q_values[g].empty_sup = false;
          result.q_values[g].q = std::max(result.q_values[g].q, best);
        }
      }
      if (d <= t_min && best >= result.witness_ratio) {
        result.witness_ratio = best;
        result.witness_x = i;
        result.witness_y = j;
        result.witness_rank = best_rank;
      }
    }
  }
  return result;
}

}  // namespace

double q_seminorm(const JetField& jet, int m, double t) {
  if (t <= 0.0) throw ArgumentError("q seminorm needs t > 0");
  if (m > jet.order()) throw OrderError("seminorm order exceeds jet order");
  return scan_pairs(jet, m, {t}).q_values[0].q;
}

SeminormReport seminorm_report(const JetField& jet, int m, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ArgumentError("seminorm report needs a t-grid");
  for (double t : t_grid) {
    if (t <= 0.0) throw ArgumentError("t-grid entries must be positive");
  }
  SeminormReport report;
  report.m = m;
  report.abs = seminorm_abs(jet, m);
  report.q_values = scan_pairs(jet, m, t_grid).q_values;
  double q_max = 0.0;
  for (const QValue& qv : report.q_values) q_max = std::max(q_max, qv.q);
  report.whitney_norm = report.abs + q_max;
  return report;
}

WhitneyVerdict whitney_jet_check(const JetField& jet, int m, const std::vector<double>& t_grid,
                                 double tol) {
  if (t_grid.size() < 3) throw ConfigError("whitney check needs >= 3 t-grid entries");
  for (size_t g = 0; g + 1 < t_grid.size(); ++g) {
    if (t_grid[g] <= t_grid[g + 1]) throw ConfigError("whitney check t-grid must decrease");
  }
  if (t_grid.front() / t_grid.back() < 100.0)
    throw ConfigError("whitney check t-grid must span >= 2 decades");
  if (tol <= 0.0) throw ArgumentError("whitney check tolerance must be positive");

  const PairScanResult scan = scan_pairs(jet, m, t_grid);
  WhitneyVerdict verdict;
  verdict.tol = tol;
  verdict.q_values = scan.q_values;
  verdict.q_at_smallest_t = scan.q_values.back().q;
  verdict.pass = verdict.q_at_smallest_t < tol;
  if (!verdict.pass && scan.witness_x >= 0) {
    WhitneyWitness w;
    w.x_index = scan.witness_x;
    w.y_index = scan.witness_y;
    w.alpha = jet.index_set()[static_cast<size_t>(scan.witness_rank)];
    w.ratio = scan.witness_ratio;
    verdict.witness = w;
  }
  return verdict;
}

double finite_difference(const std::function<double(const Vec&)>& f, const Vec& x,
                         const MultiIndex& alpha, const Vec& h) {
  // peel one derivative at a time: central difference along the first
  // non-zero axis, recursing on alpha - e_axis
  int axis = -1;
  for (int i = 0; i < alpha.dimension(); ++i) {
    if (alpha[i] > 0) {
      axis = i;
      break;
    }
  }
  if (axis < 0) return f(x);
  std::vector<int> reduced = alpha.entries();
  reduced[static_cast<size_t>(axis)] -= 1;
  const MultiIndex rest{reduced};
  Vec xp = x, xm = x;
  xp[axis] += h[axis];
  xm[axis] -= h[axis];
  return (finite_difference(f, xp, rest, h) - finite_difference(f, xm, rest, h)) /
         (2.0 * h[axis]);
}

JetField jet_of_function(const ScalarField& f, const std::vector<Vec>& K, int m,
                         const JetOfFunctionOptions& options) {
  if (K.empty()) throw ArgumentError("jet_of_function needs sample points");
  const int d = static_cast<int>(K.front().size());
  const auto idx = multi_indices_up_to(d, m);
  std::vector<std::vector<double>> values(K.size());

  for (size_t p = 0; p < K.size(); ++p) {
    const Vec& x = K[p];
    values[p].resize(idx.size());
    Vec h(d);
    for (int i = 0; i < d; ++i)
      h[i] = std::max(options.fd_step_scale, options.fd_step_scale * std::abs(x[i]));
    for (size_t k = 0; k < idx.size(); ++k) {
      const MultiIndex& alpha = idx[k];
      if (f.partial) {
        values[p][k] = f.partial(x, alpha);
        continue;
      }
      if (options.membership && alpha.order() > 0) {
        // the full stencil is a box of half-width |alpha|*h around x
        Vec corner = x;
        for (int i = 0; i < d; ++i) corner[i] += alpha[i] * h[i];
        Vec corner2 = x;
        for (int i = 0; i < d; ++i) corner2[i] -= alpha[i] * h[i];
        if (!options.membership(corner) || !options.membership(corner2)) {
          std::ostringstream os;
          os << "finite-difference stencil exits the set at sample (";
          for (int i = 0; i < d; ++i) os << (i ? "," : "") << x[i];
          os << ")";
          throw StencilError(os.str());
        }
      }
      values[p][k] = finite_difference(f.value, x, alpha, h);
    }
  }
  return JetField(m, d, K, std::move(values));
}

}  // namespace wkit
