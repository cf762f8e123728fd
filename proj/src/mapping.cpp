#include "wkit/mapping.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wkit/errors.hpp"
#include "wkit/random_fields.hpp"

namespace wkit {

LocalAddition flat_addition(int dim) {
  LocalAddition addition;
  addition.name = "flat";
  addition.ambient_dim = dim;
  addition.injectivity_bound = std::numeric_limits<double>::infinity();
  addition.sigma = [](const Vec& q, const Vec& v) { return (q + v).eval(); };
  addition.inverse = [](const Vec& q, const Vec& p) { return (p - q).eval(); };
  addition.project = [](const Vec&, const Vec& w) { return w; };
  return addition;
}

LocalAddition sphere_exp_addition() {
  LocalAddition addition;
  addition.name = "sphere_exp";
  addition.ambient_dim = 3;
  addition.injectivity_bound = std::numbers::pi / 2.0;
  addition.sigma = [](const Vec& q, const Vec& v) -> Vec {
    const double norm = v.norm();
    if (norm == 0.0) return q;  // Sigma(q, 0) = q exactly
    return std::cos(norm) * q + std::sin(norm) / norm * v;
  };
  addition.inverse = [](const Vec& q, const Vec& p) -> Vec {
    const double c = std::clamp(q.dot(p), -1.0, 1.0);
    const Vec w = p - c * q;
    const double wn = w.norm();
    if (wn == 0.0) {
      if (c < 0.0) throw ChartDomainError("sphere log undefined at the antipode");
      return Vec::Zero(3);
    }
    return std::acos(c) / wn * w;
  };
  addition.project = [](const Vec& q, const Vec& w) -> Vec { return w - q.dot(w) * q; };
  return addition;
}

LocalAddition sphere_projection_addition() {
  LocalAddition addition;
  addition.name = "sphere_projection";
  addition.ambient_dim = 3;
  addition.injectivity_bound = 1.0;  // tangent chords below the equator stay invertible
  addition.sigma = [](const Vec& q, const Vec& v) -> Vec {
    if (v.norm() == 0.0) return q;
    return ((q + v) / (q + v).norm()).eval();
  };
  addition.inverse = [](const Vec& q, const Vec& p) -> Vec {
    const double c = q.dot(p);
    if (c <= 0.0) throw ChartDomainError("normalized-chord inverse needs q . p > 0");
    return (p / c - q).eval();
  };
  addition.project = [](const Vec& q, const Vec& w) -> Vec { return w - q.dot(w) * q; };
  return addition;
}

namespace {

void check_sizes(const MapGridFunction& f, size_t other, const char* what) {
  if (f.nodes.size() != f.values.size() || f.values.size() != other) {
    throw ArgumentError(std::string(what) + ": grid size mismatch");
  }
}

[[noreturn]] void throw_node_error(const char* op, size_t node, double t) {
  std::ostringstream os;
  os << op << ": node " << node << " (t = " << t << ") leaves the chart domain";
  throw ChartDomainError(os.str());
}

}  // namespace

TangentGridField chart_forward(const MapGridFunction& f, const MapGridFunction& g,
                               const LocalAddition& addition) {
  check_sizes(f, g.values.size(), "chart_forward");
  TangentGridField tau(f.values.size());
  for (size_t k = 0; k < f.values.size(); ++k) {
    const Vec v = addition.inverse(f.values[k], g.values[k]);
    if (v.norm() >= addition.injectivity_bound)
      throw_node_error("chart_forward", k, f.nodes[k]);
    tau[k] = v;
  }
  return tau;
}

MapGridFunction chart_backward(const MapGridFunction& f, const TangentGridField& tau,
                               const LocalAddition& addition) {
  check_sizes(f, tau.size(), "chart_backward");
  MapGridFunction g;
  g.nodes = f.nodes;
  g.values.resize(tau.size());
  for (size_t k = 0; k < tau.size(); ++k) {
    if (tau[k].norm() >= addition.injectivity_bound)
      throw_node_error("chart_backward", k, f.nodes[k]);
    g.values[k] = addition.sigma(f.values[k], tau[k]);
  }
  return g;
}

TangentGridField change_of_charts(const MapGridFunction& f, const MapGridFunction& g,
                                  const TangentGridField& tau, const LocalAddition& addition) {
  check_sizes(f, g.values.size(), "change_of_charts");
  check_sizes(g, tau.size(), "change_of_charts");
  TangentGridField out(tau.size());
  for (size_t k = 0; k < tau.size(); ++k) {
    if (tau[k].norm() >= addition.injectivity_bound)
      throw_node_error("change_of_charts", k, g.nodes[k]);
    const Vec moved = addition.sigma(g.values[k], tau[k]);
    const Vec v = addition.inverse(f.values[k], moved);
    if (v.norm() >= addition.injectivity_bound)
      throw_node_error("change_of_charts", k, f.nodes[k]);
    out[k] = v;
  }
  return out;
}

Smooth1D smooth_constant(double c) {
  return Smooth1D{[c](double, int order) { return order == 0 ? c : 0.0; }};
}

Smooth1D smooth_sum(const Smooth1D& a, const Smooth1D& b) {
  auto ea = a.eval;
  auto eb = b.eval;
  return Smooth1D{[ea, eb](double t, int order) { return ea(t, order) + eb(t, order); }};
}

Smooth1D smooth_product(const Smooth1D& a, const Smooth1D& b) {
  auto ea = a.eval;
  auto eb = b.eval;
  return Smooth1D{[ea, eb](double t, int order) {
    // Leibniz rule
    double sum = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= order; ++j) {
      sum += binom * ea(t, j) * eb(t, order - j);
      binom = binom * (order - j) / (j + 1);
    }
    return sum;
  }};
}

Smooth1D smooth_scale(double c, const Smooth1D& a) {
  auto ea = a.eval;
  return Smooth1D{[c, ea](double t, int order) { return c * ea(t, order); }};
}

namespace {

// base curve on the sphere: the circle at polar angle phi0
struct BaseCurve {
  double phi0 = 1.0;

  Vec value(double theta) const {
    return make_vec({std::cos(theta) * std::sin(phi0), std::sin(theta) * std::sin(phi0),
                     std::cos(phi0)});
  }
  // orthonormal frame of the tangent plane along the curve
  Vec frame1(double theta, int order) const {
    // (-sin, cos, 0) and theta-derivatives
    switch (order % 4) {
      case 0: return make_vec({-std::sin(theta), std::cos(theta), 0.0});
      case 1: return make_vec({-std::cos(theta), -std::sin(theta), 0.0});
      case 2: return make_vec({std::sin(theta), -std::cos(theta), 0.0});
      default: return make_vec({std::cos(theta), std::sin(theta), 0.0});
    }
  }
  Vec frame2(double theta, int order) const {
    // F x frame1 = (-cos(phi0) cos, -cos(phi0) sin, sin(phi0)) and derivatives
    const double c = std::cos(phi0);
    switch (order % 4) {
      case 0: return make_vec({-c * std::cos(theta), -c * std::sin(theta), std::sin(phi0)});
      case 1: return make_vec({c * std::sin(theta), -c * std::cos(theta), 0.0});
      case 2: return make_vec({c * std::cos(theta), c * std::sin(theta), -std::sin(phi0)});
      default: return make_vec({-c * std::sin(theta), c * std::cos(theta), 0.0});
    }
  }
};

}  // namespace

SubmersionCheckReport submersion_chart_check(const AtlasBundle& atlas,
                                             const AtlasClosedSet& c_set,
                                             const LocalAddition& addition,
                                             const SubmersionCheckOptions& options) {
  if (addition.ambient_dim != 3)
    throw ArgumentError("submersion_chart_check drives the sphere-valued setup");
  if (atlas.rank != 3)
    throw ArgumentError("submersion_chart_check needs the rank-3 ambient bundle");

  SubmersionCheckReport report;
  report.trials = options.trials;
  report.seed = options.seed;

  const BaseCurve base;
  // global parameter per atlas sample (owner-chart lift)
  const bool circle = atlas.name == "circle_atlas";
  auto parameter_of = [&](const AtlasSample& s) {
    const auto& [chart, x] = s.chart_coords.front();
    if (circle) {
      double theta = x[0];
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      return theta;
    }
    return x[0] + chart;
  };

  MapGridFunction base_grid;
  for (const AtlasSample& s : atlas.samples) {
    base_grid.nodes.push_back(parameter_of(s));
    base_grid.values.push_back(base.value(base_grid.nodes.back()));
  }
  double spacing = 1e300;
  for (size_t k = 1; k < base_grid.nodes.size(); ++k)
    spacing = std::min(spacing, std::abs(base_grid.nodes[k] - base_grid.nodes[k - 1]));
  report.grid_spacing = spacing;

  // C window in the global parameter, for the near-C cutoff
  double c_lo = 1e300, c_hi = -1e300;
  for (int id : c_set.sample_ids) {
    const double t = parameter_of(atlas.samples[static_cast<size_t>(id)]);
    c_lo = std::min(c_lo, t);
    c_hi = std::max(c_hi, t);
  }

  std::mt19937_64 rng(options.seed);
  double naturality_sum = 0.0;
  double right_inverse_sum = 0.0;

  for (int trial = 0; trial < options.trials; ++trial) {
    // random tangent field along F supported near C: coefficients against the
    // smooth frame, scaled into the chart-safe band
    const auto trig_a = TrigPolynomial::random(3, rng, 1.0);
    const auto trig_b = TrigPolynomial::random(3, rng, 1.0);
    const double raw_bound = 4.0 * 2.0;  // a_0 + 3 harmonics, coefficients in [-1, 1]
    const double scale = options.field_scale / raw_bound;
    const double margin = 0.25;
    auto cutoff = [c_lo, c_hi, margin](double t, int order) {
      if (t >= c_lo - 1e-12 && t <= c_hi + 1e-12) return order == 0 ? 1.0 : 0.0;
      if (order == 0) return smooth_cutoff(t, c_lo, c_hi, margin);
      // derivative values of the cutoff are only consumed on C, where the
      // plateau makes them zero; probe values elsewhere use a central stencil
      const double h = 1e-5;
      if (order == 1)
        return (smooth_cutoff(t + h, c_lo, c_hi, margin) -
                smooth_cutoff(t - h, c_lo, c_hi, margin)) /
               (2.0 * h);
      return 0.0;
    };

    // sigma components as smooth profiles of the parameter
    auto component = [&](int k) {
      return Smooth1D{[k, &base, &trig_a, &trig_b, scale, cutoff](double t, int order) {
        // Leibniz over cutoff * (a * e1_k + b * e2_k)
        double sum = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= order; ++j) {
          double inner = 0.0;
          double inner_binom = 1.0;
          const int rest = order - j;
          for (int i = 0; i <= rest; ++i) {
            inner += inner_binom * (trig_a.derivative(t, i) * base.frame1(t, rest - i)[k] +
                                    trig_b.derivative(t, i) * base.frame2(t, rest - i)[k]);
            inner_binom = inner_binom * (rest - i) / (i + 1);
          }
          sum += binom * cutoff(t, j) * inner;
          binom = binom * (order - j) / (j + 1);
        }
        return scale * sum;
      }};
    };
    const Smooth1D sigma_x = component(0);
    const Smooth1D sigma_y = component(1);
    const Smooth1D sigma_z = component(2);
    auto sigma_at = [&](double t) {
      return make_vec({sigma_x(t), sigma_y(t), sigma_z(t)});
    };

    // --- naturality: phi_f(res(phi_F^{-1}(sigma))) = res(sigma) ------------
    TangentGridField sigma_field;
    for (double t : base_grid.nodes) sigma_field.push_back(sigma_at(t));
    const MapGridFunction g = chart_backward(base_grid, sigma_field, addition);
    for (int id : c_set.sample_ids) {
      const size_t k = static_cast<size_t>(id);
      const Vec tau_back = addition.inverse(base_grid.values[k], g.values[k]);
      const double defect = (tau_back - sigma_field[k]).cwiseAbs().maxCoeff();
      report.naturality_defect_max = std::max(report.naturality_defect_max, defect);
      naturality_sum += defect;
    }

    // --- right inverse through the extension pipeline ----------------------
    // tau := sigma|_C as a rank-3 section with closed-form partials
    LocalSectionFamily tau_family;
    tau_family.stage = FamilyStage::OnU;
    tau_family.reps.resize(atlas.charts.size());
    for (int chart = 0; chart < atlas.chart_count(); ++chart) {
      ChartRep rep;
      rep.active = true;
      rep.value = [&sigma_x, &sigma_y, &sigma_z](const Vec& x) {
        return make_vec({sigma_x(x[0]), sigma_y(x[0]), sigma_z(x[0])});
      };
      rep.partial = [&sigma_x, &sigma_y, &sigma_z](const Vec& x, const MultiIndex& alpha) {
        const int o = alpha.order();
        return make_vec({sigma_x.eval(x[0], o), sigma_y.eval(x[0], o), sigma_z.eval(x[0], o)});
      };
      tau_family.reps[static_cast<size_t>(chart)] = std::move(rep);
      tau_family.support.charts.push_back(chart);
    }
    const SectionOnC tau = restrict_section(tau_family, atlas, c_set, 2);
    const GlobalSection extended = global_extension_operator(tau, atlas, c_set, options.extend);

    for (size_t row = 0; row < tau.sample_ids.size(); ++row) {
      const int id = tau.sample_ids[row];
      const size_t k = static_cast<size_t>(id);
      const Vec raw = extended.at_sample(atlas, id);
      const Vec tangent = addition.project(base_grid.values[k], raw);
      if (tangent.norm() >= addition.injectivity_bound)
        throw_node_error("submersion_chart_check", k, base_grid.nodes[k]);
      const Vec lhs = addition.sigma(base_grid.values[k], tangent);
      const Vec rhs = addition.sigma(base_grid.values[k], tau.values[row]);
      const double defect = (lhs - rhs).cwiseAbs().maxCoeff();
      report.right_inverse_defect_max = std::max(report.right_inverse_defect_max, defect);
      right_inverse_sum += defect;
    }
  }

  const double per_trial =
      static_cast<double>(options.trials) * static_cast<double>(c_set.sample_ids.size());
  if (per_trial > 0.0) {
    report.naturality_defect_mean = naturality_sum / per_trial;
    report.right_inverse_defect_mean = right_inverse_sum / per_trial;
  }
  return report;
}

}  // namespace wkit
