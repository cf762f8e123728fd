#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wkit/atlas.hpp"
#include "wkit/geometry.hpp"

namespace wkit {

/// Local addition on the target manifold N (embedded in R^n): Sigma maps a
/// tangent vector at q to a nearby point, inverse recovers it, project is the
/// tangent-space projection at q.
struct LocalAddition {
  std::string name;
  int ambient_dim = 0;
  double injectivity_bound = 0.0;
  std::function<Vec(const Vec&, const Vec&)> sigma;    // (q, v) -> point
  std::function<Vec(const Vec&, const Vec&)> inverse;  // (q, p) -> v
  std::function<Vec(const Vec&, const Vec&)> project;  // (q, w) -> tangent at q
};

/// Flat space: Sigma(q, v) = q + v.
LocalAddition flat_addition(int dim);
/// Round sphere S^2 in R^3 with the geodesic exponential map.
LocalAddition sphere_exp_addition();
/// Round sphere S^2 with the normalized-chord retraction Sigma(q, v) =
/// (q + v)/|q + v|.
LocalAddition sphere_projection_addition();

/// Grid-sampled map into N: nodes are global parameter values of the source.
struct MapGridFunction {
  std::vector<double> nodes;
  std::vector<Vec> values;
};

/// Tangent field along a grid map: one tangent vector per node.
using TangentGridField = std::vector<Vec>;

/// phi_f(g): per-node tangent vectors tau(x) = inverse(f(x), g(x)). Throws
/// ChartDomainError naming the first node outside the chart domain.
TangentGridField chart_forward(const MapGridFunction& f, const MapGridFunction& g,
                               const LocalAddition& addition);

/// phi_f^{-1}(tau): per-node g(x) = Sigma(f(x), tau(x)).
MapGridFunction chart_backward(const MapGridFunction& f, const TangentGridField& tau,
                               const LocalAddition& addition);

/// Change of canonical charts: tau along g becomes
/// x -> inverse(f(x), Sigma(g(x), tau(x))).
TangentGridField change_of_charts(const MapGridFunction& f, const MapGridFunction& g,
                                  const TangentGridField& tau, const LocalAddition& addition);

/// Smooth scalar profile of one variable with derivatives of every order.
struct Smooth1D {
  std::function<double(double, int)> eval;  // (t, derivative order)

  double operator()(double t) const { return eval(t, 0); }
};

Smooth1D smooth_constant(double c);
Smooth1D smooth_sum(const Smooth1D& a, const Smooth1D& b);
Smooth1D smooth_product(const Smooth1D& a, const Smooth1D& b);
Smooth1D smooth_scale(double c, const Smooth1D& a);

struct SubmersionCheckReport {
  int trials = 0;
  double grid_spacing = 0.0;
  double naturality_defect_max = 0.0;   // phi_f(res(phi_F^-1(sigma))) vs res(sigma)
  double naturality_defect_mean = 0.0;
  double right_inverse_defect_max = 0.0;  // res(phi_F^-1(E tau)) vs phi_f^-1(tau)
  double right_inverse_defect_mean = 0.0;
  std::uint64_t seed = 0;
};

struct SubmersionCheckOptions {
  int trials = 50;
  std::uint64_t seed = 2024;
  double field_scale = 0.1;  // per-node tangent bound of the random fields
  LocalExtendOptions extend;
};

/// Numerical shadow of the submersion-chart diagram on (M = S^1, N = S^2,
/// C = closed arc): random tangent fields along the base map F are pushed
/// through the canonical charts and the Theorem-A extension pipeline; both
/// diagram defects are reported per trial.
SubmersionCheckReport submersion_chart_check(const AtlasBundle& atlas,
                                             const AtlasClosedSet& c_set,
                                             const LocalAddition& addition,
                                             const SubmersionCheckOptions& options = {});

}  // namespace wkit
