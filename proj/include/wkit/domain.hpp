#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wkit/geometry.hpp"

namespace wkit {

/// Closed set in R^d given through oracles plus a finite sample.
struct SampledClosedSet {
  std::string name;
  int dimension = 0;
  std::function<bool(const Vec&)> membership;  // x in C
  std::function<bool(const Vec&)> interior;    // x in C degree-zero interior
  std::vector<Vec> samples;
  std::vector<bool> boundary_tag;  // per sample: true = boundary, false = interior
  MetricFn metric = euclidean;
  double resolution = 0.0;  // declared sample spacing
  Box bounding_box;

  std::vector<Vec> boundary_samples() const;
  std::vector<Vec> interior_samples() const;
};

/// {x in R^d : x_1 >= 0} clipped to a window box for sampling.
SampledClosedSet half_space(int dimension, double resolution = 1e-2);

/// Closed ball of given radius centered at the origin.
SampledClosedSet closed_ball(int dimension, double radius, double resolution = 1e-2);

/// Convex hull of the vertices (2D), as membership via half-plane tests.
SampledClosedSet convex_polytope(const std::vector<Vec>& vertices, double resolution = 1e-2);

/// Compact region bounded by the iterated Koch curve (iteration 0 is the
/// equilateral triangle). Iterations are capped at 8.
SampledClosedSet koch_snowflake(int iterations, double resolution = 5e-3);

struct ExpCuspOptions {
  double resolution = 1e-3;
  bool fjord_removed = false;  // replace the exponential fjord by a uniform gap
  double gap = 0.05;           // gap height used when the fjord is removed
  double pair_x_min = 0.1;     // fjord-straddling sample pairs start here
  double pair_x_max = 0.45;
};

/// The closed complement of {(x,y) : 0 < y < exp(-1/x^2), x > 0} inside a
/// window box. Samples include the fjord-straddling pairs
/// ((x,0),(x,exp(-1/x^2))). With fjord_removed the removed region becomes the
/// uniform strip {0 < y < gap} so the two banks stay uniformly separated.
SampledClosedSet exp_cusp_domain(const ExpCuspOptions& options = {});

/// d/dx^k of exp(-1/x^2) for x > 0 (0 for x <= 0, as the smooth continuation).
double exp_cusp_profile_derivative(double x, int k);

/// Value of the counterexample function on the set: exp(-1/x^2) on the upper
/// bank {x > 0, y >= bank_height}, 0 elsewhere. The bank height is the fjord
/// profile, or the gap height for the fjord-removed variant.
double exp_cusp_value(const Vec& p, std::optional<double> gap = std::nullopt);

/// Partial d^alpha of the counterexample function at a point of the set
/// (alpha given as entry list). Derivatives act along the bank, where the
/// function depends on x alone.
double exp_cusp_partial(const Vec& p, const std::vector<int>& alpha,
                        std::optional<double> gap = std::nullopt);

}  // namespace wkit
