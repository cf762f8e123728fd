#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wkit/domain.hpp"
#include "wkit/geometry.hpp"
#include "wkit/jet.hpp"

namespace wkit {

struct WhitneyCube {
  Vec center;
  double side = 0.0;
  int anchor = -1;  // index into the set's sample list
};

/// Dyadic cubes covering box \ C with side comparable to the distance to C:
/// side*sqrt(d) <= dist(center, C) <= 6*side*sqrt(d).
struct WhitneyDecomposition {
  std::string set_name;
  Box box;
  double min_side = 0.0;
  double max_side = 0.0;
  std::vector<WhitneyCube> cubes;
};

struct WhitneyDecomposeOptions {
  std::size_t cube_budget = 1'000'000;
};

/// Recursive dyadic subdivision; a cube is kept once its center clears the
/// lower proximity bound, subdivided while too close, and discarded when its
/// side falls below min_side. Deterministic for fixed inputs. The upper
/// proximity bound holds whenever max_side >= (box diameter)/6; pick
/// max_side accordingly (box side / 4 is the conventional choice).
WhitneyDecomposition whitney_decompose(const SampledClosedSet& set, const Box& box,
                                       double min_side, double max_side,
                                       const WhitneyDecomposeOptions& options = {});

std::string decomposition_to_json(const WhitneyDecomposition& decomp);

enum class BumpProfile {
  Mollifier,     // exp(-1/(1-t^2)), C-infinity
  PolynomialC2,  // (1-t^2)^3, C^2
};

/// One bump per cube, radial around the cube center with support radius
/// 1.3 * side/2 * sqrt(d); raw bumps are renormalized by their local sum.
struct BumpSystem {
  BumpProfile profile = BumpProfile::Mollifier;
  double support_factor = 1.3;

  double raw(const WhitneyCube& cube, const Vec& x) const;
};

struct WhitneyExtensionOptions {
  BumpSystem bumps;
  /// When set, construction runs whitney_jet_check and refuses (throws
  /// WhitneyCheckError carrying the witness) on FAIL.
  std::optional<double> check_tol;
  std::vector<double> check_t_grid = {1e-1, 1e-2, 1e-3};
};

/// The order-m Whitney extension operator: on C it restores sample values, on
/// box \ C it blends Taylor polynomials from cube anchors with the bump
/// partition of unity. Linear in the jet values; evaluation is pure.
class WhitneyExtension {
 public:
  WhitneyExtension(JetField jet, WhitneyDecomposition decomposition,
                   const SampledClosedSet& set, const WhitneyExtensionOptions& options = {});

  /// Ef(x): f^0 at the nearest sample when membership(x); the bump-blended
  /// Taylor polynomial on box \ C; DomainError outside both.
  double operator()(const Vec& x) const;

  /// Same blend off C, Taylor polynomial at the nearest sample on C. Smooth
  /// across the boundary and defined everywhere (no box check), so finite
  /// differences can act on it.
  double smooth_value(const Vec& x) const;

  const WhitneyDecomposition& decomposition() const;
  const JetField& jet() const;
  int order() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Convenience wrapper matching the operation name.
WhitneyExtension extend_jet(JetField jet, WhitneyDecomposition decomposition,
                            const SampledClosedSet& set,
                            const WhitneyExtensionOptions& options = {});

struct JetAgreementReport {
  int m = 0;
  double fd_step = 0.0;
  /// sup over sampled x in C and |alpha| <= m of |d^alpha_h Ef(x) - f^alpha(x)|
  double max_discrepancy = 0.0;
  std::vector<double> max_discrepancy_by_order;  // indexed by |alpha|
  /// fitted slope of log|Ef(y) - Tay_x^m f(y)| against log|y - x| over the
  /// probes (x = nearest sample of C)
  double fitted_decay_order = 0.0;
  int probes_used = 0;
};

/// Compares finite differences of the extension against the jet values on C
/// and fits the Taylor-remainder decay order on the probes.
JetAgreementReport verify_jet_agreement(const WhitneyExtension& extension,
                                        const std::vector<Vec>& probes, int m,
                                        double fd_step = 1e-4);

}  // namespace wkit
