#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wkit/domain.hpp"
#include "wkit/geometry.hpp"

namespace wkit {

// --- outward polynomial cusps (corkscrew) --------------------------------

struct CuspWitness {
  Vec z;       // boundary point tested
  double eps;  // scale
  Vec x;       // interior point with B(x, rho*eps^r) inside C and inside B(z, eps)
};

struct CuspCertificate {
  std::string set_name;
  double epsilon0 = 0.0;
  double rho = 0.0;
  double r = 1.0;
  std::vector<CuspWitness> witnesses;
  std::uint64_t probe_seed = 0;
  int probe_count = 0;
  double resolution = 0.0;  // sampling caveat: a sampled PASS is resolution-bounded
  bool vacuous = false;     // no boundary points were supplied
  std::uint64_t checksum = 0;
};

struct CuspViolation {
  Vec z;
  double eps = 0.0;
  std::string reason;
};

struct CuspCheckResult {
  bool ok = false;
  std::optional<CuspCertificate> certificate;
  std::optional<CuspViolation> violation;
};

/// Searches, for every z in K_boundary and eps in eps_grid, an interior sample
/// x with metric(x,z) < eps whose ball B(x, rho*eps^r) stays in C and in
/// B(z, eps), verified on probe_count seeded probe points. Candidates are
/// tried sorted by distance to z; first success wins.
CuspCheckResult check_outward_cusps(const SampledClosedSet& set,
                                    const std::vector<Vec>& K_boundary, double epsilon0,
                                    double rho, double r, const std::vector<double>& eps_grid,
                                    int probe_count, std::uint64_t seed = 17);

/// Re-checks every stored witness of the certificate against the set oracles.
bool replay_cusp_certificate(const SampledClosedSet& set, const CuspCertificate& cert);

std::string cusp_certificate_to_json(const CuspCertificate& cert);

// --- no narrow fjords -----------------------------------------------------

struct FjordPath {
  Vec x, y;
  double distance = 0.0;  // metric(x, y)
  double length = 0.0;    // interior path length
  std::vector<Vec> vertices;
};

struct FjordCertificate {
  std::string set_name;
  Vec base;
  int p = 1;
  double D = 0.0;
  std::vector<FjordPath> paths;
  double resolution = 0.0;
  std::uint64_t checksum = 0;
};

struct FjordViolation {
  Vec x, y;
  double distance = 0.0;
  double best_length = 0.0;  // length of the best interior path found
  bool disconnected = false;
  Vec component_a, component_b;  // representatives when disconnected
};

struct FjordCheckResult {
  bool ok = false;
  std::optional<FjordCertificate> certificate;
  std::optional<FjordViolation> violation;
};

/// Joins sampled pairs from K by shortest polygonal interior paths (graph
/// search over the interior samples at the set's resolution) and verifies
/// metric(x,y) >= D * length^p. Endpoints may be non-interior; every other
/// path vertex is an interior sample.
FjordCheckResult check_no_narrow_fjords(const SampledClosedSet& set, const Vec& base, int p,
                                        double D, const std::vector<Vec>& K, int pair_budget,
                                        std::uint64_t seed = 17);

/// Same check for an explicit list of pairs (used for the fjord-straddling
/// counterexample pairs).
FjordCheckResult check_no_narrow_fjords_pairs(const SampledClosedSet& set, const Vec& base,
                                              int p, double D,
                                              const std::vector<std::pair<Vec, Vec>>& pairs);

std::string fjord_certificate_to_json(const FjordCertificate& cert);

// --- constant bookkeeping -------------------------------------------------

struct CuspConstants {
  double epsilon0 = 0.0;
  double rho = 1.0;
  double r = 2.0;
};

/// Normal form with rho = 1: epsilon0' = min{epsilon0, rho, 0.99} and the
/// smallest integer r' >= max(r+1, 2) with eps^{r'} <= rho*eps^r on (0, eps0'].
CuspConstants normalize_constants(double epsilon0, double rho, double r);

/// Transfer along a bi-Hoelder equivalence with constants (C, alpha):
///   eps02 = min{C*eps01^alpha, 1/2},  rho2 = 1/C^{1+r1/alpha^2},
///   r2 = smallest integer >= r1/alpha^2 with rho2*eps02^{r2} <= eps01.
/// Input must be normalized (rho = 1, r >= 2).
CuspConstants transfer_cusp_constants(const CuspConstants& input, double C, double alpha);

// --- discrete geodesic metric ---------------------------------------------

/// Shortest-path metric over a grid with a Riemannian metric tensor: nodes
/// are the grid points, neighbors are the (3^d - 1) unit offsets, edge weight
/// is the segment length under the average of the endpoint tensors. Queries
/// snap to the nearest grid node; per-source distance tables are cached.
class GraphGeodesicMetric {
 public:
  GraphGeodesicMetric(std::vector<Vec> grid,
                      const std::function<Mat(const Vec&)>& tensor, double spacing);

  double operator()(const Vec& a, const Vec& b) const;
  MetricFn as_metric() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace wkit
