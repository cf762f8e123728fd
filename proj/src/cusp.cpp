#include "wkit/cusp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include "wkit/errors.hpp"
#include "wkit/spatial_index.hpp"

namespace wkit {

namespace {

std::uint64_t mix_checksum(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t checksum_vec(std::uint64_t h, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) h = mix_checksum(h, v[i]);
  return h;
}

// uniform point in the unit ball, seeded per (witness, probe)
Vec ball_probe(std::mt19937_64& rng, int dimension) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec dir(dimension);
  for (int i = 0; i < dimension; ++i) dir[i] = normal(rng);
  const double n = dir.norm();
  if (n == 0.0) return Vec::Zero(dimension);
  const double radius = std::pow(unif(rng), 1.0 / dimension);
  return dir * (radius / n);
}

std::uint64_t witness_seed(std::uint64_t base, const Vec& z, double eps, const Vec& x) {
  std::uint64_t h = base;
  h = checksum_vec(h, z);
  h = mix_checksum(h, eps);
  h = checksum_vec(h, x);
  return h;
}

bool verify_cusp_witness(const SampledClosedSet& set, const Vec& z, double eps, const Vec& x,
                         double rho, double r, int probe_count, std::uint64_t seed) {
  if (set.metric(x, z) >= eps) return false;
  const double ball_radius = rho * std::pow(eps, r);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < probe_count; ++k) {
    const Vec y = x + ball_probe(rng, set.dimension) * ball_radius;
    if (!set.membership(y)) return false;
    if (set.metric(z, y) >= eps) return false;
  }
  return true;
}

}  // namespace

CuspCheckResult check_outward_cusps(const SampledClosedSet& set,
                                    const std::vector<Vec>& K_boundary, double epsilon0,
                                    double rho, double r, const std::vector<double>& eps_grid,
                                    int probe_count, std::uint64_t seed) {
  if (probe_count < 100) throw ArgumentError("check_outward_cusps needs probe_count >= 100");
  if (epsilon0 <= 0.0 || rho <= 0.0 || r < 1.0)
    throw ArgumentError("cusp constants must satisfy epsilon0, rho > 0 and r >= 1");
  for (double eps : eps_grid) {
    if (eps <= 0.0 || eps >= epsilon0)
      throw ArgumentError("eps_grid must lie in (0, epsilon0)");
  }
  const bool has_boundary = !set.boundary_samples().empty();
  if (!K_boundary.empty() && !has_boundary)
    throw GeometryError("check_outward_cusps: set carries no boundary samples");

  CuspCertificate cert;
  cert.set_name = set.name;
  cert.epsilon0 = epsilon0;
  cert.rho = rho;
  cert.r = r;
  cert.probe_seed = seed;
  cert.probe_count = probe_count;
  cert.resolution = set.resolution;

  if (K_boundary.empty()) {
    cert.vacuous = true;  // nothing to certify: empty boundary sample
    cert.checksum = mix_checksum(1, epsilon0);
    return CuspCheckResult{true, cert, std::nullopt};
  }

  const auto interior = set.interior_samples();
  if (interior.empty())
    throw GeometryError("check_outward_cusps: set carries no interior samples");
  const double max_eps = *std::max_element(eps_grid.begin(), eps_grid.end());
  SpatialIndex index(&interior, std::max(set.resolution, max_eps / 8.0));

  std::uint64_t checksum = 1;
  for (const Vec& z : K_boundary) {
    for (double eps : eps_grid) {
      auto candidates = index.within(z, eps);
      std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
        const double da = set.metric(interior[static_cast<size_t>(a)], z);
        const double db = set.metric(interior[static_cast<size_t>(b)], z);
        if (da != db) return da < db;
        return lex_less(interior[static_cast<size_t>(a)], interior[static_cast<size_t>(b)]);
      });
      bool found = false;
      for (int c : candidates) {
        const Vec& x = interior[static_cast<size_t>(c)];
        if (verify_cusp_witness(set, z, eps, x, rho, r, probe_count,
                                witness_seed(seed, z, eps, x))) {
          cert.witnesses.push_back(CuspWitness{z, eps, x});
          checksum = checksum_vec(checksum, z);
          checksum = mix_checksum(checksum, eps);
          checksum = checksum_vec(checksum, x);
          found = true;
          break;
        }
      }
      if (!found) {
        CuspViolation violation;
        violation.z = z;
        violation.eps = eps;
        violation.reason = "no admissible interior sample x within eps of z";
        return CuspCheckResult{false, std::nullopt, violation};
      }
    }
  }
  cert.checksum = checksum;
  return CuspCheckResult{true, cert, std::nullopt};
}

bool replay_cusp_certificate(const SampledClosedSet& set, const CuspCertificate& cert) {
  if (cert.vacuous) return true;
  for (const CuspWitness& w : cert.witnesses) {
    if (!verify_cusp_witness(set, w.z, w.eps, w.x, cert.rho, cert.r, cert.probe_count,
                             witness_seed(cert.probe_seed, w.z, w.eps, w.x)))
      return false;
  }
  return true;
}

// --- fjords ----------------------------------------------------------------

namespace {

struct InteriorGraph {
  std::vector<Vec> nodes;
  std::vector<std::vector<std::pair<int, double>>> adjacency;  // (node, metric length)

  explicit InteriorGraph(const SampledClosedSet& set) {
    nodes = set.interior_samples();
    adjacency.resize(nodes.size());
    const double reach = set.resolution * std::sqrt(static_cast<double>(set.dimension)) * 1.01;
    SpatialIndex index(&nodes, set.resolution);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      for (int j : index.within(nodes[static_cast<size_t>(i)], reach)) {
        if (j == i) continue;
        const Vec mid = 0.5 * (nodes[static_cast<size_t>(i)] + nodes[static_cast<size_t>(j)]);
        if (!set.membership(mid)) continue;
        adjacency[static_cast<size_t>(i)].push_back(
            {j, set.metric(nodes[static_cast<size_t>(i)], nodes[static_cast<size_t>(j)])});
      }
    }
  }

  // single-source shortest paths (Dijkstra)
  void shortest_from(int source, std::vector<double>& dist, std::vector<int>& parent) const {
    dist.assign(nodes.size(), std::numeric_limits<double>::infinity());
    parent.assign(nodes.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[static_cast<size_t>(source)] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[static_cast<size_t>(u)]) continue;
      for (const auto& [v, w] : adjacency[static_cast<size_t>(u)]) {
        const double nd = d + w;
        if (nd < dist[static_cast<size_t>(v)]) {
          dist[static_cast<size_t>(v)] = nd;
          parent[static_cast<size_t>(v)] = u;
          queue.push({nd, v});
        }
      }
    }
  }

  // Membership scan along a segment: uniform samples plus dyadic refinement
  // toward both endpoints, so removed slivers adjacent to an endpoint (the
  // exponential fjord) are detected down to double precision.
  static bool segment_in_set(const SampledClosedSet& set, const Vec& a, const Vec& b) {
    for (int j = 1; j < 16; ++j) {
      if (!set.membership(a + (b - a) * (j / 16.0))) return false;
    }
    double t = 0.5;
    for (int k = 0; k < 900; ++k, t *= 0.5) {
      if (t == 0.0) break;
      if (!set.membership(a + (b - a) * t)) return false;
      if (!set.membership(a + (b - a) * (1.0 - t))) return false;
    }
    return true;
  }

  int attach(const SampledClosedSet& set, const Vec& endpoint) const {
    // endpoints of a path may be non-interior; hook them to the nearest
    // interior node whose connecting segment stays inside the set
    const double reach = set.resolution * std::sqrt(static_cast<double>(set.dimension)) * 1.5;
    std::vector<std::pair<double, int>> candidates;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      const double d = (nodes[static_cast<size_t>(i)] - endpoint).norm();
      if (d <= reach) candidates.push_back({d, i});
    }
    std::sort(candidates.begin(), candidates.end(), [this](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return lex_less(nodes[static_cast<size_t>(a.second)],
                      nodes[static_cast<size_t>(b.second)]);
    });
    for (const auto& [d, i] : candidates) {
      if (segment_in_set(set, endpoint, nodes[static_cast<size_t>(i)])) return i;
    }
    return -1;
  }
};

FjordCheckResult check_fjord_pairs_impl(const SampledClosedSet& set, const Vec& base, int p,
                                        double D, const std::vector<std::pair<Vec, Vec>>& pairs) {
  if (p < 1) throw ArgumentError("fjord exponent p must be >= 1");
  if (D <= 0.0) throw ArgumentError("fjord constant D must be positive");

  InteriorGraph graph(set);

  FjordCertificate cert;
  cert.set_name = set.name;
  cert.base = base;
  cert.p = p;
  cert.D = D;
  cert.resolution = set.resolution;
  std::uint64_t checksum = 1;

  std::map<int, std::pair<std::vector<double>, std::vector<int>>> source_cache;
  for (const auto& [x, y] : pairs) {
    const int sx = graph.attach(set, x);
    const int sy = graph.attach(set, y);
    if (sx < 0 || sy < 0) {
      FjordViolation violation;
      violation.x = x;
      violation.y = y;
      violation.disconnected = true;
      violation.component_a = x;
      violation.component_b = y;
      return FjordCheckResult{false, std::nullopt, violation};
    }
    auto& [dist, parent] = source_cache[sx];
    if (dist.empty()) graph.shortest_from(sx, dist, parent);
    if (!std::isfinite(dist[static_cast<size_t>(sy)])) {
      // pinched at this resolution: the two endpoints live in different
      // interior components
      FjordViolation violation;
      violation.x = x;
      violation.y = y;
      violation.disconnected = true;
      violation.component_a = graph.nodes[static_cast<size_t>(sx)];
      violation.component_b = graph.nodes[static_cast<size_t>(sy)];
      return FjordCheckResult{false, std::nullopt, violation};
    }

    FjordPath path;
    path.x = x;
    path.y = y;
    path.distance = set.metric(x, y);
    path.length = dist[static_cast<size_t>(sy)] +
                  set.metric(x, graph.nodes[static_cast<size_t>(sx)]) +
                  set.metric(y, graph.nodes[static_cast<size_t>(sy)]);
    for (int v = sy; v >= 0; v = parent[static_cast<size_t>(v)])
      path.vertices.push_back(graph.nodes[static_cast<size_t>(v)]);
    std::reverse(path.vertices.begin(), path.vertices.end());
    path.vertices.insert(path.vertices.begin(), x);
    path.vertices.push_back(y);

    if (path.distance < D * std::pow(path.length, p)) {
      FjordViolation violation;
      violation.x = x;
      violation.y = y;
      violation.distance = path.distance;
      violation.best_length = path.length;
      return FjordCheckResult{false, std::nullopt, violation};
    }
    checksum = checksum_vec(checksum, x);
    checksum = checksum_vec(checksum, y);
    checksum = mix_checksum(checksum, path.length);
    cert.paths.push_back(std::move(path));
  }
  cert.checksum = checksum;
  return FjordCheckResult{true, cert, std::nullopt};
}

}  // namespace

FjordCheckResult check_no_narrow_fjords(const SampledClosedSet& set, const Vec& base, int p,
                                        double D, const std::vector<Vec>& K, int pair_budget,
                                        std::uint64_t seed) {
  if (K.size() < 2) throw ArgumentError("fjord check needs >= 2 sample points in K");
  std::vector<std::pair<Vec, Vec>> pairs;
  if (static_cast<long long>(K.size()) * (static_cast<long long>(K.size()) - 1) / 2 <=
      pair_budget) {
    for (size_t i = 0; i < K.size(); ++i) {
      for (size_t j = i + 1; j < K.size(); ++j) pairs.push_back({K[i], K[j]});
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, K.size() - 1);
    while (static_cast<int>(pairs.size()) < pair_budget) {
      const size_t i = pick(rng);
      const size_t j = pick(rng);
      if (i == j) continue;
      pairs.push_back({K[i], K[j]});
    }
  }
  return check_fjord_pairs_impl(set, base, p, D, pairs);
}

FjordCheckResult check_no_narrow_fjords_pairs(const SampledClosedSet& set, const Vec& base,
                                              int p, double D,
                                              const std::vector<std::pair<Vec, Vec>>& pairs) {
  return check_fjord_pairs_impl(set, base, p, D, pairs);
}

// --- constants --------------------------------------------------------------

CuspConstants normalize_constants(double epsilon0, double rho, double r) {
  if (epsilon0 <= 0.0 || rho <= 0.0 || r < 1.0)
    throw ArgumentError("normalize_constants needs epsilon0, rho > 0 and r >= 1");
  CuspConstants out;
  out.epsilon0 = std::min({epsilon0, rho, 0.99});
  out.rho = 1.0;
  int r_prime = std::max(static_cast<int>(std::ceil(r)) + 1, 2);
  // eps^{r'} <= rho * eps^r on (0, eps0'] iff eps0'^{r'-r} <= rho
  while (std::pow(out.epsilon0, r_prime - r) > rho) ++r_prime;
  out.r = r_prime;
  return out;
}

CuspConstants transfer_cusp_constants(const CuspConstants& input, double C, double alpha) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw ArgumentError("transfer needs Hoelder exponent alpha in (0, 1]");
  if (C < 1.0) throw ArgumentError("transfer needs bi-Hoelder constant C >= 1");
  if (input.rho != 1.0 || input.r < 2.0)
    throw ArgumentError("transfer expects a normalized certificate (rho = 1, r >= 2)");
  CuspConstants out;
  out.epsilon0 = std::min(C * std::pow(input.epsilon0, alpha), 0.5);
  out.rho = 1.0 / std::pow(C, 1.0 + input.r / (alpha * alpha));
  int r2 = static_cast<int>(std::ceil(input.r / (alpha * alpha)));
  while (out.rho * std::pow(out.epsilon0, r2) > input.epsilon0) ++r2;
  out.r = r2;
  return out;
}

// --- serialization -----------------------------------------------------------

namespace {

nlohmann::json vec_to_json(const Vec& v) {
  auto arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

std::string cusp_certificate_to_json(const CuspCertificate& cert) {
  nlohmann::json j;
  j["kind"] = "cusp_certificate";
  j["set"] = cert.set_name;
  j["epsilon0"] = cert.epsilon0;
  j["rho"] = cert.rho;
  j["r"] = cert.r;
  j["probe_seed"] = cert.probe_seed;
  j["probe_count"] = cert.probe_count;
  j["resolution"] = cert.resolution;
  j["vacuous"] = cert.vacuous;
  j["caveat"] = "sampled verification; PASS is relative to the stated resolution";
  auto witnesses = nlohmann::json::array();
  for (const CuspWitness& w : cert.witnesses) {
    witnesses.push_back({{"z", vec_to_json(w.z)}, {"eps", w.eps}, {"x", vec_to_json(w.x)}});
  }
  j["witnesses"] = std::move(witnesses);
  j["checksum"] = cert.checksum;
  return j.dump(2);
}

std::string fjord_certificate_to_json(const FjordCertificate& cert) {
  nlohmann::json j;
  j["kind"] = "fjord_certificate";
  j["set"] = cert.set_name;
  j["base"] = vec_to_json(cert.base);
  j["p"] = cert.p;
  j["D"] = cert.D;
  j["resolution"] = cert.resolution;
  j["caveat"] = "sampled verification; PASS is relative to the stated resolution";
  auto paths = nlohmann::json::array();
  for (const FjordPath& path : cert.paths) {
    paths.push_back({{"x", vec_to_json(path.x)},
                     {"y", vec_to_json(path.y)},
                     {"distance", path.distance},
                     {"length", path.length},
                     {"vertex_count", path.vertices.size()}});
  }
  j["paths"] = std::move(paths);
  j["checksum"] = cert.checksum;
  return j.dump(2);
}

// --- geodesic metric ----------------------------------------------------------

struct GraphGeodesicMetric::Impl {
  std::vector<Vec> grid;
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  mutable std::map<int, std::vector<double>> cache;

  int nearest(const Vec& p) const { return nearest_index(grid, p); }

  const std::vector<double>& distances_from(int source) const {
    auto it = cache.find(source);
    if (it != cache.end()) return it->second;
    std::vector<double> dist(grid.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[static_cast<size_t>(source)] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[static_cast<size_t>(u)]) continue;
      for (const auto& [v, w] : adjacency[static_cast<size_t>(u)]) {
        if (d + w < dist[static_cast<size_t>(v)]) {
          dist[static_cast<size_t>(v)] = d + w;
          queue.push({d + w, v});
        }
      }
    }
    return cache.emplace(source, std::move(dist)).first->second;
  }
};

GraphGeodesicMetric::GraphGeodesicMetric(std::vector<Vec> grid,
                                         const std::function<Mat(const Vec&)>& tensor,
                                         double spacing)
    : impl_(std::make_shared<Impl>()) {
  impl_->grid = std::move(grid);
  if (impl_->grid.empty()) throw ArgumentError("geodesic metric needs grid points");
  const int d = static_cast<int>(impl_->grid.front().size());

  std::vector<Mat> tensors(impl_->grid.size());
  for (size_t i = 0; i < impl_->grid.size(); ++i) {
    tensors[i] = tensor(impl_->grid[i]);
    Eigen::SelfAdjointEigenSolver<Mat> eig(tensors[i]);
    if (eig.eigenvalues().minCoeff() <= 1e-12) {
      std::ostringstream os;
      os << "metric tensor is not positive definite at node (";
      for (int k = 0; k < d; ++k) os << (k ? "," : "") << impl_->grid[i][k];
      os << ")";
      throw GeometryError(os.str());
    }
  }

  impl_->adjacency.resize(impl_->grid.size());
  SpatialIndex index(&impl_->grid, spacing);
  const double reach = spacing * std::sqrt(static_cast<double>(d)) * 1.01;
  for (int i = 0; i < static_cast<int>(impl_->grid.size()); ++i) {
    for (int j : index.within(impl_->grid[static_cast<size_t>(i)], reach)) {
      if (j == i) continue;
      const Vec step = impl_->grid[static_cast<size_t>(j)] - impl_->grid[static_cast<size_t>(i)];
      const Mat avg = 0.5 * (tensors[static_cast<size_t>(i)] + tensors[static_cast<size_t>(j)]);
      impl_->adjacency[static_cast<size_t>(i)].push_back(
          {j, std::sqrt(step.dot(avg * step))});
    }
  }
}

double GraphGeodesicMetric::operator()(const Vec& a, const Vec& b) const {
  const int sa = impl_->nearest(a);
  const int sb = impl_->nearest(b);
  if (sa == sb) return 0.0;
  return impl_->distances_from(sa)[static_cast<size_t>(sb)];
}

MetricFn GraphGeodesicMetric::as_metric() const {
  auto impl = impl_;
  return [impl](const Vec& a, const Vec& b) {
    const int sa = impl->nearest(a);
    const int sb = impl->nearest(b);
    if (sa == sb) return 0.0;
    return impl->distances_from(sa)[static_cast<size_t>(sb)];
  };
}

}  // namespace wkit
