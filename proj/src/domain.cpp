#include "wkit/domain.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "wkit/errors.hpp"

namespace wkit {

namespace {

constexpr double kInteriorSlack = 1e-9;
constexpr size_t kSampleGuard = 3'000'000;

void guard_sample_count(size_t n) {
  if (n > kSampleGuard) throw SizeError("generator sample budget exceeded");
}

// Regular grid over a box; emits node coordinates.
template <typename F>
void for_grid(const Box& box, double spacing, F&& fn) {
  const int d = box.dimension();
  std::vector<int> counts(static_cast<size_t>(d));
  size_t total = 1;
  for (int i = 0; i < d; ++i) {
    counts[static_cast<size_t>(i)] =
        std::max(1, static_cast<int>(std::floor((box.hi[i] - box.lo[i]) / spacing)) + 1);
    total *= static_cast<size_t>(counts[static_cast<size_t>(i)]);
  }
  guard_sample_count(total);
  std::vector<int> ix(static_cast<size_t>(d), 0);
  while (true) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = box.lo[i] + ix[static_cast<size_t>(i)] * spacing;
    fn(x);
    int axis = 0;
    while (axis < d) {
      if (++ix[static_cast<size_t>(axis)] < counts[static_cast<size_t>(axis)]) break;
      ix[static_cast<size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
}

}  // namespace

std::vector<Vec> SampledClosedSet::boundary_samples() const {
  std::vector<Vec> out;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (boundary_tag[i]) out.push_back(samples[i]);
  }
  return out;
}

std::vector<Vec> SampledClosedSet::interior_samples() const {
  std::vector<Vec> out;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!boundary_tag[i]) out.push_back(samples[i]);
  }
  return out;
}

SampledClosedSet half_space(int dimension, double resolution) {
  if (dimension < 1 || dimension > 4) throw ArgumentError("half_space supports d in 1..4");
  SampledClosedSet set;
  set.name = "half_space";
  set.dimension = dimension;
  set.resolution = resolution;
  set.membership = [](const Vec& x) { return x[0] >= 0.0; };
  set.interior = [](const Vec& x) { return x[0] > kInteriorSlack; };
  Vec lo = Vec::Constant(dimension, -1.0);
  Vec hi = Vec::Constant(dimension, 1.0);
  set.bounding_box = Box{lo, hi};

  // boundary face x_1 = 0
  if (dimension == 1) {
    set.samples.push_back(make_vec({0.0}));
    set.boundary_tag.push_back(true);
  } else {
    Box face{lo.tail(dimension - 1), hi.tail(dimension - 1)};
    for_grid(face, resolution, [&](const Vec& y) {
      Vec x(dimension);
      x[0] = 0.0;
      x.tail(dimension - 1) = y;
      set.samples.push_back(x);
      set.boundary_tag.push_back(true);
    });
  }
  // interior grid, offset half a step into the set
  Box inside = set.bounding_box;
  inside.lo[0] = resolution;
  for_grid(inside, resolution, [&](const Vec& x) {
    set.samples.push_back(x);
    set.boundary_tag.push_back(false);
  });
  return set;
}

SampledClosedSet closed_ball(int dimension, double radius, double resolution) {
  if (dimension < 1 || dimension > 4) throw ArgumentError("closed_ball supports d in 1..4");
  if (radius <= 0.0) throw ArgumentError("closed_ball needs positive radius");
  SampledClosedSet set;
  set.name = "closed_ball";
  set.dimension = dimension;
  set.resolution = resolution;
  set.membership = [radius](const Vec& x) { return x.norm() <= radius + 1e-9; };
  set.interior = [radius](const Vec& x) { return x.norm() < radius - kInteriorSlack; };
  set.bounding_box = Box{Vec::Constant(dimension, -1.5 * radius),
                         Vec::Constant(dimension, 1.5 * radius)};

  if (dimension == 1) {
    set.samples.push_back(make_vec({-radius}));
    set.boundary_tag.push_back(true);
    set.samples.push_back(make_vec({radius}));
    set.boundary_tag.push_back(true);
  } else if (dimension == 2) {
    const int n = std::max(8, static_cast<int>(std::ceil(2 * std::numbers::pi * radius / resolution)));
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * k / n;
      set.samples.push_back(make_vec({radius * std::cos(a), radius * std::sin(a)}));
      set.boundary_tag.push_back(true);
    }
  } else {
    // sphere sampled by projecting the surrounding grid shell
    Box shell{Vec::Constant(dimension, -radius), Vec::Constant(dimension, radius)};
    for_grid(shell, resolution * 2.0, [&](const Vec& x) {
      if (x.norm() < radius * 0.25) return;
      Vec s = x * (radius / x.norm());
      set.samples.push_back(s);
      set.boundary_tag.push_back(true);
    });
  }
  Box core{Vec::Constant(dimension, -radius), Vec::Constant(dimension, radius)};
  const double spacing = (dimension <= 2) ? 0.6 * resolution : 2.0 * resolution;
  for_grid(core, spacing, [&](const Vec& x) {
    if (x.norm() < radius - kInteriorSlack) {
      set.samples.push_back(x);
      set.boundary_tag.push_back(false);
    }
  });
  return set;
}

namespace {

// counterclockwise convex hull (monotone chain)
std::vector<Vec> convex_hull(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) { return (a - b).norm() == 0.0; }),
            pts.end());
  if (pts.size() < 3) throw ArgumentError("convex_polytope needs >= 3 distinct vertices");
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vec> hull;
  for (const Vec& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }
  const size_t lower = hull.size() + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
      hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  return hull;
}

}  // namespace

SampledClosedSet convex_polytope(const std::vector<Vec>& vertices, double resolution) {
  for (const Vec& v : vertices) {
    if (v.size() != 2) throw ArgumentError("convex_polytope is implemented for d = 2");
  }
  const auto hull = convex_hull(vertices);

  // inward half-plane normals per edge
  struct Edge {
    Vec a, b, inward;
  };
  std::vector<Edge> edges;
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec& a = hull[i];
    const Vec& b = hull[(i + 1) % hull.size()];
    Vec t = (b - a).normalized();
    edges.push_back(Edge{a, b, make_vec({-t[1], t[0]})});  // left of CCW edge
  }
  auto signed_depth = [edges](const Vec& x) {
    double depth = std::numeric_limits<double>::infinity();
    for (const Edge& e : edges) depth = std::min(depth, e.inward.dot(x - e.a));
    return depth;  // > 0 inside, < 0 outside
  };

  SampledClosedSet set;
  set.name = "convex_polytope";
  set.dimension = 2;
  set.resolution = resolution;
  set.membership = [signed_depth](const Vec& x) { return signed_depth(x) >= -1e-9; };
  set.interior = [signed_depth](const Vec& x) { return signed_depth(x) > kInteriorSlack; };

  Vec lo = hull.front(), hi = hull.front();
  for (const Vec& v : hull) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vec pad = Vec::Constant(2, 0.25 * (hi - lo).maxCoeff());
  set.bounding_box = Box{lo - pad, hi + pad};

  for (const Edge& e : edges) {
    const double len = (e.b - e.a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int k = 0; k < n; ++k) {
      set.samples.push_back(e.a + (e.b - e.a) * (static_cast<double>(k) / n));
      set.boundary_tag.push_back(true);
    }
  }
  for_grid(Box{lo, hi}, resolution, [&](const Vec& x) {
    if (signed_depth(x) > kInteriorSlack) {
      set.samples.push_back(x);
      set.boundary_tag.push_back(false);
    }
  });
  return set;
}

// --- Koch snowflake ------------------------------------------------------

namespace {

struct KochPolygon {
  std::vector<Vec> vertices;  // counterclockwise
  // y-bucketed edge lists for the crossing test
  double y_lo = 0.0, y_hi = 0.0;
  int bucket_count = 0;
  std::vector<std::vector<int>> buckets;

  void build_index() {
    y_lo = 1e300;
    y_hi = -1e300;
    for (const Vec& v : vertices) {
      y_lo = std::min(y_lo, v[1]);
      y_hi = std::max(y_hi, v[1]);
    }
    bucket_count = std::max(16, static_cast<int>(vertices.size() / 2));
    buckets.assign(static_cast<size_t>(bucket_count), {});
    for (int e = 0; e < static_cast<int>(vertices.size()); ++e) {
      const Vec& a = vertices[static_cast<size_t>(e)];
      const Vec& b = vertices[(static_cast<size_t>(e) + 1) % vertices.size()];
      const int b0 = bucket_of(std::min(a[1], b[1]));
      const int b1 = bucket_of(std::max(a[1], b[1]));
      for (int k = b0; k <= b1; ++k) buckets[static_cast<size_t>(k)].push_back(e);
    }
  }

  int bucket_of(double y) const {
    const double t = (y - y_lo) / (y_hi - y_lo);
    return std::clamp(static_cast<int>(t * bucket_count), 0, bucket_count - 1);
  }

  bool contains(const Vec& p) const {
    if (p[1] < y_lo - 1e-9 || p[1] > y_hi + 1e-9) return false;
    bool inside = false;
    for (int e : buckets[static_cast<size_t>(bucket_of(p[1]))]) {
      const Vec& a = vertices[static_cast<size_t>(e)];
      const Vec& b = vertices[(static_cast<size_t>(e) + 1) % vertices.size()];
      if ((a[1] > p[1]) != (b[1] > p[1])) {
        const double x_cross = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
        if (p[0] < x_cross) inside = !inside;
      }
    }
    return inside || boundary_distance(p) <= 1e-9;
  }

  double boundary_distance(const Vec& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < vertices.size(); ++e) {
      const Vec& a = vertices[e];
      const Vec& b = vertices[(e + 1) % vertices.size()];
      // bbox prune
      const double pad = best;
      if (p[0] < std::min(a[0], b[0]) - pad || p[0] > std::max(a[0], b[0]) + pad ||
          p[1] < std::min(a[1], b[1]) - pad || p[1] > std::max(a[1], b[1]) + pad)
        continue;
      const Vec ab = b - a;
      const double t = std::clamp(ab.dot(p - a) / ab.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (a + t * ab - p).norm());
    }
    return best;
  }
};

std::vector<Vec> koch_refine(const std::vector<Vec>& poly) {
  std::vector<Vec> out;
  out.reserve(poly.size() * 4);
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % poly.size()];
    const Vec third = (b - a) / 3.0;
    const Vec p = a + third;
    const Vec q = a + 2.0 * third;
    // equilateral bump over [p, q]; outward of a CCW polygon is right of the
    // edge direction
    const Vec tip =
        0.5 * (p + q) + make_vec({third[1], -third[0]}) * (std::numbers::sqrt3 / 2.0);
    out.push_back(a);
    out.push_back(p);
    out.push_back(tip);
    out.push_back(q);
  }
  return out;
}

}  // namespace

SampledClosedSet koch_snowflake(int iterations, double resolution) {
  if (iterations < 0 || iterations > 8)
    throw SizeError("koch_snowflake iterations must be in 0..8");
  std::vector<Vec> poly;
  for (int k = 0; k < 3; ++k) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
    poly.push_back(make_vec({std::cos(a), std::sin(a)}));
  }
  for (int it = 0; it < iterations; ++it) poly = koch_refine(poly);

  auto polygon = std::make_shared<KochPolygon>();
  polygon->vertices = poly;
  polygon->build_index();

  SampledClosedSet set;
  set.name = "koch_snowflake";
  set.dimension = 2;
  set.resolution = resolution;
  set.membership = [polygon](const Vec& x) { return polygon->contains(x); };
  const double ring = std::max(resolution / 8.0, 1e-6);
  set.interior = [polygon, ring](const Vec& x) {
    if (!polygon->contains(x)) return false;
    for (int k = 0; k < 8; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 8.0;
      if (!polygon->contains(x + make_vec({ring * std::cos(a), ring * std::sin(a)})))
        return false;
    }
    return true;
  };
  set.bounding_box = make_box({-1.3, -1.0}, {1.3, 1.3});

  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % poly.size()];
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int k = 0; k < n; ++k) {
      set.samples.push_back(a + (b - a) * (static_cast<double>(k) / n));
      set.boundary_tag.push_back(true);
    }
  }
  for_grid(Box{make_vec({-1.15, -1.05}), make_vec({1.15, 1.15})}, resolution, [&](const Vec& x) {
    if (set.interior(x)) {
      set.samples.push_back(x);
      set.boundary_tag.push_back(false);
    }
  });
  return set;
}

// --- exponential-cusp counterexample domain ------------------------------

namespace {

double cusp_profile(double x) {
  if (x <= 0.0) return 0.0;
  const double u2 = 1.0 / (x * x);
  if (u2 > 1400.0) return 0.0;
  return std::exp(-u2);
}

}  // namespace

double exp_cusp_profile_derivative(double x, int k) {
  if (x <= 0.0) return 0.0;
  const double u = 1.0 / x;
  if (u * u > 1400.0) return 0.0;
  // d^k/dx^k exp(-1/x^2) = exp(-1/x^2) q_k(1/x) with
  // q_{k+1}(u) = 2u^3 q_k(u) - u^2 q_k'(u)
  std::vector<double> q{1.0};
  for (int step = 0; step < k; ++step) {
    std::vector<double> next(q.size() + 3, 0.0);
    for (size_t j = 0; j < q.size(); ++j) {
      next[j + 3] += 2.0 * q[j];
      if (j >= 1) next[j + 1] -= static_cast<double>(j) * q[j];
    }
    q = std::move(next);
  }
  double poly = 0.0;
  for (size_t j = q.size(); j-- > 0;) poly = poly * u + q[j];
  return std::exp(-u * u) * poly;
}

namespace {

bool on_upper_bank(const Vec& p, std::optional<double> gap) {
  if (gap) return p[1] >= *gap;
  return p[0] > 0.0 && p[1] >= cusp_profile(p[0]) && p[1] > 0.0;
}

}  // namespace

double exp_cusp_value(const Vec& p, std::optional<double> gap) {
  return on_upper_bank(p, gap) ? cusp_profile(p[0]) : 0.0;
}

double exp_cusp_partial(const Vec& p, const std::vector<int>& alpha, std::optional<double> gap) {
  if (alpha.size() != 2) throw ArgumentError("exp_cusp_partial expects a 2d multi-index");
  if (alpha[1] > 0) return 0.0;  // the bank value depends on x alone
  if (!on_upper_bank(p, gap)) return 0.0;
  return exp_cusp_profile_derivative(p[0], alpha[0]);
}

SampledClosedSet exp_cusp_domain(const ExpCuspOptions& options) {
  if (options.resolution <= 0.0) throw ArgumentError("exp_cusp_domain needs resolution > 0");
  SampledClosedSet set;
  set.name = options.fjord_removed ? "exp_cusp_domain(fjord_removed)" : "exp_cusp_domain";
  set.dimension = 2;
  set.resolution = options.resolution;
  const Box window = make_box({-0.15, -0.15}, {0.5, 0.3});
  set.bounding_box = window;

  const bool removed = options.fjord_removed;
  const double gap = options.gap;
  auto in_removed_region = [removed, gap](const Vec& p) {
    if (removed) return p[1] > 0.0 && p[1] < gap;
    return p[0] > 0.0 && p[1] > 0.0 && p[1] < cusp_profile(p[0]);
  };
  set.membership = [window, in_removed_region](const Vec& p) {
    return window.contains(p) && !in_removed_region(p);
  };
  set.interior = [window, removed, gap](const Vec& p) {
    if (!window.contains(p, -kInteriorSlack)) return false;
    for (int i = 0; i < 2; ++i) {
      if (p[i] <= window.lo[i] + kInteriorSlack || p[i] >= window.hi[i] - kInteriorSlack)
        return false;
    }
    if (removed) return p[1] < -kInteriorSlack || p[1] > gap + kInteriorSlack;
    if (p[0] < -kInteriorSlack) return true;
    if (p[1] < -kInteriorSlack) return true;
    if (p[0] <= kInteriorSlack) return p[1] > kInteriorSlack;
    return p[1] > cusp_profile(p[0]) + kInteriorSlack;
  };

  // fjord-straddling pairs (x, 0) / (x, bank(x))
  const int pair_count = 24;
  for (int k = 0; k < pair_count; ++k) {
    const double x = options.pair_x_min +
                     (options.pair_x_max - options.pair_x_min) * k / (pair_count - 1.0);
    const double bank = removed ? gap : cusp_profile(x);
    set.samples.push_back(make_vec({x, 0.0}));
    set.boundary_tag.push_back(true);
    set.samples.push_back(make_vec({x, bank}));
    set.boundary_tag.push_back(true);
  }
  // bank curves at the declared resolution
  const double bank_step = options.resolution * 5.0;
  const int bank_count = static_cast<int>(std::floor(window.hi[0] / bank_step));
  for (int k = 0; k <= bank_count; ++k) {
    const double x = std::min(k * bank_step, window.hi[0]);
    set.samples.push_back(make_vec({x, 0.0}));
    set.boundary_tag.push_back(true);
    const double bank = removed ? gap : cusp_profile(x);
    if (bank > 0.0) {
      set.samples.push_back(make_vec({x, bank}));
      set.boundary_tag.push_back(true);
    }
  }
  // fine cluster on both banks: provides within-bank pairs at separations
  // well below the bank spacing, so small-t seminorms are never vacuous
  for (int k = 0; k <= 6; ++k) {
    const double x = 0.25 + 2e-5 * k;
    set.samples.push_back(make_vec({x, 0.0}));
    set.boundary_tag.push_back(true);
    const double bank = removed ? gap : cusp_profile(x);
    set.samples.push_back(make_vec({x, bank}));
    set.boundary_tag.push_back(true);
  }
  // interior grid
  for_grid(window, options.resolution, [&](const Vec& x) {
    if (set.interior(x)) {
      set.samples.push_back(x);
      set.boundary_tag.push_back(false);
    }
  });
  return set;
}

}  // namespace wkit
