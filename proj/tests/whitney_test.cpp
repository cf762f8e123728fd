#include <doctest.h>

#include <cmath>
#include <random>

#include "wkit/domain.hpp"
#include "wkit/errors.hpp"
#include "wkit/random_fields.hpp"
#include "wkit/whitney.hpp"

using namespace wkit;

namespace {

SampledClosedSet lower_half_space_2d() {
  // {u <= 0} with samples along the face u = 0 and an interior grid
  SampledClosedSet set;
  set.name = "lower_half_space";
  set.dimension = 2;
  set.resolution = 2e-2;
  set.membership = [](const Vec& x) { return x[0] <= 0.0; };
  set.interior = [](const Vec& x) { return x[0] < -1e-9; };
  set.bounding_box = make_box({-1.0, -1.0}, {1.0, 1.0});
  for (double v = -1.0; v <= 1.0 + 1e-12; v += 2e-2) {
    set.samples.push_back(make_vec({0.0, v}));
    set.boundary_tag.push_back(true);
  }
  for (double u = -1.0; u <= -2e-2 + 1e-12; u += 2e-2) {
    for (double v = -1.0; v <= 1.0 + 1e-12; v += 2e-2) {
      set.samples.push_back(make_vec({u, v}));
      set.boundary_tag.push_back(false);
    }
  }
  return set;
}

std::vector<Vec> complement_probes(const SampledClosedSet& set, const Box& box, int count,
                                   double max_dist, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vec> probes;
  std::vector<Vec> samples = set.samples;
  while (static_cast<int>(probes.size()) < count) {
    Vec x(box.dimension());
    for (int i = 0; i < box.dimension(); ++i)
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unif(rng);
    if (set.membership(x)) continue;
    double dist = 1e300;
    for (const Vec& s : samples) dist = std::min(dist, (s - x).norm());
    if (dist > max_dist || dist < 1e-6) continue;
    probes.push_back(x);
  }
  return probes;
}

}  // namespace

TEST_CASE("whitney_decompose") {
  SUBCASE("half-space {u <= 0}: proximity invariant holds on every cube") {
    const auto set = lower_half_space_2d();
    const Box box = make_box({0.0, 0.0}, {1.0, 1.0});
    const auto decomp = whitney_decompose(set, box, 1.0 / 256.0, 0.25);
    REQUIRE_FALSE(decomp.cubes.empty());
    const double root2 = std::numbers::sqrt2;
    for (const auto& cube : decomp.cubes) {
      double dist = 1e300;
      for (const Vec& s : set.samples) dist = std::min(dist, (s - cube.center).norm());
      CHECK(dist >= cube.side * root2 - 1e-12);
      CHECK(dist <= 6.0 * cube.side * root2 + 1e-12);
      // anchor optimality
      const Vec& anchor = set.samples[static_cast<size_t>(cube.anchor)];
      CHECK((anchor - cube.center).norm() == doctest::Approx(dist));
    }
    // sides halve toward the boundary u = 0
    double min_side_seen = 1.0, max_side_seen = 0.0;
    for (const auto& cube : decomp.cubes) {
      min_side_seen = std::min(min_side_seen, cube.side);
      max_side_seen = std::max(max_side_seen, cube.side);
    }
    CHECK(min_side_seen < max_side_seen);
  }

  SUBCASE("C covering the whole box gives the empty decomposition") {
    SampledClosedSet everything;
    everything.name = "everything";
    everything.dimension = 2;
    everything.resolution = 0.1;
    everything.membership = [](const Vec&) { return true; };
    everything.interior = [](const Vec&) { return true; };
    everything.bounding_box = make_box({0.0, 0.0}, {1.0, 1.0});
    for (double u = 0.05; u < 1.0; u += 0.1) {
      for (double v = 0.05; v < 1.0; v += 0.1) {
        everything.samples.push_back(make_vec({u, v}));
        everything.boundary_tag.push_back(false);
      }
    }
    const auto decomp = whitney_decompose(everything, everything.bounding_box, 0.01, 0.25);
    CHECK(decomp.cubes.empty());
  }

  SUBCASE("single point at the origin: dyadic shrink toward it") {
    SampledClosedSet point;
    point.name = "point";
    point.dimension = 2;
    point.resolution = 0.1;
    point.membership = [](const Vec& x) { return x.norm() <= 1e-12; };
    point.interior = [](const Vec&) { return false; };
    point.bounding_box = make_box({-1.0, -1.0}, {1.0, 1.0});
    point.samples.push_back(make_vec({0.0, 0.0}));
    point.boundary_tag.push_back(true);

    const auto d1 = whitney_decompose(point, point.bounding_box, 1.0 / 64.0, 0.5);
    const auto d2 = whitney_decompose(point, point.bounding_box, 1.0 / 256.0, 0.5);
    // count grows ~ log(1/min_side): two extra dyadic levels add a bounded
    // number of cubes per level
    CHECK(d2.cubes.size() > d1.cubes.size());
    CHECK(d2.cubes.size() - d1.cubes.size() < 3 * (d1.cubes.size() + 8));
    const double root2 = std::numbers::sqrt2;
    for (const auto& cube : d2.cubes) {
      const double dist = cube.center.norm();
      CHECK(dist >= cube.side * root2 - 1e-12);
      CHECK(dist <= 6.0 * cube.side * root2 + 1e-12);
    }
  }

  SUBCASE("argument and budget errors") {
    const auto set = lower_half_space_2d();
    CHECK_THROWS_AS(whitney_decompose(set, set.bounding_box, 0.5, 0.25), ArgumentError);
    WhitneyDecomposeOptions tiny;
    tiny.cube_budget = 4;
    CHECK_THROWS_AS(
        whitney_decompose(set, make_box({0.0, 0.0}, {1.0, 1.0}), 1.0 / 512.0, 0.25, tiny),
        SizeError);
  }
}

TEST_CASE("bump partition sums to one on the covered region") {
  const auto set = lower_half_space_2d();
  const Box box = make_box({0.0, 0.0}, {1.0, 1.0});
  const auto decomp = whitney_decompose(set, box, 1.0 / 128.0, 0.25);
  BumpSystem bumps;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    Vec x = make_vec({unif(rng), unif(rng)});
    if (x[0] < 2.0 / 128.0) continue;  // stay clear of the uncovered sliver
    double raw_sum = 0.0;
    for (const auto& cube : decomp.cubes) raw_sum += bumps.raw(cube, x);
    REQUIRE(raw_sum > 0.0);  // covered; normalized sum is 1 by construction
    ++checked;
  }
}

TEST_CASE("extend_jet basics") {
  const auto set = lower_half_space_2d();
  const Box box = make_box({-1.0, -1.0}, {1.0, 1.0});
  const auto decomp = whitney_decompose(set, box, 1.0 / 128.0, 0.5);

  SUBCASE("zero jet extends to zero") {
    const auto jet = jet_of_function(ScalarField{[](const Vec&) { return 0.0; }, nullptr},
                                     set.samples, 1);
    const auto ext = extend_jet(jet, decomp, set);
    CHECK(ext(make_vec({0.5, 0.5})) == 0.0);
    CHECK(ext(make_vec({-0.5, 0.25})) == 0.0);
  }

  SUBCASE("domain error outside box and off C") {
    const auto jet = jet_of_function(ScalarField{[](const Vec&) { return 0.0; }, nullptr},
                                     set.samples, 1);
    const auto ext = extend_jet(jet, decomp, set);
    CHECK_THROWS_AS(ext(make_vec({2.0, 0.0})), DomainError);
    CHECK(ext(make_vec({-2.0, 0.0})) == 0.0);  // in C: membership branch applies
  }

  SUBCASE("restriction identity is exact at samples") {
    std::mt19937_64 rng(31);
    const auto poly = Polynomial::random(2, 2, rng);
    const auto jet = jet_of_function(poly.as_field(), set.samples, 2);
    const auto ext = extend_jet(jet, decomp, set);
    for (int p = 0; p < jet.point_count(); p += 7) {
      CHECK(ext(jet.point(p)) == jet.value(p, 0));
    }
  }

  SUBCASE("refuses a jet that fails the Whitney check, carrying the witness") {
    std::vector<Vec> points;
    for (int k = 0; k < 10; ++k) {
      const double x = 0.12 + 0.02 * k;
      points.push_back(make_vec({x, 0.0}));
      points.push_back(make_vec({x, std::exp(-1.0 / (x * x))}));
    }
    // jet values of the counterexample, placed on a set shell
    std::vector<std::vector<double>> values;
    for (const Vec& p : points) {
      values.push_back({exp_cusp_value(p), 0.0, exp_cusp_partial(p, {1, 0})});
    }
    const JetField jet(1, 2, points, values);
    SampledClosedSet carrier = exp_cusp_domain({});
    WhitneyExtensionOptions options;
    options.check_tol = 0.5;
    options.check_t_grid = {1e-1, 1e-3, 1e-5};
    const auto decomp2 =
        whitney_decompose(carrier, carrier.bounding_box, 1.0 / 64.0, 0.1625);
    CHECK_THROWS_AS(extend_jet(jet, decomp2, carrier, options), WhitneyCheckError);
  }
}

TEST_CASE("polynomial reproduction on the closed unit disk") {
  const auto disk = closed_ball(2, 1.0, 2e-2);
  const Box box = make_box({-1.6, -1.6}, {1.6, 1.6});
  const auto decomp = whitney_decompose(disk, box, 1.0 / 128.0, 0.8);
  std::mt19937_64 rng(77);

  // p(u,v) = 1 + u - v reproduced at order 1
  std::map<std::vector<int>, double> coeffs{{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{0, 1}, -1.0}};
  const Polynomial p(2, coeffs);
  const auto jet = jet_of_function(p.as_field(), disk.samples, 1);
  const auto ext = extend_jet(jet, decomp, disk);
  const auto probes = complement_probes(disk, box, 300, 0.5, rng);
  double worst = 0.0;
  for (const Vec& x : probes) worst = std::max(worst, std::abs(ext(x) - p(x)));
  CHECK(worst <= 5e-3);
}

TEST_CASE("extension operator is linear in the jet") {
  const auto set = lower_half_space_2d();
  const Box box = make_box({-1.0, -1.0}, {1.0, 1.0});
  const auto decomp = whitney_decompose(set, box, 1.0 / 128.0, 0.5);
  std::mt19937_64 rng(13);
  const auto probes = complement_probes(set, box, 60, 0.6, rng);

  for (int trial = 0; trial < 5; ++trial) {
    const auto pf = Polynomial::random(2, 2, rng);
    const auto pg = Polynomial::random(2, 2, rng);
    const auto f = jet_of_function(pf.as_field(), set.samples, 2);
    const auto g = jet_of_function(pg.as_field(), set.samples, 2);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const double a = unif(rng), b = unif(rng);
    const auto combo = JetField::linear_combination(a, f, b, g);

    const auto ext_f = extend_jet(f, decomp, set);
    const auto ext_g = extend_jet(g, decomp, set);
    const auto ext_combo = extend_jet(combo, decomp, set);
    for (const Vec& x : probes) {
      const double lhs = ext_combo(x);
      const double rhs = a * ext_f(x) + b * ext_g(x);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("locality: far-away jet values do not move Ef(x)") {
  const auto set = lower_half_space_2d();
  const Box box = make_box({-1.0, -1.0}, {1.0, 1.0});
  const auto decomp = whitney_decompose(set, box, 1.0 / 128.0, 0.5);
  std::mt19937_64 rng(17);
  const auto poly = Polynomial::random(2, 2, rng);
  const auto jet = jet_of_function(poly.as_field(), set.samples, 2);
  const auto ext = extend_jet(jet, decomp, set);

  const Vec x = make_vec({0.04, 0.1});
  double dist = 1e300;
  int nearest = -1;
  for (int p = 0; p < jet.point_count(); ++p) {
    const double d = (jet.point(p) - x).norm();
    if (d < dist) {
      dist = d;
      nearest = p;
    }
  }
  const Vec anchor = jet.point(nearest);

  // perturb all samples farther than 10*dist(x, C) from the nearest anchor
  std::vector<std::vector<double>> perturbed;
  for (int p = 0; p < jet.point_count(); ++p) {
    auto row = jet.values_at(p);
    if ((jet.point(p) - anchor).norm() > 10.0 * dist) {
      for (auto& v : row) v += 100.0;
    }
    perturbed.push_back(std::move(row));
  }
  const JetField moved(jet.order(), 2, jet.points(), perturbed);
  const auto ext_moved = extend_jet(moved, decomp, set);
  CHECK(ext(x) == ext_moved(x));
}

TEST_CASE("refinement stability: halving min_side barely moves Ef") {
  const auto set = lower_half_space_2d();
  const Box box = make_box({-1.0, -1.0}, {1.0, 1.0});
  ScalarField field;
  field.value = [](const Vec& x) { return std::sin(x[0]) * std::cos(x[1]); };
  field.partial = [](const Vec& x, const MultiIndex& alpha) {
    const double du = (alpha[0] % 4 == 0)   ? std::sin(x[0])
                      : (alpha[0] % 4 == 1) ? std::cos(x[0])
                      : (alpha[0] % 4 == 2) ? -std::sin(x[0])
                                            : -std::cos(x[0]);
    const double dv = (alpha[1] % 4 == 0)   ? std::cos(x[1])
                      : (alpha[1] % 4 == 1) ? -std::sin(x[1])
                      : (alpha[1] % 4 == 2) ? -std::cos(x[1])
                                            : std::sin(x[1]);
    return du * dv;
  };
  const auto jet = jet_of_function(field, set.samples, 3);
  const auto coarse = extend_jet(jet, whitney_decompose(set, box, 1.0 / 64.0, 0.5), set);
  const auto fine = extend_jet(jet, whitney_decompose(set, box, 1.0 / 128.0, 0.5), set);
  std::mt19937_64 rng(23);
  for (const Vec& x : complement_probes(set, box, 80, 0.4, rng)) {
    CHECK(std::abs(coarse(x) - fine(x)) <= 5e-3);
  }
}

TEST_CASE("verify_jet_agreement") {
  const auto set = lower_half_space_2d();
  const Box box = make_box({-1.0, -1.0}, {1.0, 1.0});
  const auto decomp = whitney_decompose(set, box, 1.0 / 128.0, 0.5);

  SUBCASE("zero jet reports zero discrepancies") {
    const auto jet = jet_of_function(ScalarField{[](const Vec&) { return 0.0; }, nullptr},
                                     set.samples, 2);
    const auto ext = extend_jet(jet, decomp, set);
    const auto report = verify_jet_agreement(ext, {}, 2);
    CHECK(report.max_discrepancy == 0.0);
  }

  SUBCASE("order-2 polynomial jet: discrepancies below 1e-6 at h = 1e-4") {
    std::mt19937_64 rng(41);
    const auto poly = Polynomial::random(2, 2, rng);
    const auto jet = jet_of_function(poly.as_field(), set.samples, 2);
    const auto ext = extend_jet(jet, decomp, set);
    const auto probes = complement_probes(set, box, 150, 0.3, rng);
    const auto report = verify_jet_agreement(ext, probes, 2, 1e-4);
    CHECK(report.max_discrepancy <= 1e-6);
  }
}
