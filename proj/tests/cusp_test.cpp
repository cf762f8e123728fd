#include <doctest.h>

#include <cmath>

#include "wkit/cusp.hpp"
#include "wkit/domain.hpp"
#include "wkit/errors.hpp"

using namespace wkit;

TEST_CASE("check_outward_cusps: half-space certificate and replay") {
  // hand-geometry oracle: x = z + (eps/2) e_1 satisfies both inclusions
  // exactly, so the sampled search succeeds whenever eps/2 lies on the
  // interior sampling pitch
  const auto set = half_space(2, 1e-2);
  std::vector<Vec> K;
  for (const Vec& b : set.boundary_samples()) {
    if (std::abs(b[1]) <= 0.5 && K.size() < 12) K.push_back(b);
  }
  const auto result = check_outward_cusps(set, K, 0.5, 0.5, 1.0, {0.32, 0.16}, 128);
  REQUIRE(result.ok);
  REQUIRE(result.certificate.has_value());
  CHECK(result.certificate->witnesses.size() == K.size() * 2);
  CHECK(replay_cusp_certificate(set, *result.certificate));
}

TEST_CASE("check_outward_cusps: vacuous when no boundary points are given") {
  const auto set = half_space(2, 2e-2);
  const auto result = check_outward_cusps(set, {}, 0.5, 0.5, 1.0, {0.3}, 128);
  REQUIRE(result.ok);
  CHECK(result.certificate->vacuous);
}

TEST_CASE("check_outward_cusps: outward cusps fine on the fjord banks") {
  // the pathology of the exp-cusp set is inward; outward corkscrew balls
  // exist near the banks
  const auto set = exp_cusp_domain({});
  std::vector<Vec> K;
  for (double x = 0.2; x <= 0.42; x += 0.04) K.push_back(make_vec({x, 0.0}));
  const auto result = check_outward_cusps(set, K, 0.08, 0.4, 1.0, {0.05, 0.025}, 128);
  REQUIRE(result.ok);
  CHECK(replay_cusp_certificate(set, *result.certificate));
}

TEST_CASE("check_outward_cusps rejects bad input") {
  const auto set = half_space(2, 2e-2);
  CHECK_THROWS_AS(check_outward_cusps(set, {}, 0.5, 0.5, 1.0, {0.3}, 10), ArgumentError);
  CHECK_THROWS_AS(check_outward_cusps(set, {}, 0.5, 0.5, 1.0, {0.7}, 128), ArgumentError);
}

TEST_CASE("check_no_narrow_fjords: closed unit disk with p=1, D=1/pi") {
  const auto set = closed_ball(2, 1.0, 2e-2);
  // worst pair is antipodal; interior chords at fine resolution keep
  // length(path) <= pi * d(x,y) / 2
  std::vector<Vec> K;
  for (int k = 0; k < 12; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 12.0;
    K.push_back(make_vec({std::cos(a), std::sin(a)}));
  }
  const auto result = check_no_narrow_fjords(set, make_vec({0.0, 0.0}), 1, 1.0 / std::numbers::pi,
                                             K, 100);
  REQUIRE(result.ok);
  CHECK(result.certificate->paths.size() == 12 * 11 / 2);
  for (const auto& path : result.certificate->paths) {
    CHECK(path.distance >= (1.0 / std::numbers::pi) * path.length);
    // all interior vertices of the recorded path lie in the interior
    for (size_t v = 1; v + 1 < path.vertices.size(); ++v) {
      CHECK(set.interior(path.vertices[v]));
    }
  }
}

TEST_CASE("check_no_narrow_fjords: convex square passes with p=1") {
  const std::vector<Vec> square = {make_vec({0.0, 0.0}), make_vec({1.0, 0.0}),
                                   make_vec({1.0, 1.0}), make_vec({0.0, 1.0})};
  const auto set = convex_polytope(square, 2e-2);
  std::vector<Vec> K = {make_vec({0.0, 0.0}), make_vec({1.0, 1.0}), make_vec({1.0, 0.0}),
                        make_vec({0.5, 0.0}), make_vec({0.0, 1.0})};
  const auto result = check_no_narrow_fjords(set, make_vec({0.5, 0.5}), 1, 0.85, K, 100);
  REQUIRE(result.ok);
}

TEST_CASE("check_no_narrow_fjords: exp-cusp fjord pairs violate for p <= 6") {
  ExpCuspOptions options;
  options.resolution = 2e-3;  // keeps this unit test quick; acceptance runs 1e-3
  const auto set = exp_cusp_domain(options);
  for (int p = 1; p <= 6; ++p) {
    std::vector<std::pair<Vec, Vec>> pairs;
    const double x = 0.12;
    pairs.push_back({make_vec({x, 0.0}), make_vec({x, std::exp(-1.0 / (x * x))})});
    const auto result =
        check_no_narrow_fjords_pairs(set, make_vec({0.0, 0.0}), p, 1e-6, pairs);
    REQUIRE_FALSE(result.ok);
    REQUIRE(result.violation.has_value());
    CHECK_FALSE(result.violation->disconnected);
    // the interior path must round the fjord tip, so its length stays
    // macroscopic while the pair distance is exp(-1/x^2)
    CHECK(result.violation->best_length > 0.2);
    CHECK(result.violation->distance < 1e-20);
  }
}

TEST_CASE("normalize_constants reproduces the hand-derived triples") {
  SUBCASE("(0.5, 1, 2) -> (0.5, 1, 3)") {
    const auto n = normalize_constants(0.5, 1.0, 2.0);
    CHECK(n.epsilon0 == doctest::Approx(0.5));
    CHECK(n.rho == 1.0);
    CHECK(n.r == 3.0);
  }
  SUBCASE("(2, 2, 1) -> (0.99, 1, 2)") {
    const auto n = normalize_constants(2.0, 2.0, 1.0);
    CHECK(n.epsilon0 == doctest::Approx(0.99));
    CHECK(n.r == 2.0);
  }
  SUBCASE("(0.1, 0.1, 1) -> (0.1, 1, 2)") {
    const auto n = normalize_constants(0.1, 0.1, 1.0);
    CHECK(n.epsilon0 == doctest::Approx(0.1));
    CHECK(n.r == 2.0);
  }
  SUBCASE("output dominates rho * eps^r over a 100-point sweep") {
    for (const auto& [e0, rho, r] :
         std::vector<std::tuple<double, double, double>>{{0.5, 1.0, 2.0},
                                                         {2.0, 2.0, 1.0},
                                                         {0.1, 0.1, 1.0},
                                                         {0.7, 0.3, 3.0}}) {
      const auto n = normalize_constants(e0, rho, r);
      CHECK(n.rho == 1.0);
      CHECK(n.r >= 2.0);
      for (int k = 1; k <= 100; ++k) {
        const double eps = n.epsilon0 * k / 100.0;
        CHECK(std::pow(eps, n.r) <= rho * std::pow(eps, r) * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("transfer_cusp_constants") {
  SUBCASE("identity metric is the identity up to the 1/2 cap") {
    const auto out = transfer_cusp_constants({0.3, 1.0, 2.0}, 1.0, 1.0);
    CHECK(out.epsilon0 == doctest::Approx(0.3));
    CHECK(out.rho == doctest::Approx(1.0));
    CHECK(out.r == 2.0);
    const auto capped = transfer_cusp_constants({0.9, 1.0, 2.0}, 1.0, 1.0);
    CHECK(capped.epsilon0 == doctest::Approx(0.5));
    CHECK(capped.r == 2.0);
  }
  SUBCASE("hand-derived example: C=2, alpha=1, (0.25, 1, 2)") {
    const auto out = transfer_cusp_constants({0.25, 1.0, 2.0}, 2.0, 1.0);
    CHECK(out.epsilon0 == doctest::Approx(0.5));
    CHECK(out.rho == doctest::Approx(0.125));
    CHECK(out.r == 2.0);
  }
  SUBCASE("hand-derived example: C=1, alpha=1/2, r1=2 gives r2 >= 8, rho = 1") {
    const auto out = transfer_cusp_constants({0.3, 1.0, 2.0}, 1.0, 0.5);
    CHECK(out.rho == doctest::Approx(1.0));
    CHECK(out.r >= 8.0);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(transfer_cusp_constants({0.3, 1.0, 2.0}, 0.5, 1.0), ArgumentError);
    CHECK_THROWS_AS(transfer_cusp_constants({0.3, 1.0, 2.0}, 1.0, 1.5), ArgumentError);
    CHECK_THROWS_AS(transfer_cusp_constants({0.3, 2.0, 2.0}, 1.0, 1.0), ArgumentError);
  }
}

TEST_CASE("graph_geodesic_metric") {
  SUBCASE("1d constant tensor 4 gives length 2 across the unit interval") {
    std::vector<Vec> grid;
    const double h = 0.01;
    for (int k = 0; k <= 100; ++k) grid.push_back(make_vec({k * h}));
    GraphGeodesicMetric metric(grid, [](const Vec&) { return 4.0 * Mat::Identity(1, 1); }, h);
    CHECK(metric(make_vec({0.0}), make_vec({1.0})) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(metric(make_vec({0.3}), make_vec({0.3})) == 0.0);
  }
  SUBCASE("identity tensor keeps grid-path distortion below sqrt(2)") {
    std::vector<Vec> grid;
    const double h = 0.05;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) grid.push_back(make_vec({i * h, j * h}));
    GraphGeodesicMetric metric(grid, [](const Vec&) { return Mat::Identity(2, 2); }, h);
    const Vec a = make_vec({0.0, 0.0});
    for (const Vec& b : {make_vec({1.0, 0.35}), make_vec({0.6, 1.0}), make_vec({1.0, 1.0})}) {
      const double d = metric(a, b);
      CHECK(d >= (a - b).norm() - 1e-12);
      CHECK(d <= std::numbers::sqrt2 * (a - b).norm() + 1e-12);
    }
  }
  SUBCASE("symmetry and triangle inequality by construction") {
    std::vector<Vec> grid;
    const double h = 0.1;
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j) grid.push_back(make_vec({i * h, j * h}));
    GraphGeodesicMetric metric(
        grid, [](const Vec& x) { return (1.0 + x[0]) * Mat::Identity(2, 2); }, h);
    const Vec a = make_vec({0.0, 0.0}), b = make_vec({1.0, 0.5}), c = make_vec({0.5, 1.0});
    CHECK(metric(a, b) == doctest::Approx(metric(b, a)));
    CHECK(metric(a, b) <= metric(a, c) + metric(c, b) + 1e-12);
  }
  SUBCASE("non-SPD tensor is a geometry error naming the node") {
    std::vector<Vec> grid = {make_vec({0.0}), make_vec({1.0})};
    Mat bad = -Mat::Identity(1, 1);
    CHECK_THROWS_AS(GraphGeodesicMetric(grid, [bad](const Vec&) { return bad; }, 1.0),
                    GeometryError);
  }
}
