#include <doctest.h>

#include <cmath>
#include <random>

#include "wkit/domain.hpp"
#include "wkit/errors.hpp"
#include "wkit/jet.hpp"
#include "wkit/random_fields.hpp"

using namespace wkit;

namespace {

// constant jet f^0 = c, higher orders zero
JetField constant_jet(double c, int order, int dimension, const std::vector<Vec>& points) {
  std::vector<std::vector<double>> values(
      points.size(),
      std::vector<double>(static_cast<size_t>(jet_coefficient_count(dimension, order)), 0.0));
  for (auto& row : values) row[0] = c;
  return JetField(order, dimension, points, std::move(values));
}

std::vector<Vec> grid_1d(std::initializer_list<double> xs) {
  std::vector<Vec> points;
  for (double x : xs) points.push_back(make_vec({x}));
  return points;
}

// jet of the counterexample function on the fjord banks; order m
JetField exp_cusp_jet(const std::vector<Vec>& points, int m, std::optional<double> gap) {
  ScalarField field;
  field.value = [gap](const Vec& p) { return exp_cusp_value(p, gap); };
  field.partial = [gap](const Vec& p, const MultiIndex& alpha) {
    return exp_cusp_partial(p, alpha.entries(), gap);
  };
  return jet_of_function(field, points, m);
}

}  // namespace

TEST_CASE("taylor_poly: constant jet") {
  const auto points = grid_1d({0.0, 0.5, 1.0});
  const auto jet = constant_jet(3.0, 2, 1, points);
  CHECK(taylor_poly(jet, make_vec({0.5}), 2, make_vec({0.9})) == doctest::Approx(3.0));
}

TEST_CASE("taylor_poly: linear polynomial reproduces itself") {
  // p(u, v) = u + 2v sampled exactly at order 1
  std::vector<Vec> points = {make_vec({0.0, 0.0}), make_vec({1.0, 0.5})};
  std::vector<std::vector<double>> values;
  for (const Vec& x : points) values.push_back({x[0] + 2.0 * x[1], 2.0, 1.0});  // graded: 00,01,10
  const JetField jet(1, 2, points, values);
  CHECK(taylor_poly(jet, make_vec({0.0, 0.0}), 1, make_vec({1.0, 1.0})) == doctest::Approx(3.0));
}

TEST_CASE("taylor_poly: p(u) = u^2 hand value") {
  // oracle: Tay_0^2 p (0.7) = p(0) + p'(0)*0.7 + p''(0)/2*0.49 = 0 + 0 + 0.49
  const auto points = grid_1d({0.0, 0.5, 1.0});
  std::vector<std::vector<double>> values;
  for (const Vec& x : points) values.push_back({x[0] * x[0], 2.0 * x[0], 2.0});
  const JetField jet(2, 1, points, values);
  CHECK(taylor_poly(jet, make_vec({0.0}), 2, make_vec({0.7})) == doctest::Approx(0.49));
}

TEST_CASE("taylor_poly errors") {
  const auto points = grid_1d({0.0, 1.0});
  const auto jet = constant_jet(1.0, 1, 1, points);
  CHECK_THROWS_AS(taylor_poly(jet, make_vec({0.25}), 1, make_vec({0.5})), MissingPointError);
  CHECK_THROWS_AS(taylor_poly(jet, make_vec({0.0}), 2, make_vec({0.5})), OrderError);
}

TEST_CASE("taylor_remainder: constant jet vanishes") {
  const auto points = grid_1d({0.0, 0.5, 1.0});
  const auto jet = constant_jet(-4.0, 2, 1, points);
  CHECK(taylor_remainder(jet, make_vec({0.0}), 2, MultiIndex::zero(1), make_vec({1.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("taylor_remainder: degree <= m polynomial jets vanish") {
  // oracle: polynomial of degree 2 carried by an order-2 jet has zero
  // remainder at every pair and every |alpha| <= 2
  const auto points = grid_1d({0.0, 0.3, 0.5, 0.8, 1.0});
  std::vector<std::vector<double>> values;
  for (const Vec& x : points) values.push_back({x[0] * x[0], 2.0 * x[0], 2.0});
  const JetField jet(2, 1, points, values);
  for (int i = 0; i < jet.point_count(); ++i) {
    for (int j = 0; j < jet.point_count(); ++j) {
      for (const MultiIndex& alpha : multi_indices_up_to(1, 2)) {
        CHECK(std::abs(taylor_remainder_at(jet, i, 2, alpha, j)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("taylor_remainder: exp-cusp fjord pair has |R|/|y-x| = 1") {
  const double a = 0.3;
  const double gap_height = std::exp(-1.0 / (a * a));
  std::vector<Vec> points = {make_vec({a, 0.0}), make_vec({a, gap_height})};
  const auto jet = exp_cusp_jet(points, 1, std::nullopt);
  const double r = taylor_remainder(jet, points[0], 1, MultiIndex::zero(2), points[1]);
  CHECK(r == doctest::Approx(gap_height).epsilon(1e-12));
  CHECK(std::abs(r) / gap_height == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("remainder identity: direct route equals shifted-jet route") {
  // (R_x^m f)^alpha = (R_x^{m-|a|} (f^{a+b})_b)^0 checked on a smooth jet
  auto rng = std::mt19937_64(7);
  const Polynomial poly = Polynomial::random(2, 3, rng);
  std::vector<Vec> points;
  for (int i = 0; i < 6; ++i)
    points.push_back(make_vec({0.13 * i - 0.2, 0.4 - 0.09 * i}));
  const auto jet = jet_of_function(poly.as_field(), points, 3);

  for (const MultiIndex& alpha : multi_indices_up_to(2, 2)) {
    const int m = 3;
    if (alpha.order() >= m) continue;
    // shifted jet: g^beta = f^{alpha+beta}
    const int sub = m - alpha.order();
    const auto betas = multi_indices_up_to(2, sub);
    std::vector<std::vector<double>> shifted_values;
    for (int p = 0; p < jet.point_count(); ++p) {
      std::vector<double> row;
      for (const MultiIndex& beta : betas) row.push_back(jet.value(p, alpha.plus(beta)));
      shifted_values.push_back(std::move(row));
    }
    const JetField shifted(sub, 2, points, shifted_values);
    for (int i = 0; i < jet.point_count(); ++i) {
      for (int j = 0; j < jet.point_count(); ++j) {
        const double direct = taylor_remainder_at(jet, i, m, alpha, j);
        const double via_shift =
            taylor_remainder_at(shifted, i, sub, MultiIndex::zero(2), j);
        CHECK(direct == doctest::Approx(via_shift).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("seminorm_abs") {
  const auto points = grid_1d({0.0, 0.5, 1.0});
  SUBCASE("zero jet") { CHECK(seminorm_abs(constant_jet(0.0, 2, 1, points), 2) == 0.0); }
  SUBCASE("constant jet -4") {
    CHECK(seminorm_abs(constant_jet(-4.0, 2, 1, points), 2) == doctest::Approx(4.0));
  }
  SUBCASE("u^2 jet has |f|_{2,K} = 2 from f'' and monotonicity in m") {
    std::vector<std::vector<double>> values;
    for (const Vec& x : points) values.push_back({x[0] * x[0], 2.0 * x[0], 2.0});
    const JetField jet(2, 1, points, values);
    CHECK(seminorm_abs(jet, 2) == doctest::Approx(2.0));
    CHECK(seminorm_abs(jet, 0) <= seminorm_abs(jet, 1));
    CHECK(seminorm_abs(jet, 1) <= seminorm_abs(jet, 2));
  }
}

TEST_CASE("q_seminorm: polynomial jets vanish, q is monotone in t") {
  auto rng = std::mt19937_64(21);
  const Polynomial poly = Polynomial::random(2, 2, rng);
  std::vector<Vec> points;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) points.push_back(make_vec({0.2 * i, 0.2 * j}));
  const auto jet = jet_of_function(poly.as_field(), points, 2);
  CHECK(q_seminorm(jet, 2, 1.0) <= 1e-10);
  CHECK(q_seminorm(jet, 2, 0.5) <= q_seminorm(jet, 2, 1.0) + 1e-15);

  const auto nonpoly = jet_of_function(
      ScalarField{[](const Vec& x) { return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]); },
                  nullptr},
      points, 1);
  double prev = 0.0;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const double q = q_seminorm(nonpoly, 1, t);
    CHECK(q >= prev - 1e-15);
    prev = q;
  }
}

TEST_CASE("q_seminorm argument checks") {
  const auto jet = constant_jet(1.0, 1, 1, grid_1d({0.0, 1.0}));
  CHECK_THROWS_AS(q_seminorm(jet, 1, 0.0), ArgumentError);
  CHECK_THROWS_AS(q_seminorm(jet, 1, -1.0), ArgumentError);
}

TEST_CASE("q_seminorm: exp-cusp jet stays at 1 along the fjord") {
  std::vector<Vec> points;
  for (int k = 0; k < 12; ++k) {
    const double x = 0.15 + 0.015 * k;
    points.push_back(make_vec({x, 0.0}));
    points.push_back(make_vec({x, std::exp(-1.0 / (x * x))}));
  }
  const auto jet = exp_cusp_jet(points, 1, std::nullopt);
  for (double t : {1e-2, 1e-4, 1e-8}) {
    CHECK(q_seminorm(jet, 1, t) >= 1.0 - 1e-6);
  }
}

TEST_CASE("seminorm report invariants") {
  std::vector<Vec> points;
  for (int i = 0; i < 6; ++i) points.push_back(make_vec({0.17 * i, 0.11 * i}));
  const auto jet = jet_of_function(
      ScalarField{[](const Vec& x) { return std::exp(x[0]) * x[1]; }, nullptr}, points, 1);
  const auto report = seminorm_report(jet, 1, {1.0, 0.5, 0.1});
  CHECK(report.abs >= 0.0);
  for (size_t g = 0; g + 1 < report.q_values.size(); ++g) {
    CHECK(report.q_values[g].q >= report.q_values[g + 1].q - 1e-15);
  }
  double qmax = 0.0;
  for (const auto& qv : report.q_values) qmax = std::max(qmax, qv.q);
  CHECK(report.whitney_norm == doctest::Approx(report.abs + qmax));
}

TEST_CASE("whitney_jet_check verdicts") {
  SUBCASE("zero jet passes") {
    std::vector<Vec> points;
    for (int i = 0; i <= 20; ++i) points.push_back(make_vec({0.05 * i}));
    const auto jet = constant_jet(0.0, 1, 1, points);
    const auto verdict = whitney_jet_check(jet, 1, {1e-1, 1e-2, 1e-3}, 1e-9);
    CHECK(verdict.pass);
  }
  SUBCASE("polynomial jet passes with tight tolerance") {
    auto rng = std::mt19937_64(3);
    const Polynomial poly = Polynomial::random(1, 3, rng);
    std::vector<Vec> points;
    for (int i = 0; i <= 400; ++i) points.push_back(make_vec({0.0025 * i}));
    const auto jet = jet_of_function(poly.as_field(), points, 3);
    const auto verdict = whitney_jet_check(jet, 3, {1e-1, 1e-2, 1e-3}, 1e-9);
    CHECK(verdict.pass);
  }
  SUBCASE("exp-cusp jet fails with a fjord witness at ratio 1") {
    std::vector<Vec> points;
    for (int k = 0; k < 12; ++k) {
      const double x = 0.12 + 0.015 * k;
      points.push_back(make_vec({x, 0.0}));
      points.push_back(make_vec({x, std::exp(-1.0 / (x * x))}));
    }
    const auto jet = exp_cusp_jet(points, 1, std::nullopt);
    const auto verdict = whitney_jet_check(jet, 1, {1e-1, 1e-3, 1e-5}, 0.5);
    REQUIRE_FALSE(verdict.pass);
    REQUIRE(verdict.witness.has_value());
    CHECK(verdict.witness->ratio == doctest::Approx(1.0).epsilon(1e-6));
    // the witness pair straddles the fjord: same x, banks apart
    const Vec wx = jet.point(verdict.witness->x_index);
    const Vec wy = jet.point(verdict.witness->y_index);
    CHECK(wx[0] == doctest::Approx(wy[0]));
  }
  SUBCASE("insufficient grid is a configuration error") {
    const auto jet = constant_jet(0.0, 1, 1, grid_1d({0.0, 0.4, 1.0}));
    CHECK_THROWS_AS(whitney_jet_check(jet, 1, {1e-1, 1e-2}, 0.5), ConfigError);
    CHECK_THROWS_AS(whitney_jet_check(jet, 1, {1e-1, 5e-2, 2e-2}, 0.5), ConfigError);
    CHECK_THROWS_AS(whitney_jet_check(jet, 1, {1e-3, 1e-2, 1e-1}, 0.5), ConfigError);
  }
}

TEST_CASE("jet_of_function") {
  SUBCASE("zero function gives the zero jet") {
    const auto jet = jet_of_function(ScalarField{[](const Vec&) { return 0.0; }, nullptr},
                                     grid_1d({0.0, 1.0}), 2);
    for (int p = 0; p < jet.point_count(); ++p) {
      for (size_t k = 0; k < jet.index_set().size(); ++k) {
        CHECK(jet.value(p, static_cast<int>(k)) == doctest::Approx(0.0).epsilon(1e-10));
      }
    }
  }
  SUBCASE("linear function u + 2v") {
    std::vector<Vec> points = {make_vec({0.2, 0.7}), make_vec({-0.4, 0.1})};
    const auto jet = jet_of_function(
        ScalarField{[](const Vec& x) { return x[0] + 2.0 * x[1]; }, nullptr}, points, 1);
    for (int p = 0; p < 2; ++p) {
      CHECK(jet.value(p, MultiIndex({1, 0})) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(jet.value(p, MultiIndex({0, 1})) == doctest::Approx(2.0).epsilon(1e-9));
    }
  }
  SUBCASE("sin at {0, pi/2} with closed-form partials") {
    ScalarField field;
    field.value = [](const Vec& x) { return std::sin(x[0]); };
    field.partial = [](const Vec& x, const MultiIndex& alpha) {
      switch (alpha.order() % 4) {
        case 0: return std::sin(x[0]);
        case 1: return std::cos(x[0]);
        case 2: return -std::sin(x[0]);
        default: return -std::cos(x[0]);
      }
    };
    const auto jet = jet_of_function(field, grid_1d({0.0, 1.5707963267948966}), 1);
    CHECK(jet.value(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(jet.value(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jet.value(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jet.value(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("stencil leaving the membership oracle is reported") {
    ScalarField field{[](const Vec& x) { return x[0] * x[0]; }, nullptr};
    JetOfFunctionOptions options;
    options.membership = [](const Vec& x) { return x[0] >= 0.0; };
    CHECK_THROWS_AS(jet_of_function(field, grid_1d({0.0}), 1, options), StencilError);
  }
}

TEST_CASE("linearity of taylor_poly over jets") {
  auto rng = std::mt19937_64(11);
  const Polynomial pf = Polynomial::random(2, 3, rng);
  const Polynomial pg = Polynomial::random(2, 3, rng);
  std::vector<Vec> points;
  for (int i = 0; i < 5; ++i) points.push_back(make_vec({0.3 * i - 0.6, 0.2 * i}));
  const auto f = jet_of_function(pf.as_field(), points, 3);
  const auto g = jet_of_function(pg.as_field(), points, 3);
  const double a = 2.5, b = -1.25;
  const auto combo = JetField::linear_combination(a, f, b, g);
  const Vec y = make_vec({0.35, -0.2});
  for (int p = 0; p < f.point_count(); ++p) {
    const double lhs = taylor_poly_at(combo, p, 3, y);
    const double rhs = a * taylor_poly_at(f, p, 3, y) + b * taylor_poly_at(g, p, 3, y);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
