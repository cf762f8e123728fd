#include <doctest.h>

#include <random>

#include "wkit/jet.hpp"
#include "wkit/random_fields.hpp"

using namespace wkit;

namespace {

JetField random_jet(std::mt19937_64& rng, int dimension, int order, int n_points) {
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  std::vector<Vec> points;
  std::vector<std::vector<double>> values;
  const auto count = static_cast<size_t>(jet_coefficient_count(dimension, order));
  for (int p = 0; p < n_points; ++p) {
    Vec x(dimension);
    for (int i = 0; i < dimension; ++i) x[i] = unif(rng) * std::pow(10.0, p % 5 - 2);
    points.push_back(x);
    std::vector<double> row(count);
    for (auto& v : row) v = unif(rng) * std::pow(10.0, p % 7 - 3);
    values.push_back(std::move(row));
  }
  return JetField(order, dimension, std::move(points), std::move(values));
}

bool bit_equal(const JetField& a, const JetField& b) {
  if (a.order() != b.order() || a.dimension() != b.dimension() ||
      a.point_count() != b.point_count())
    return false;
  for (int p = 0; p < a.point_count(); ++p) {
    if ((a.point(p) - b.point(p)).lpNorm<Eigen::Infinity>() != 0.0) return false;
    for (size_t k = 0; k < a.index_set().size(); ++k) {
      if (a.value(p, static_cast<int>(k)) != b.value(p, static_cast<int>(k))) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("text round trip is bit exact over random jets") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    const int m = trial % 4;
    const auto jet = random_jet(rng, d, m, 3 + trial % 5);
    CHECK(bit_equal(jet, jet_from_text(to_text(jet))));
  }
}

TEST_CASE("json round trip is bit exact over random jets") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 2;
    const int m = trial % 4;
    const auto jet = random_jet(rng, d, m, 2 + trial % 6);
    CHECK(bit_equal(jet, jet_from_json_string(to_json_string(jet))));
  }
}

TEST_CASE("text format is line oriented with the pipe separator") {
  std::vector<Vec> points = {make_vec({0.5, -1.0})};
  const JetField jet(0, 2, points, {{3.0}});
  const std::string text = to_text(jet);
  CHECK(text.find("0.5 -1 | 0,0: 3") != std::string::npos);
}
