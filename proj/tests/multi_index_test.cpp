#include <doctest.h>

#include "wkit/errors.hpp"
#include "wkit/multi_index.hpp"

using namespace wkit;

TEST_CASE("order and factorial") {
  MultiIndex a({2, 0, 1});
  CHECK(a.order() == 3);
  CHECK(a.factorial() == doctest::Approx(2.0));
  CHECK(MultiIndex({3, 2}).factorial() == doctest::Approx(12.0));
  CHECK(MultiIndex::zero(4).order() == 0);
  CHECK(MultiIndex::zero(4).factorial() == doctest::Approx(1.0));
}

TEST_CASE("entries must be non-negative") {
  CHECK_THROWS_AS(MultiIndex({1, -1}), ArgumentError);
}

TEST_CASE("monomial powers") {
  MultiIndex a({2, 1});
  CHECK(a.monomial(make_vec({3.0, 5.0})) == doctest::Approx(45.0));
  CHECK(MultiIndex::zero(2).monomial(make_vec({3.0, 5.0})) == doctest::Approx(1.0));
}

TEST_CASE("enumeration is graded lexicographic and complete") {
  const auto all = multi_indices_up_to(2, 2);
  REQUIRE(all.size() == 6);  // C(4,2)
  CHECK(all[0].entries() == std::vector<int>{0, 0});
  CHECK(all[1].entries() == std::vector<int>{0, 1});
  CHECK(all[2].entries() == std::vector<int>{1, 0});
  CHECK(all[3].entries() == std::vector<int>{0, 2});
  CHECK(all[4].entries() == std::vector<int>{1, 1});
  CHECK(all[5].entries() == std::vector<int>{2, 0});
  CHECK(jet_coefficient_count(2, 3) == 10);
  CHECK(jet_coefficient_count(3, 3) == 20);
  CHECK(multi_indices_up_to(3, 3).size() == 20);
}

TEST_CASE("rank lookup round-trips the enumeration") {
  const auto all = multi_indices_up_to(3, 2);
  for (size_t k = 0; k < all.size(); ++k) {
    CHECK(multi_index_rank(all[k], 2) == static_cast<int>(k));
  }
  CHECK(multi_index_rank(MultiIndex({3, 0, 0}), 2) == -1);
}

TEST_CASE("string round trip") {
  MultiIndex a({0, 2, 1});
  CHECK(a.to_string() == "0,2,1");
  CHECK(MultiIndex::parse("0,2,1") == a);
}
