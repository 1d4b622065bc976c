#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fracopt/measures.hpp"

using namespace fracopt;

namespace {

double weight_sum(const MixtureMeasure& m) {
  double s = 0.0;
  for (const Atom& a : m.atoms()) s += a.weight;
  return s;
}

}  // namespace

TEST_CASE("space construction enforces invariants") {
  CHECK_THROWS_AS(ControlSpace::finite({}), Error);
  CHECK_THROWS_AS(ControlSpace::finite({{1.0}, {1.0}}), Error);  // duplicates
  CHECK_THROWS_AS(ControlSpace::box({0.0}, {0.0}), Error);       // lower < upper required
  CHECK_THROWS_AS(ControlSpace::box({-std::numeric_limits<double>::infinity()}, {1.0}), Error);
  CHECK_NOTHROW(ControlSpace::box({0.0}, {std::numeric_limits<double>::infinity()}));
  CHECK_THROWS_AS(ParameterDomain::box({0.0}, {std::numeric_limits<double>::infinity()}), Error);
  CHECK_NOTHROW(ParameterDomain::box({1.0}, {1.0}));  // singleton parameter is fine
}

TEST_CASE("degenerate measures") {
  const ControlSpace box = ControlSpace::box({0.0}, {10.0});
  const MixtureMeasure m = degenerate(box, {2.0});
  REQUIRE(m.size() == 1);
  CHECK(m.atoms()[0].weight == 1.0);
  CHECK(m.is_degenerate());
  CHECK(m.concentration_point() == Point{2.0});

  const ControlSpace finite = ControlSpace::finite({{0.0}, {1.0}});
  CHECK(degenerate(finite, {0.0}).is_degenerate());

  CHECK_THROWS_AS(degenerate(box, {11.0}), OutOfDomainError);
  CHECK_THROWS_AS(degenerate(finite, {0.5}), OutOfDomainError);
}

TEST_CASE("random mixtures are deterministic per seed") {
  const ControlSpace box = ControlSpace::box({-1.0}, {4.0});
  const MixtureMeasure a = random_mixture(box, 3, 7);
  const MixtureMeasure b = random_mixture(box, 3, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.atoms()[i].point == b.atoms()[i].point);
    CHECK(a.atoms()[i].weight == b.atoms()[i].weight);
  }
  const MixtureMeasure c = random_mixture(box, 3, 8);
  CHECK(a.atoms()[0].point != c.atoms()[0].point);
}

TEST_CASE("k = 1 sampling gives a degenerate measure") {
  const ControlSpace box = ControlSpace::box({0.0}, {1.0});
  const MixtureMeasure m = random_mixture(box, 1, 3);
  REQUIRE(m.size() == 1);
  CHECK(m.atoms()[0].weight == 1.0);
}

TEST_CASE("sampling on a small finite space merges duplicate draws") {
  const ControlSpace finite = ControlSpace::finite({{0.0}, {1.0}});
  const MixtureMeasure m = random_mixture(finite, 3, 11);
  CHECK(m.size() <= 2);
  CHECK(std::fabs(weight_sum(m) - 1.0) <= 1e-12);
}

TEST_CASE("unbounded boxes need an explicit truncation") {
  const ControlSpace ray = ControlSpace::box({1.0}, {std::numeric_limits<double>::infinity()});
  CHECK_THROWS_AS(random_mixture(ray, 2, 5), UnboundedSpaceError);
  const MixtureMeasure m = random_mixture(ray, 4, 5, 100.0);
  for (const Atom& a : m.atoms()) {
    CHECK(a.point[0] >= 1.0);
    CHECK(a.point[0] <= 101.0);  // lower + truncation
  }
}

TEST_CASE("weights stay normalized across constructors and merging") {
  const ControlSpace box = ControlSpace::box({0.0, -2.0}, {1.0, 2.0});
  const ControlSpace finite = ControlSpace::finite({{0.0}, {0.5}, {1.0}});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t k = 1 + seed % 6;
    for (const ControlSpace* space : {&box, &finite}) {
      const MixtureMeasure m = random_mixture(*space, k, seed);
      CHECK(std::fabs(weight_sum(m) - 1.0) <= 1e-12);
      for (const Atom& a : m.atoms()) {
        CHECK(a.weight >= 0.0);
        CHECK(space->contains(a.point));
      }
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
          CHECK(m.atoms()[i].point != m.atoms()[j].point);
    }
  }
}

TEST_CASE("from_atoms validates and merges") {
  const ControlSpace box = ControlSpace::box({0.0}, {10.0});
  CHECK_THROWS_AS(MixtureMeasure::from_atoms(box, {}), Error);
  CHECK_THROWS_AS(MixtureMeasure::from_atoms(box, {{{1.0}, -0.1}, {{2.0}, 1.1}}), Error);
  CHECK_THROWS_AS(MixtureMeasure::from_atoms(box, {{{1.0}, 0.5}, {{2.0}, 0.4}}), Error);
  CHECK_THROWS_AS(MixtureMeasure::from_atoms(box, {{{20.0}, 1.0}}), OutOfDomainError);

  const MixtureMeasure merged =
      MixtureMeasure::from_atoms(box, {{{1.0}, 0.25}, {{1.0}, 0.25}, {{2.0}, 0.5}});
  REQUIRE(merged.size() == 2);
  CHECK(merged.atoms()[0].weight == 0.5);
  CHECK(std::fabs(weight_sum(merged) - 1.0) <= 1e-12);
}
