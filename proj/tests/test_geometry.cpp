#include "junction/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "junction/rng.hpp"

using namespace junction;

TEST_CASE("junction distance branches") {
  CHECK(junction_distance({1.0, 1}, {2.5, 1}) == doctest::Approx(1.5));
  CHECK(junction_distance({1.0, 1}, {2.0, 2}) == doctest::Approx(3.0));
  CHECK(junction_distance({0.0, 1}, {0.0, 3}) == 0.0);
  // through the vertex the cross-edge branch collapses to |x - y|
  CHECK(junction_distance({0.0, 2}, {1.5, 3}) == doctest::Approx(1.5));
  CHECK(junction_distance({1.5, 3}, {0.0, 2}) == doctest::Approx(1.5));
  CHECK_THROWS(junction_distance({-1.0, 1}, {0.0, 1}));
}

TEST_CASE("same edge and cross edge agree whenever one point is the vertex") {
  for (double x : {0.0, 0.3, 2.0})
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        CHECK(junction_distance({0.0, i}, {x, j}) == doctest::Approx(x));
}

TEST_CASE("vertex identification in equality") {
  CHECK(same_point({0.0, 1}, {0.0, 5}));
  CHECK(same_point({0.7, 2}, {0.7, 2}));
  CHECK(!same_point({0.7, 2}, {0.7, 3}));
  CHECK(!same_point({0.0, 1}, {0.1, 1}));
}

TEST_CASE("metric axioms on random triples") {
  PathStream stream(20260809, 0);
  std::uint64_t k = 0;
  auto random_point = [&]() -> JunctionPoint {
    const double x = 3.0 * stream.uniform(k++);
    const int edge = 1 + static_cast<int>(4.0 * stream.uniform(k++));
    // exact vertex with probability ~ 1/8 so identification paths are hit
    if (stream.uniform(k++) < 0.125) return {0.0, edge};
    return {x, edge};
  };
  for (int trial = 0; trial < 3000; ++trial) {
    const JunctionPoint a = random_point(), b = random_point(),
                        c = random_point();
    const double dab = junction_distance(a, b);
    const double dba = junction_distance(b, a);
    const double dac = junction_distance(a, c);
    const double dcb = junction_distance(c, b);
    CHECK(dab >= 0.0);
    CHECK(dab == dba);
    CHECK(dab <= dac + dcb + 1e-12);
    CHECK((dab == 0.0) == same_point(a, b));
  }
}

TEST_CASE("junction validates edge indices") {
  const Junction j(3);
  CHECK(j.distance({1.0, 1}, {1.0, 3}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(j.distance({1.0, 0}, {1.0, 1}), std::out_of_range);
  CHECK_THROWS_AS(j.distance({1.0, 1}, {1.0, 4}), std::out_of_range);
  CHECK_THROWS(Junction(0));
}

TEST_CASE("vertex weights validation") {
  CHECK_NOTHROW(VertexWeights({0.2, 0.3, 0.5}));
  CHECK_NOTHROW(VertexWeights({1.0}));  // single edge
  CHECK_THROWS(VertexWeights({0.2, 0.3, 0.5 + 1e-9}));
  CHECK_THROWS(VertexWeights({0.0, 1.0}));
  CHECK_THROWS(VertexWeights({-0.1, 1.1}));
  CHECK_THROWS(VertexWeights({}));
  const VertexWeights w({0.25, 0.75});
  CHECK(w.at(1) == 0.25);
  CHECK(w.at(2) == 0.75);
  CHECK(w.edge_count() == 2);
}
