#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fraclab/geometry.hpp"

using namespace fraclab;

namespace {

std::vector<double> inside_x(const GridDomain& d) {
  std::vector<double> xs;
  for (Index n : d.inside_nodes()) xs.push_back(d.coord(n).x());
  return xs;
}

// brute distance from node x to the nearest outside node
double brute_outside_distance(const GridDomain& d, Index x) {
  double best = INFINITY;
  for (Index y = 0; y < d.num_nodes(); ++y) {
    if (!d.inside(y)) best = std::min(best, (d.coord(x) - d.coord(y)).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("interval lattice construction") {
  const GridDomain d = build_interval(0, 2, 0.5, 1);
  CHECK(d.dim() == 1);
  CHECK(inside_x(d) == std::vector<double>{0.5, 1.0, 1.5});
  CHECK(d.box().lo.x() == -2.0);
  CHECK(d.box().hi.x() == 4.0);
  CHECK(d.num_nodes() == 13);

  CHECK(build_interval(0, 1, 0.25, 1).inside_nodes().size() == 3);

  const GridDomain f = build_interval(0, 2, 1.0 / 200, 2);
  CHECK(f.inside_nodes().size() == 399);
  CHECK(f.box().lo.x() == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(f.box().hi.x() == doctest::Approx(6.0).epsilon(1e-15));
  // cells reach half a spacing past the outermost nodes
  CHECK(f.cell_box().lo.x() == doctest::Approx(-4.0 - 1.0 / 400));
}

TEST_CASE("interval construction errors") {
  CHECK_THROWS_AS(build_interval(0, 1, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_interval(0, 1, -0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_interval(1, 1, 0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_interval(0, 1, 0.1, 0.5), std::invalid_argument);
  // no lattice node strictly inside
  CHECK_THROWS_AS(build_interval(0.1, 0.2, 0.5, 2), std::invalid_argument);
}

TEST_CASE("2D masks") {
  SUBCASE("unit square") {
    const GridDomain d = build_rectangle({0, 0}, {1, 1}, 0.25, 1);
    CHECK(d.inside_nodes().size() == 9);
  }
  SUBCASE("disk of radius 1 at h = 1/2") {
    const GridDomain d = build_disk({0, 0}, 1, 0.5, 1);
    std::size_t expected = 0;
    for (Index n = 0; n < d.num_nodes(); ++n) {
      const bool in = d.coord(n).norm() < 1.0;
      CHECK(d.inside(n) == in);
      expected += in;
    }
    CHECK(d.inside_nodes().size() == expected);
    CHECK(expected == 9);
  }
  SUBCASE("L-shape is the union of two rectangle masks") {
    auto r1 = [](const Point& q) { return q.x() > 0 && q.x() < 2 && q.y() > 0 && q.y() < 1; };
    auto r2 = [](const Point& q) { return q.x() > 0 && q.x() < 1 && q.y() > 0 && q.y() < 2; };
    const Box b{{0, 0}, {2, 2}};
    const GridDomain u = build_mask2d(b, 0.125, [&](const Point& q) { return r1(q) || r2(q); });
    const GridDomain a = restrict_mask(u, r1);
    const GridDomain c = restrict_mask(u, r2);
    REQUIRE(a.same_lattice(u));
    for (Index n = 0; n < u.num_nodes(); ++n) CHECK(u.inside(n) == (a.inside(n) || c.inside(n)));
  }
  SUBCASE("empty predicate") {
    CHECK_THROWS_AS(build_mask2d({{0, 0}, {1, 1}}, 0.25, [](const Point&) { return false; }),
                    std::invalid_argument);
  }
}

TEST_CASE("distance to the complement") {
  const GridDomain d = build_interval(0, 2, 0.25, 2);
  const GridFunction delta = distance_to_complement(d);
  for (Index n : d.inside_nodes()) {
    const double x = d.coord(n).x();
    CHECK(delta[n] == doctest::Approx(std::min(x, 2 - x)).epsilon(1e-15));
  }
  for (Index n = 0; n < d.num_nodes(); ++n) {
    if (!d.inside(n)) CHECK(delta[n] == 0.0);
  }
  CHECK(inscribed_radius(delta) == doctest::Approx(1.0));

  SUBCASE("disk: analytic R - |x| against the lattice search") {
    const GridDomain disk = build_disk({0, 0}, 1, 1.0 / 16, 1);
    const GridFunction a = distance_to_complement(disk);
    const GridFunction b = lattice_distance_to_complement(disk);
    for (Index n : disk.inside_nodes()) {
      CHECK(a[n] == doctest::Approx(1.0 - disk.coord(n).norm()).epsilon(1e-14));
      CHECK(std::abs(a[n] - b[n]) <= disk.h() * std::sqrt(2.0));
      CHECK(b[n] == doctest::Approx(brute_outside_distance(disk, n)).epsilon(1e-14));
    }
    CHECK(inscribed_radius(a) == doctest::Approx(1.0));
  }
  SUBCASE("rectangle (0,4)x(0,2)") {
    const GridDomain r = build_rectangle({0, 0}, {4, 2}, 0.25, 1);
    const GridFunction delta_r = distance_to_complement(r);
    CHECK(inscribed_radius(delta_r) == doctest::Approx(1.0));
    const NodeSet ridge = high_ridge(delta_r);
    CHECK(!ridge.nodes.empty());
    for (Index n : ridge.nodes) {
      const Point q = r.coord(n);
      CHECK(q.y() == doctest::Approx(1.0));
      CHECK(q.x() >= 1.0 - 1e-12);
      CHECK(q.x() <= 3.0 + 1e-12);
    }
    CHECK(ridge.nodes.size() == 9);  // x = 1, 1.25, ..., 3
  }
}

TEST_CASE("distance function is 1-Lipschitz") {
  const GridDomain d = build_mask2d({{0, 0}, {2, 1}}, 0.1, [](const Point& q) {
    return (q.x() > 0 && q.x() < 2 && q.y() > 0 && q.y() < 1) && !(q.x() > 1 && q.y() > 0.5);
  }, 1);
  const GridFunction delta = distance_to_complement(d);
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<Index> pick(0, d.num_nodes() - 1);
  for (int k = 0; k < 20000; ++k) {
    const Index a = pick(gen), b = pick(gen);
    CHECK(std::abs(delta[a] - delta[b]) <= d.distance(a, b) * (1 + 1e-12));
  }
}

TEST_CASE("high ridge") {
  SUBCASE("interval, h = 1/4") {
    const GridDomain d = build_interval(0, 2, 0.25, 1);
    const NodeSet g = high_ridge(distance_to_complement(d));
    REQUIRE(g.nodes.size() == 1);
    CHECK(d.coord(g.nodes[0]).x() == 1.0);
  }
  SUBCASE("disk ridge is the center node") {
    const GridDomain d = build_disk({0, 0}, 1, 0.1, 1);
    const NodeSet g = high_ridge(distance_to_complement(d));
    REQUIRE(g.nodes.size() == 1);
    CHECK(d.coord(g.nodes[0]).norm() < 1e-12);
  }
  SUBCASE("zero tolerance with analytic distances is the argmax set") {
    const GridDomain d = build_rectangle({0, 0}, {4, 2}, 0.25, 1);
    const GridFunction delta = distance_to_complement(d);
    const double r = inscribed_radius(delta);
    std::set<Index> argmax;
    for (Index n : d.inside_nodes()) {
      if (delta[n] == r) argmax.insert(n);
    }
    const NodeSet g = high_ridge(delta, 0.0);
    CHECK(std::set<Index>(g.nodes.begin(), g.nodes.end()) == argmax);
  }
}

TEST_CASE("distance to a node set") {
  const GridDomain d = build_interval(0, 2, 0.25, 1);
  const NodeSet g = high_ridge(distance_to_complement(d));
  const GridFunction rho = distance_to_set(d, g);
  for (Index n = 0; n < d.num_nodes(); ++n) {
    CHECK(rho[n] == doctest::Approx(std::abs(d.coord(n).x() - 1.0)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(distance_to_set(d, NodeSet{d, {}}), std::invalid_argument);

  NodeSet all{d, {}};
  for (Index n = 0; n < d.num_nodes(); ++n) all.nodes.push_back(n);
  CHECK(distance_to_set(d, all).values.cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("rectangle ridge segment") {
    const GridDomain r = build_rectangle({0, 0}, {4, 2}, 0.25, 1);
    const GridFunction rr = distance_to_set(r, high_ridge(distance_to_complement(r)));
    Index probe = -1;
    for (Index n : r.inside_nodes()) {
      if ((r.coord(n) - Point(0.5, 1.0)).norm() < 1e-12) probe = n;
    }
    REQUIRE(probe >= 0);
    CHECK(rr[probe] == doctest::Approx(0.5));
  }
  SUBCASE("rho vanishes exactly on the set and is 1-Lipschitz") {
    const GridDomain r = build_disk({0, 0}, 1, 0.125, 1);
    NodeSet s{r, {r.inside_nodes()[3], r.inside_nodes()[40]}};
    const GridFunction rs = distance_to_set(r, s);
    for (Index n = 0; n < r.num_nodes(); ++n) {
      const bool member = n == s.nodes[0] || n == s.nodes[1];
      CHECK((rs[n] == 0.0) == member);
    }
    for (Index a = 0; a < r.num_nodes(); a += 97)
      for (Index b = 0; b < r.num_nodes(); b += 89)
        CHECK(std::abs(rs[a] - rs[b]) <= r.distance(a, b) * (1 + 1e-12));
  }
}

TEST_CASE("nearest zero node matches a full scan") {
  const GridDomain d = build_disk({0.3, -0.2}, 0.7, 0.05, 1);
  const GridFunction delta = distance_to_complement(d);
  for (std::size_t k = 0; k < d.inside_nodes().size(); k += 13) {
    const Index x = d.inside_nodes()[k];
    const auto z = nearest_zero_node(delta, x);
    REQUIRE(z.has_value());
    double best = INFINITY;
    for (Index y = 0; y < d.num_nodes(); ++y) {
      if (y != x && delta[y] == 0.0) best = std::min(best, d.distance(x, y));
    }
    CHECK(z->second == doctest::Approx(best).epsilon(1e-15));
    CHECK(delta[z->first] == 0.0);
  }
}

TEST_CASE("grid function invariants") {
  const GridDomain d = build_interval(0, 1, 0.25, 1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d.num_nodes());
  v[0] = std::nan("");
  CHECK_THROWS_AS(GridFunction(d, v), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(d, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  v[0] = 1.0;  // outside node
  CHECK_FALSE(GridFunction(d, v).zero_extended());
  CHECK(GridFunction::zeros(d).zero_extended());
}
