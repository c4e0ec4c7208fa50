#include <doctest.h>

#include <cmath>

#include "fraclab/analytic1d.hpp"

using namespace fraclab;

TEST_CASE("constants") {
  SUBCASE("alpha = 1") {
    const auto s = second_1d(1.0);
    CHECK(s.a == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(2.0).epsilon(1e-12));
    const auto t = third_1d(1.0);
    CHECK(t.a == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(t.lambda == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("alpha = 1/2") {
    const auto s = second_1d(0.5);
    CHECK(s.a == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    const auto t = third_1d(0.5);
    CHECK(t.a == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(t.lambda == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  }
  CHECK(first_1d(0.5).lambda == 1.0);
  CHECK(std::isnan(first_1d(0.5).a));
  CHECK(first_1d<float>(0.5f).lambda == 1.0f);
  CHECK(second_1d<long double>(0.5L).a == doctest::Approx(1.0 / 3));
}

TEST_CASE("alpha outside (0, 1] is rejected") {
  for (double bad : {0.0, -0.5, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(first_1d(bad), std::invalid_argument);
    CHECK_THROWS_AS(second_1d(bad), std::invalid_argument);
    CHECK_THROWS_AS(third_1d(bad), std::invalid_argument);
  }
}

TEST_CASE("first example values") {
  const auto u = first_1d(0.5);
  CHECK(u(1.0) == 1.0);
  CHECK(u(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(first_1d(1.0)(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  // x = 0.2: sqrt(0.2) / (sqrt(0.2) + sqrt(0.8)) = 1/3
  CHECK(u(0.2) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("break points and nodal boundaries") {
  for (double alpha : {0.3, 0.5, 0.8, 1.0}) {
    const auto s = second_1d(alpha);
    CHECK(s(s.a) == 1.0);
    CHECK(s(2 - s.a) == doctest::Approx(-1.0).epsilon(1e-4));  // 2 - a rounds; the cusp amplifies it
    CHECK(std::abs(s(1.0)) <= 1e-15);
    CHECK(s.a < 0.5 + 1e-15);

    const auto t = third_1d(alpha);
    CHECK(t(t.a) == 1.0);
    CHECK(t(2 - t.a) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(t(1.0) == -1.0);
    const auto iv = t.nodal_intervals();
    REQUIRE(iv.size() == 3);
    CHECK(std::abs(t(iv[0].second)) <= 1e-15);
    CHECK(std::abs(t(iv[1].second)) <= 1e-15);
    CHECK(iv[0].second - iv[0].first == doctest::Approx(iv[2].second - iv[2].first));
    CHECK(iv[1].second - iv[1].first == doctest::Approx(1 - t.a).epsilon(1e-15));
  }
  CHECK(second_1d(1.0).a == doctest::Approx(0.5));
  CHECK(second_1d(0.5).a < 0.5);
}

TEST_CASE("zero outside (0, 2) and bounded by 1") {
  for (const auto& ex : {first_1d(0.5), second_1d(0.5), third_1d(0.5)}) {
    for (double x : {-1.0, 0.0, 2.0, 3.5}) CHECK(ex(x) == 0.0);
    for (int k = 1; k < 400; ++k) CHECK(std::abs(ex(k / 200.0)) <= 1.0);
  }
}

TEST_CASE("symmetry of the evaluators is exact") {
  const auto f = first_1d(0.7), s = second_1d(0.7), t = third_1d(0.7);
  // 2 - x is exact for x in [1, 2]
  for (int k = 1; k < 1000; ++k) {
    const double x = 1 + k * 1e-3;
    CHECK(f(2 - x) == f(x));
    CHECK(s(2 - x) == -s(x));
    CHECK(t(2 - x) == t(x));
  }
}

TEST_CASE("sign pattern matches the nodal intervals") {
  for (const auto& ex : {first_1d(0.5), second_1d(0.5), third_1d(0.5)}) {
    const auto iv = ex.nodal_intervals();
    double sign = 1.0;
    for (const auto& [l, r] : iv) {
      for (int k = 1; k < 50; ++k) CHECK(sign * ex(l + (r - l) * k / 50.0) > 0.0);
      sign = -sign;
    }
  }
}

TEST_CASE("eigenvalues exceed the first one of each nodal interval") {
  // first eigenvalue of an interval of length L is (L / 2)^(-alpha)
  for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
    for (const auto& ex : {second_1d(alpha), third_1d(alpha)}) {
      for (const auto& [l, r] : ex.nodal_intervals()) {
        CHECK(ex.lambda >= std::pow((r - l) / 2, -alpha) * (1 - 1e-12));
      }
      CHECK(ex.lambda > first_1d(alpha).lambda);
    }
  }
  CHECK(third_1d(0.5).lambda > second_1d(0.5).lambda);
}

TEST_CASE("sampling on a grid") {
  SUBCASE("dyadic spacing: antisymmetry is bit-exact") {
    const GridDomain d = build_interval(0, 2, 1.0 / 128);
    const GridFunction u = sample(second_1d(0.5), d);
    CHECK(u.zero_extended());
    for (Index x : d.inside_nodes()) {
      const double xm = 2 - d.coord(x).x();
      Index m = -1;
      for (Index y : d.inside_nodes())
        if (d.coord(y).x() == xm) m = y;
      REQUIRE(m >= 0);
      CHECK(u[m] == -u[x]);
    }
  }
  SUBCASE("h = 1/200") {
    const GridDomain d = build_interval(0, 2, 1.0 / 200);
    const auto ex = third_1d(0.5);
    const GridFunction u = sample(ex, d);
    const auto& in = d.inside_nodes();
    // mirrored nodes differ by an ulp, amplified by the cusp at a to ~ulp^alpha
    for (std::size_t i = 0; i < in.size(); ++i) {
      CHECK(std::abs(u[in[i]] - u[in[in.size() - 1 - i]]) <= 1e-7);
      CHECK(u[in[i]] == ex(d.coord(in[i]).x()));
    }
    Index top = in[0];
    for (Index x : in)
      if (u[x] > u[top]) top = x;
    CHECK(std::abs(d.coord(top).x() - ex.a) <= d.h() + 1e-12);
  }
  SUBCASE("domain must be the interval (0, 2)") {
    CHECK_THROWS_AS(sample(first_1d(0.5), build_interval(0, 1, 0.125)), std::invalid_argument);
    CHECK_THROWS_AS(sample(first_1d(0.5), build_disk({0, 0}, 1, 0.25)), std::invalid_argument);
  }
  CHECK(std::string(example_name(ExampleKind::kThird)).size() > 0);
}
