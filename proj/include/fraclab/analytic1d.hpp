#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fraclab/geometry.hpp"

namespace fraclab {

enum class ExampleKind { kFirst, kSecond, kThird };

const char* example_name(ExampleKind kind);

/// Closed-form eigenfunctions on (0, 2) with one, two and three nodal
/// intervals. `a` is the break point where u = 1 (NaN for the first
/// example); values vanish outside (0, 2).
///
/// Points right of 1 are evaluated through the mirror 2 - x, which is exact
/// in floating point for x in [1, 2], so the (anti)symmetry u(2 - x) = -+u(x)
/// holds bit for bit there.
template <typename Scalar>
struct Example1D {
  ExampleKind kind = ExampleKind::kFirst;
  Scalar alpha = Scalar(0.5);
  Scalar a = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar lambda = Scalar(1);

  Scalar operator()(Scalar x) const {
    using std::abs;
    using std::min;
    using std::pow;
    if (!(x > Scalar(0) && x < Scalar(2))) return Scalar(0);
    switch (kind) {
      case ExampleKind::kFirst: {
        const Scalar m = min(pow(x, alpha), pow(Scalar(2) - x, alpha));
        return m / (m + pow(abs(x - Scalar(1)), alpha));
      }
      case ExampleKind::kSecond:
        if (x > Scalar(1)) return -second_left(Scalar(2) - x);
        return second_left(x);
      case ExampleKind::kThird:
        if (x > Scalar(1)) return third_left(Scalar(2) - x);
        return third_left(x);
    }
    return Scalar(0);
  }

  /// Nodal intervals, left to right.
  std::vector<std::pair<Scalar, Scalar>> nodal_intervals() const {
    switch (kind) {
      case ExampleKind::kFirst: return {{Scalar(0), Scalar(2)}};
      case ExampleKind::kSecond: return {{Scalar(0), Scalar(1)}, {Scalar(1), Scalar(2)}};
      case ExampleKind::kThird: {
        const Scalar l = (Scalar(1) + a) / Scalar(2);
        const Scalar r = (Scalar(3) - a) / Scalar(2);
        return {{Scalar(0), l}, {l, r}, {r, Scalar(2)}};
      }
    }
    return {};
  }

 private:
  // x in (0, 1]
  Scalar second_left(Scalar x) const {
    using std::pow;
    if (x <= a) {
      const Scalar p = pow(x, alpha);
      return p / (p + pow(a - x, alpha));
    }
    const Scalar l = pow(Scalar(2) - a - x, alpha);
    const Scalar r = pow(x - a, alpha);
    return (l - r) / (l + r);
  }
  Scalar third_left(Scalar x) const {
    using std::pow;
    if (x <= a) {
      const Scalar p = pow(x, alpha);
      return p / (p + pow(a - x, alpha));
    }
    const Scalar l = pow(Scalar(1) - x, alpha);
    const Scalar r = pow(x - a, alpha);
    return (l - r) / (l + r);
  }
};

namespace detail {
template <typename Scalar>
void check_alpha(Scalar alpha) {
  if (!(alpha > Scalar(0) && alpha <= Scalar(1)))
    throw std::invalid_argument("alpha outside (0, 1]");
}
}  // namespace detail

/// u = m / (m + |x - 1|^alpha), m = min(x^alpha, (2 - x)^alpha); lambda = 1.
template <typename Scalar = double>
Example1D<Scalar> first_1d(Scalar alpha) {
  detail::check_alpha(alpha);
  return {ExampleKind::kFirst, alpha, std::numeric_limits<Scalar>::quiet_NaN(), Scalar(1)};
}

/// Two nodal intervals; a = 2 / (2^(1/alpha) + 2), lambda = (2^(1/alpha - 1) + 1)^alpha.
template <typename Scalar = double>
Example1D<Scalar> second_1d(Scalar alpha) {
  using std::pow;
  detail::check_alpha(alpha);
  const Scalar a = Scalar(2) / (pow(Scalar(2), Scalar(1) / alpha) + Scalar(2));
  const Scalar lambda = pow(pow(Scalar(2), Scalar(1) / alpha - Scalar(1)) + Scalar(1), alpha);
  return {ExampleKind::kSecond, alpha, a, lambda};
}

/// Three nodal intervals; a = 1 / (2^(1/alpha) + 1), lambda = (1 + 2^(1/alpha))^alpha.
template <typename Scalar = double>
Example1D<Scalar> third_1d(Scalar alpha) {
  using std::pow;
  detail::check_alpha(alpha);
  const Scalar t = pow(Scalar(2), Scalar(1) / alpha);
  return {ExampleKind::kThird, alpha, Scalar(1) / (t + Scalar(1)), pow(Scalar(1) + t, alpha)};
}

/// Evaluates the example at every node of an interval grid for (0, 2).
GridFunction sample(const Example1D<double>& ex, const GridDomain& dom);

}  // namespace fraclab
