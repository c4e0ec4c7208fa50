#include "fraclab/analytic1d.hpp"

namespace fraclab {

const char* example_name(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::kFirst: return "first";
    case ExampleKind::kSecond: return "second";
    case ExampleKind::kThird: return "third";
  }
  return "?";
}

GridFunction sample(const Example1D<double>& ex, const GridDomain& dom) {
  const auto* iv = std::get_if<IntervalShape>(&dom.shape());
  if (dom.dim() != 1 || iv == nullptr || iv->a != 0.0 || iv->b != 2.0)
    throw std::invalid_argument("sampling needs an interval grid for (0, 2)");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dom.num_nodes());
  for (Index x : dom.inside_nodes()) v[x] = ex(dom.coord(x).x());
  return GridFunction(dom, std::move(v));
}

}  // namespace fraclab
