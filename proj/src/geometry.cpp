#include "fraclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclab {

namespace {

// Lattice indices are integers; ratios like (a - m L) / h are snapped to the
// nearest integer when they are within roundoff of it.
double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(v)) ? r : v;
}

int lower_index(double x, double h) { return static_cast<int>(std::floor(snap(x / h))); }
int upper_index(double x, double h) { return static_cast<int>(std::ceil(snap(x / h))); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

GridDomain make_lattice(int dim, double h, const Box& cover,
                        const std::function<bool(const Point&)>& pred, ShapeTag shape) {
  Eigen::Vector2i first(lower_index(cover.lo.x(), h), 0);
  Eigen::Vector2i extent(upper_index(cover.hi.x(), h) - first.x() + 1, 1);
  if (dim == 2) {
    first.y() = lower_index(cover.lo.y(), h);
    extent.y() = upper_index(cover.hi.y(), h) - first.y() + 1;
  }
  const Index n = static_cast<Index>(extent.x()) * extent.y();
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < extent.y(); ++j) {
    for (int i = 0; i < extent.x(); ++i) {
      const Point x((first.x() + i) * h, dim == 2 ? (first.y() + j) * h : 0.0);
      inside[static_cast<std::size_t>(j) * extent.x() + i] = pred(x) ? 1 : 0;
    }
  }
  return GridDomain(dim, h, first, extent, std::move(inside), std::move(shape));
}

}  // namespace

GridDomain::GridDomain(int dim, double h, Eigen::Vector2i first_index, Eigen::Vector2i extent,
                       std::vector<std::uint8_t> inside, ShapeTag shape) {
  require(dim == 1 || dim == 2, "grid dimension must be 1 or 2");
  require(std::isfinite(h) && h > 0.0, "lattice spacing must be positive");
  require(extent.x() >= 1 && extent.y() >= 1 && (dim == 2 || extent.y() == 1),
          "invalid lattice extent");
  require(static_cast<Index>(inside.size()) == static_cast<Index>(extent.x()) * extent.y(),
          "mask size does not match lattice");
  auto d = std::make_shared<Data>();
  d->dim = dim;
  d->h = h;
  d->first = first_index;
  d->extent = extent;
  d->inside = std::move(inside);
  d->shape = std::move(shape);
  for (Index k = 0; k < static_cast<Index>(d->inside.size()); ++k) {
    if (d->inside[static_cast<std::size_t>(k)]) d->inside_nodes.push_back(k);
  }
  require(!d->inside_nodes.empty(), "domain has no inside nodes");
  require(d->inside_nodes.size() < d->inside.size(), "domain has no outside nodes");
  // Inside nodes must not touch the lattice border.
  for (Index k : d->inside_nodes) {
    const int i = static_cast<int>(k % extent.x());
    const int j = static_cast<int>(k / extent.x());
    const bool border = i == 0 || i == extent.x() - 1 ||
                        (dim == 2 && (j == 0 || j == extent.y() - 1));
    require(!border, "inside node lies on the bounding box");
  }
  data_ = std::move(d);
}

Box GridDomain::box() const {
  Box b;
  b.lo = first_index().cast<double>() * h();
  b.hi = (first_index() + extent() - Eigen::Vector2i::Ones()).cast<double>() * h();
  return b;
}

Box GridDomain::cell_box() const {
  Box b = box();
  const Point pad = Point::Constant(0.5 * h());
  b.lo -= pad;
  b.hi += pad;
  if (dim() == 1) b.lo.y() = b.hi.y() = 0.0;
  return b;
}

Eigen::Vector2i GridDomain::lattice(Index node) const {
  const auto nx = static_cast<Index>(extent().x());
  return Eigen::Vector2i(static_cast<int>(node % nx), static_cast<int>(node / nx));
}

Point GridDomain::coord(Index node) const {
  const Eigen::Vector2i l = lattice(node) + first_index();
  return Point(l.x() * h(), dim() == 2 ? l.y() * h() : 0.0);
}

Index GridDomain::node_at(const Eigen::Vector2i& local) const {
  if (local.x() < 0 || local.y() < 0 || local.x() >= extent().x() || local.y() >= extent().y())
    return -1;
  return static_cast<Index>(local.y()) * extent().x() + local.x();
}

double GridDomain::distance(Index a, Index b) const {
  const Eigen::Vector2i d = lattice(a) - lattice(b);
  const double d2 = static_cast<double>(d.x()) * d.x() + static_cast<double>(d.y()) * d.y();
  return h() * std::sqrt(d2);
}

double GridDomain::distance_to_cell_box_boundary(Index node) const {
  const Box b = cell_box();
  const Point x = coord(node);
  double d = std::min(x.x() - b.lo.x(), b.hi.x() - x.x());
  if (dim() == 2) d = std::min({d, x.y() - b.lo.y(), b.hi.y() - x.y()});
  return d;
}

double GridDomain::farthest_cell_box_distance(Index node) const {
  const Box b = cell_box();
  const Point x = coord(node);
  const double dx = std::max(x.x() - b.lo.x(), b.hi.x() - x.x());
  if (dim() == 1) return dx;
  const double dy = std::max(x.y() - b.lo.y(), b.hi.y() - x.y());
  return std::hypot(dx, dy);
}

bool GridDomain::same_lattice(const GridDomain& other) const {
  return dim() == other.dim() && h() == other.h() && first_index() == other.first_index() &&
         extent() == other.extent();
}

GridFunction::GridFunction(GridDomain dom, Eigen::VectorXd v, double ext)
    : domain(std::move(dom)), values(std::move(v)), exterior(ext) {
  if (values.size() != domain.num_nodes())
    throw std::invalid_argument("grid function size does not match domain");
  if (!values.allFinite() || !std::isfinite(exterior))
    throw std::invalid_argument("grid function has non-finite values");
}

GridFunction GridFunction::zeros(const GridDomain& dom) {
  return GridFunction(dom, Eigen::VectorXd::Zero(dom.num_nodes()));
}

bool GridFunction::zero_extended() const {
  if (exterior != 0.0) return false;
  for (Index k = 0; k < domain.num_nodes(); ++k) {
    if (!domain.inside(k) && values[k] != 0.0) return false;
  }
  return true;
}

GridDomain build_interval(double a, double b, double h, double margin) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "degenerate interval");
  require(std::isfinite(h) && h > 0.0, "lattice spacing must be positive");
  require(std::isfinite(margin) && margin >= 1.0, "margin must be >= 1");
  const double len = b - a;
  Box cover;
  cover.lo = Point(a - margin * len, 0.0);
  cover.hi = Point(b + margin * len, 0.0);
  const double tol = 1e-9 * h;
  return make_lattice(
      1, h, cover, [=](const Point& x) { return x.x() > a + tol && x.x() < b - tol; },
      IntervalShape{a, b});
}

GridDomain build_mask2d(const Box& omega_box, double h,
                        const std::function<bool(const Point&)>& inside_predicate,
                        double margin, ShapeTag shape) {
  require(std::isfinite(h) && h > 0.0, "lattice spacing must be positive");
  require(std::isfinite(margin) && margin >= 1.0, "margin must be >= 1");
  require((omega_box.hi - omega_box.lo).minCoeff() > 0.0, "degenerate bounding box");
  const double diam = (omega_box.hi - omega_box.lo).norm();
  Box cover;
  cover.lo = omega_box.lo - Point::Constant(margin * diam);
  cover.hi = omega_box.hi + Point::Constant(margin * diam);
  // Only the bounding box region may be inside.
  const double tol = 1e-9 * h;
  auto pred = [&](const Point& x) {
    const bool in_box = (x.array() > omega_box.lo.array() - tol).all() &&
                        (x.array() < omega_box.hi.array() + tol).all();
    return in_box && inside_predicate(x);
  };
  return make_lattice(2, h, cover, pred, std::move(shape));
}

GridDomain build_disk(const Point& center, double radius, double h, double margin) {
  require(std::isfinite(radius) && radius > 0.0, "disk radius must be positive");
  const double tol = 1e-9 * h;
  Box b{center - Point::Constant(radius), center + Point::Constant(radius)};
  return build_mask2d(
      b, h, [=](const Point& x) { return (x - center).norm() < radius - tol; }, margin,
      DiskShape{center, radius});
}

GridDomain build_rectangle(const Point& lo, const Point& hi, double h, double margin) {
  require(((hi - lo).array() > 0.0).all(), "degenerate rectangle");
  const double tol = 1e-9 * h;
  return build_mask2d(
      Box{lo, hi}, h,
      [=](const Point& x) {
        return (x.array() > lo.array() + tol).all() && (x.array() < hi.array() - tol).all();
      },
      margin, RectangleShape{lo, hi});
}

GridDomain restrict_mask(const GridDomain& lattice,
                         const std::function<bool(const Point&)>& inside_predicate,
                         ShapeTag shape) {
  std::vector<std::uint8_t> inside(static_cast<std::size_t>(lattice.num_nodes()));
  for (Index k = 0; k < lattice.num_nodes(); ++k)
    inside[static_cast<std::size_t>(k)] = inside_predicate(lattice.coord(k)) ? 1 : 0;
  return GridDomain(lattice.dim(), lattice.h(), lattice.first_index(), lattice.extent(),
                    std::move(inside), std::move(shape));
}

namespace {

double analytic_delta(const ShapeTag& shape, const Point& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IntervalShape>) {
          return std::min(x.x() - s.a, s.b - x.x());
        } else if constexpr (std::is_same_v<S, DiskShape>) {
          return s.radius - (x - s.center).norm();
        } else if constexpr (std::is_same_v<S, RectangleShape>) {
          return std::min({x.x() - s.lo.x(), s.hi.x() - x.x(), x.y() - s.lo.y(),
                           s.hi.y() - x.y()});
        } else {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      shape);
}

// Nearest node y != node with pred(y), by expanding square rings.
template <typename Pred>
std::optional<std::pair<Index, double>> ring_search(const GridDomain& dom, Index node,
                                                    Pred&& pred) {
  const Eigen::Vector2i c = dom.lattice(node);
  const int max_r = std::max(dom.extent().x(), dom.extent().y());
  long best_d2 = std::numeric_limits<long>::max();
  Index best = -1;
  auto visit = [&](int di, int dj) {
    const Index y = dom.node_at(c + Eigen::Vector2i(di, dj));
    if (y < 0 || !pred(y)) return;
    const long d2 = static_cast<long>(di) * di + static_cast<long>(dj) * dj;
    if (d2 < best_d2 || (d2 == best_d2 && y < best)) {
      best_d2 = d2;
      best = y;
    }
  };
  for (int r = 1; r <= max_r; ++r) {
    if (dom.dim() == 1) {
      visit(-r, 0);
      visit(r, 0);
    } else {
      for (int t = -r; t <= r; ++t) {
        visit(t, -r);
        visit(t, r);
      }
      for (int t = -r + 1; t <= r - 1; ++t) {
        visit(-r, t);
        visit(r, t);
      }
    }
    if (best >= 0 && best_d2 <= static_cast<long>(r + 1) * (r + 1)) break;
  }
  if (best < 0) return std::nullopt;
  return std::make_pair(best, dom.h() * std::sqrt(static_cast<double>(best_d2)));
}

}  // namespace

GridFunction lattice_distance_to_complement(const GridDomain& dom) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dom.num_nodes());
  for (Index x : dom.inside_nodes()) {
    auto hit = ring_search(dom, x, [&](Index y) { return !dom.inside(y); });
    d[x] = hit ? hit->second : dom.distance_to_cell_box_boundary(x);
  }
  return GridFunction(dom, std::move(d));
}

GridFunction distance_to_complement(const GridDomain& dom) {
  if (std::holds_alternative<std::monostate>(dom.shape()))
    return lattice_distance_to_complement(dom);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dom.num_nodes());
  for (Index x : dom.inside_nodes()) d[x] = analytic_delta(dom.shape(), dom.coord(x));
  return GridFunction(dom, std::move(d));
}

double inscribed_radius(const GridFunction& delta) { return delta.values.maxCoeff(); }

NodeSet high_ridge(const GridFunction& delta, std::optional<double> tol) {
  const double t = tol.value_or(0.5 * delta.domain.h());
  if (t < 0.0) throw std::invalid_argument("ridge tolerance must be non-negative");
  const double r = inscribed_radius(delta);
  NodeSet s{delta.domain, {}};
  for (Index x : delta.domain.inside_nodes()) {
    if (delta[x] >= r - t) s.nodes.push_back(x);
  }
  return s;
}

GridFunction distance_to_set(const GridDomain& dom, const NodeSet& s) {
  if (s.nodes.empty()) throw std::invalid_argument("distance to an empty node set");
  for (Index y : s.nodes) {
    if (y < 0 || y >= dom.num_nodes()) throw std::invalid_argument("node index out of range");
  }
  Eigen::VectorXd d(dom.num_nodes());
  for (Index x = 0; x < dom.num_nodes(); ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (Index y : s.nodes) best = std::min(best, dom.distance(x, y));
    d[x] = best;
  }
  return GridFunction(dom, std::move(d));
}

std::optional<std::pair<Index, double>> nearest_zero_node(const GridFunction& u, Index node) {
  return ring_search(u.domain, node, [&](Index y) { return u.values[y] == 0.0; });
}

}  // namespace fraclab
