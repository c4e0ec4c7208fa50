#include "fraclab/infinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha outside (0, 1]");
}

void require_node(const GridDomain& dom, Index x) {
  if (x < 0 || x >= dom.num_nodes()) throw std::invalid_argument("node out of range");
}

// Exterior of the lattice box: the value u.exterior at distance >= d_box, and
// the limit 0 of the quotient as |y| -> infinity.
Extremum exterior_sup(const GridFunction& u, Index x, double alpha) {
  const double e = u.exterior - u.values[x];
  if (e > 0.0) return {e / std::pow(u.domain.distance_to_cell_box_boundary(x), alpha)};
  return {0.0};
}

Extremum exterior_inf(const GridFunction& u, Index x, double alpha) {
  const double e = u.exterior - u.values[x];
  if (e < 0.0) return {e / std::pow(u.domain.distance_to_cell_box_boundary(x), alpha)};
  return {0.0};
}

}  // namespace

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::kInfLaplace: return "linf";
    case Branch::kEigen: return "eigen";
    case Branch::kNodal: return "nodal";
  }
  return "?";
}

Extremum linf_plus(const GridFunction& u, double alpha, Index x) {
  require_alpha(alpha);
  require_node(u.domain, x);
  Extremum best{-kInf, Extremum::kExterior};
  const double ux = u.values[x];
  for (Index y = 0; y < u.domain.num_nodes(); ++y) {
    if (y == x) continue;
    const double q = (u.values[y] - ux) / std::pow(u.domain.distance(x, y), alpha);
    if (q > best.value) best = {q, y};
  }
  const Extremum ext = exterior_sup(u, x, alpha);
  if (ext.value > best.value) best = ext;
  return best;
}

Extremum linf_minus(const GridFunction& u, double alpha, Index x) {
  require_alpha(alpha);
  require_node(u.domain, x);
  Extremum best{kInf, Extremum::kExterior};
  const double ux = u.values[x];
  for (Index y = 0; y < u.domain.num_nodes(); ++y) {
    if (y == x) continue;
    const double q = (u.values[y] - ux) / std::pow(u.domain.distance(x, y), alpha);
    if (q < best.value) best = {q, y};
  }
  const Extremum ext = exterior_inf(u, x, alpha);
  if (ext.value < best.value) best = ext;
  return best;
}

double linf_minus_analytic(const GridFunction& u, const GridFunction& delta, double alpha,
                           Index x) {
  require_alpha(alpha);
  require_node(u.domain, x);
  if (!u.domain.inside(x)) throw std::invalid_argument("node is not inside the domain");
  const double d = delta.values[x];
  if (!(d > 0.0)) throw std::logic_error("distance to the complement vanishes at an inside node");
  return -u.values[x] / std::pow(d, alpha);
}

LinfField linf_field(const GridFunction& u, double alpha) {
  require_alpha(alpha);
  if (!u.zero_extended()) throw std::invalid_argument("grid function is not zero-extended");
  const GridDomain& dom = u.domain;
  const auto& in = dom.inside_nodes();
  std::vector<Index> support;
  for (Index y : in) {
    if (u.values[y] != 0.0) support.push_back(y);
  }
  LinfField f;
  f.plus.resize(in.size());
  f.minus.resize(in.size());

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < in.size(); ++i) {
    const Index x = in[i];
    const double ux = u.values[x];
    Extremum sup{-kInf, Extremum::kExterior};
    Extremum inf{kInf, Extremum::kExterior};
    for (Index y : support) {
      if (y == x) continue;
      const double q = (u.values[y] - ux) / std::pow(dom.distance(x, y), alpha);
      if (q > sup.value) sup = {q, y};
      if (q < inf.value) inf = {q, y};
    }
    // All zero nodes give -ux / |y - x|^alpha; the extreme one is the
    // nearest, the other side is the limit 0 at infinity.
    if (const auto z = nearest_zero_node(u, x)) {
      const double qz = -ux / std::pow(z->second, alpha);
      if (ux > 0.0) {
        if (qz < inf.value) inf = {qz, z->first};
        if (0.0 > sup.value) sup = {0.0, Extremum::kExterior};
      } else if (ux < 0.0) {
        if (qz > sup.value) sup = {qz, z->first};
        if (0.0 < inf.value) inf = {0.0, Extremum::kExterior};
      } else {
        if (0.0 > sup.value) sup = {0.0, z->first};
        if (0.0 < inf.value) inf = {0.0, z->first};
      }
    }
    f.plus[i] = sup;
    f.minus[i] = inf;
  }
  return f;
}

namespace {

void finalize(InfinityReport& r, const GridFunction& delta) {
  const double collar = 2.0 * delta.domain.h() * (1.0 + 1e-9);
  for (auto& n : r.nodes) {
    n.in_collar = delta.values[n.node] <= collar;
    const double a = std::abs(n.residual);
    if (r.worst_node < 0 || a > r.sup_residual) {
      r.sup_residual = a;
      r.worst_node = n.node;
    }
    if (!n.in_collar && (r.worst_node_interior < 0 || a > r.sup_residual_interior)) {
      r.sup_residual_interior = a;
      r.worst_node_interior = n.node;
    }
  }
}

InfinityReport base_report(const GridFunction& u, double alpha, double lambda,
                           const GridFunction& delta, const LinfField& f) {
  if (!delta.domain.same_lattice(u.domain))
    throw std::invalid_argument("distance function lives on a different lattice");
  InfinityReport r;
  r.alpha = alpha;
  r.lambda = lambda;
  const auto& in = u.domain.inside_nodes();
  r.nodes.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    InfinityNode& n = r.nodes[i];
    n.node = in[i];
    n.u = u.values[in[i]];
    n.plus = f.plus[i];
    n.minus = f.minus[i];
    n.l_minus_analytic = linf_minus_analytic(u, delta, alpha, in[i]);
  }
  return r;
}

}  // namespace

InfinityReport first_residual(const GridFunction& u, double alpha, double lambda,
                              const GridFunction& delta) {
  for (Index x : u.domain.inside_nodes()) {
    if (u.values[x] < 0.0) throw std::invalid_argument("first_residual expects u >= 0");
  }
  const LinfField f = linf_field(u, alpha);
  InfinityReport r = base_report(u, alpha, lambda, delta, f);
  for (auto& n : r.nodes) {
    const double op = n.plus.value + n.minus.value;
    const double eig = n.minus.value + lambda * n.u;
    n.branch = op >= eig ? Branch::kInfLaplace : Branch::kEigen;
    n.residual = std::max(op, eig);
  }
  finalize(r, delta);
  return r;
}

InfinityReport higher_residual(const GridFunction& u, double alpha, double lambda,
                               const GridFunction& delta, double band_factor) {
  if (!(band_factor >= 0.0)) throw std::invalid_argument("band factor must be non-negative");
  const LinfField f = linf_field(u, alpha);
  InfinityReport r = base_report(u, alpha, lambda, delta, f);
  double holder = 0.0;
  for (const auto& n : r.nodes)
    holder = std::max({holder, std::abs(n.plus.value), std::abs(n.minus.value)});
  r.band = band_factor * std::pow(u.domain.h(), alpha) * holder;
  for (auto& n : r.nodes) {
    const double op = n.plus.value + n.minus.value;
    if (n.u > r.band) {
      const double eig = n.minus.value + lambda * n.u;
      n.branch = op >= eig ? Branch::kInfLaplace : Branch::kEigen;
      n.residual = std::max(op, eig);
    } else if (n.u < -r.band) {
      const double eig = n.plus.value + lambda * n.u;
      n.branch = op <= eig ? Branch::kInfLaplace : Branch::kEigen;
      n.residual = std::min(op, eig);
    } else {
      n.branch = Branch::kNodal;
      n.residual = op;
    }
  }
  finalize(r, delta);
  return r;
}

GridFunction representation(const GridDomain& dom, const NodeSet& gamma1, double alpha) {
  require_alpha(alpha);
  if (gamma1.nodes.empty()) throw std::invalid_argument("gamma1 is empty");
  const GridFunction delta = distance_to_complement(dom);
  const NodeSet ridge = high_ridge(delta);
  for (Index g : gamma1.nodes) {
    if (std::find(ridge.nodes.begin(), ridge.nodes.end(), g) == ridge.nodes.end())
      throw std::invalid_argument("gamma1 contains a node off the High Ridge");
  }
  const GridFunction rho = distance_to_set(dom, gamma1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dom.num_nodes());
  for (Index x : dom.inside_nodes()) {
    const double da = std::pow(delta.values[x], alpha);
    v[x] = da / (da + std::pow(rho.values[x], alpha));
  }
  return GridFunction(dom, std::move(v));
}

GridFunction cone(const GridDomain& dom, Index x0, double radius, double alpha,
                  std::optional<double> eps) {
  require_alpha(alpha);
  require_node(dom, x0);
  if (!(radius > 0.0)) throw std::invalid_argument("cone radius must be positive");
  if (dom.distance_to_cell_box_boundary(x0) < radius)
    throw std::invalid_argument("cone ball does not fit inside the lattice box");
  const double e = eps.value_or(1.0 / (4.0 * radius));
  if (alpha == 1.0 && !(e >= 0.0 && e * radius < 1.0))
    throw std::invalid_argument("cone requires eps * R < 1 for alpha = 1");
  auto profile = [&](double r) {
    return alpha < 1.0 ? std::pow(r, alpha) : r - e * r * r;
  };
  const double top = profile(radius);
  Eigen::VectorXd v(dom.num_nodes());
  for (Index y = 0; y < dom.num_nodes(); ++y) {
    const double r = dom.distance(x0, y);
    v[y] = r < radius ? profile(r) : top;
  }
  return GridFunction(dom, std::move(v), top);
}

double lambda_infinity(const GridDomain& dom, double alpha) {
  require_alpha(alpha);
  return std::pow(inscribed_radius(distance_to_complement(dom)), -alpha);
}

double r2_radius(const GridDomain& dom) {
  if (const auto* iv = std::get_if<IntervalShape>(&dom.shape())) return (iv->b - iv->a) / 4.0;
  const GridFunction delta = distance_to_complement(dom);
  std::vector<Index> order = dom.inside_nodes();
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return delta.values[a] > delta.values[b]; });
  double best = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double di = delta.values[order[i]];
    if (di <= best) break;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const double dj = delta.values[order[j]];
      if (dj <= best) break;
      const double v = std::min({di, dj, 0.5 * dom.distance(order[i], order[j])});
      best = std::max(best, v);
    }
  }
  return best;
}

}  // namespace fraclab
