#pragma once

#include <optional>
#include <vector>

#include "fraclab/geometry.hpp"

namespace fraclab {

/// Value of a sup/inf of the Hoelder difference quotient together with the
/// node where it is attained. witness == kExterior means the extremum comes
/// from outside the lattice box (nearest exterior point, or the limit
/// |y| -> infinity where the quotient tends to 0).
struct Extremum {
  static constexpr Index kExterior = -1;
  double value = 0.0;
  Index witness = kExterior;
};

/// sup_y (u(y) - u(x)) / |y - x|^alpha over the lattice and its exterior.
Extremum linf_plus(const GridFunction& u, double alpha, Index x);
/// inf_y (u(y) - u(x)) / |y - x|^alpha over the lattice and its exterior.
Extremum linf_minus(const GridFunction& u, double alpha, Index x);
/// -u(x) / delta(x)^alpha, the value of the infimum for first eigenfunctions.
double linf_minus_analytic(const GridFunction& u, const GridFunction& delta, double alpha,
                           Index x);

/// Both one-sided operators at every inside node of a zero-extended u. Zero
/// nodes enter only through the nearest one, which gives the same extrema as
/// the full scan.
struct LinfField {
  std::vector<Extremum> plus;   // indexed like domain.inside_nodes()
  std::vector<Extremum> minus;
};
LinfField linf_field(const GridFunction& u, double alpha);

enum class Branch {
  kInfLaplace,  // L_inf u is the active term
  kEigen,       // L_inf^- u + lambda u (u > 0) or L_inf^+ u + lambda u (u < 0)
  kNodal,       // |u| inside the dead band: L_inf u = 0
};
const char* branch_name(Branch b);

struct InfinityNode {
  Index node = 0;
  double u = 0.0;
  Extremum plus;
  Extremum minus;
  double l_minus_analytic = 0.0;
  Branch branch = Branch::kInfLaplace;
  double residual = 0.0;
  bool in_collar = false;  // delta(x) <= 2h
};

struct InfinityReport {
  double alpha = 0.0;
  double lambda = 0.0;
  double band = 0.0;  // dead band used for the u = 0 branch
  std::vector<InfinityNode> nodes;
  double sup_residual = 0.0;
  double sup_residual_interior = 0.0;  // excluding the 2h collar
  Index worst_node = -1;
  Index worst_node_interior = -1;
};

/// Residual of max{L_inf u, L_inf^- u + lambda u} = 0 at every inside node.
InfinityReport first_residual(const GridFunction& u, double alpha, double lambda,
                              const GridFunction& delta);

/// Residual of the sign-changing equation: the first-eigenvalue branch where
/// u > band, L_inf u where |u| <= band, min{L_inf u, L_inf^+ u + lambda u}
/// where u < -band. band = band_factor * h^alpha * [u]_alpha with [u]_alpha
/// the largest one-sided quotient on the grid.
InfinityReport higher_residual(const GridFunction& u, double alpha, double lambda,
                               const GridFunction& delta, double band_factor = 0.1);

/// delta^alpha / (delta^alpha + rho^alpha), rho = dist(., gamma1). gamma1
/// must consist of High Ridge nodes (default tolerance h / 2).
GridFunction representation(const GridDomain& dom, const NodeSet& gamma1, double alpha);

/// Truncated alpha-cone around node x0 on every lattice node; for alpha == 1
/// the Lipschitz cone r - eps r^2 with eps R < 1 (default eps = 1 / (4R)).
/// The exterior value is the truncation level.
GridFunction cone(const GridDomain& dom, Index x0, double radius, double alpha,
                  std::optional<double> eps = std::nullopt);

/// R^(-alpha)
double lambda_infinity(const GridDomain& dom, double alpha);

/// Largest radius of two disjoint inscribed balls. Exact for intervals,
/// otherwise the best pair of inside nodes.
double r2_radius(const GridDomain& dom);

}  // namespace fraclab
