#pragma once

#include <string>

#include <Eigen/Core>

#include "fraclab/geometry.hpp"

namespace fraclab {

/// Hoelder exponent alpha in (0, 1] and integrability exponent p >= 2.
struct FracParams {
  double alpha = 0.5;
  double p = 2.0;

  /// n < alpha p < n + p
  bool admissible(int n) const;
  /// alpha p < n + p - 1
  bool narrow_range(int n) const { return alpha * p < n + p - 1.0; }
  /// alpha p > 2n, the regime where first eigenfunctions are unique.
  bool regular_range(int n) const { return alpha * p > 2.0 * n; }
  /// Fractional Sobolev order s = alpha - n/p.
  double sobolev_order(int n) const { return alpha - n / p; }

  /// Throws std::invalid_argument naming the violated range.
  void validate(int n) const;
  std::string describe() const;
};

struct EnergyBreakdown {
  double interior = 0.0;    // Omega x Omega, ordered pairs
  double cross = 0.0;       // 2 x Omega x (box \ Omega)
  double tail_lower = 0.0;  // 2 x Omega x (R^n \ box), lower radial bound
  double tail_upper = 0.0;  // same, upper radial bound

  double tail_mid() const { return 0.5 * (tail_lower + tail_upper); }
  double total() const { return interior + cross + tail_mid(); }
};

/// Precomputed lattice quadrature of the Gagliardo energy for one domain and
/// one (alpha, p). The unknowns are the values on inside nodes, in the order
/// of GridDomain::inside_nodes().
///
/// All p-th powers are formed from ratios <= 1: the interaction weights are
/// stored as p-th roots, and each evaluation divides by the largest scaled
/// difference quotient D before exponentiating, carrying D^p in log form.
/// The diagonal y == x is excluded from every sum.
class NonlocalOperator {
 public:
  NonlocalOperator(GridDomain dom, FracParams prm);

  const GridDomain& domain() const { return dom_; }
  const FracParams& params() const { return prm_; }
  Index size() const { return static_cast<Index>(dom_.inside_nodes().size()); }

  /// Restrict to inside nodes / extend by zero.
  Eigen::VectorXd restrict(const GridFunction& u) const;
  GridFunction extend(const Eigen::VectorXd& v) const;

  EnergyBreakdown energy(const Eigen::VectorXd& v) const;

  /// Discrete Rayleigh quotient with the midpoint of the tail bracket.
  double quotient(const Eigen::VectorXd& v) const;
  /// Quotient and its exact gradient with respect to inside-node values.
  double quotient_and_gradient(const Eigen::VectorXd& v, Eigen::VectorXd& grad) const;

  /// L_p u at every inside node.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  /// L_p u at an arbitrary lattice node.
  double apply_at(const Eigen::VectorXd& v, Index node) const;

  /// sum |v|^p h^n
  double lp_mass(const Eigen::VectorXd& v) const;
  /// v scaled so that sum |v|^p h^n == 1.
  Eigen::VectorXd normalize(const Eigen::VectorXd& v) const;

  /// (tail_upper - tail_lower) / total energy, for reporting truncation error.
  double relative_tail_width(const Eigen::VectorXd& v) const;

 private:
  struct Pass;
  Pass run(const Eigen::VectorXd& v, bool want_forces) const;

  GridDomain dom_;
  FracParams prm_;
  double log_cell_ = 0.0;        // n log h
  Eigen::MatrixXd root_weight_;  // (h^n |y-x|^(-alpha p))^(1/p), zero diagonal
  Eigen::VectorXd log_cross_;    // log(h^n sum_{y in box \ Omega} |y-x|^(-alpha p))
  Eigen::VectorXd log_tail_lo_;  // log of the radial tail bounds
  Eigen::VectorXd log_tail_hi_;
  Eigen::VectorXd root_self_;    // (2 (cross + tail_mid))^(1/p)
};

EnergyBreakdown gagliardo_energy(const GridFunction& u, const FracParams& prm);
double rayleigh_quotient(const GridFunction& u, const FracParams& prm);
GridFunction rayleigh_gradient(const GridFunction& u, const FracParams& prm);
double apply_Lp(const GridFunction& u, const FracParams& prm, Index node);

/// Surface measure of the unit sphere in R^n (2 for n = 1, 2 pi for n = 2).
double unit_sphere_measure(int n);
/// int_{|z| > d} |z|^(-alpha p) dz in R^n.
double radial_tail(int n, double alpha_p, double d);

}  // namespace fraclab
