#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fraclab/geometry.hpp"
#include "fraclab/nonlocal.hpp"

namespace fraclab {

enum class InitMode { kDistance, kRandom, kCustom };

struct SolverOptions {
  int max_iters = 50000;
  double tol_rel_q = 1e-12;
  /// Stop when ||grad Q|| ||u|| / Q falls below this (scale-free measure).
  double tol_grad = 1e-9;
  double step0 = 1.0;
  double backtrack_factor = 0.5;
  InitMode init_mode = InitMode::kDistance;
  std::uint64_t seed = 1;
  /// Start vector for kCustom (full lattice or inside nodes only).
  std::optional<Eigen::VectorXd> init_values;
  bool record_history = false;

  void validate() const;
};

struct EigenResult {
  double lambda = 0.0;
  GridFunction u;  // sum |u|^p h^n == 1
  int iters = 0;
  double final_grad_norm = 0.0;
  bool converged = false;
  std::vector<double> history;  // quotient at accepted iterates, when recorded
};

/// First eigenpair by descent on the discrete Rayleigh quotient over the
/// sphere sum |u|^p h^n = 1, with Barzilai-Borwein trial steps, Armijo
/// backtracking and renormalization after every step. From a distance
/// initialization the iterates are also projected onto u >= 0, which never
/// increases the quotient.
EigenResult minimize_first(const GridDomain& dom, const FracParams& prm,
                           const SolverOptions& opts = {});

/// Linear case p = 2: smallest eigenpair of the assembled quadratic form by
/// inverse power iteration. Shares no code with the descent path.
EigenResult p2_oracle(const GridDomain& dom, double alpha);

/// Symmetric matrix of the p = 2 quadratic form on inside nodes, scaled so
/// that the quotient is v'Av / v'v.
Eigen::MatrixXd p2_form_matrix(const GridDomain& dom, double alpha);

/// Normalize so that the node with the largest |value| is positive.
GridFunction sign_fixed(const GridFunction& u);

struct SweepRow {
  double p = 0.0;
  double lambda = 0.0;
  double root = 0.0;  // lambda^(1/p)
  bool converged = false;
  int iters = 0;
  double rel_tail_width = 0.0;
};

struct SweepTable {
  double alpha = 0.0;
  double inradius = 0.0;
  double target = 0.0;  // R^(-alpha)
  std::vector<SweepRow> rows;
  std::optional<GridFunction> last_u;
};

/// Solves for every p in ascending order, warm-starting each solve from the
/// previous minimizer.
SweepTable p_sweep(const GridDomain& dom, double alpha, std::vector<double> ps,
                   const SolverOptions& opts = {});

struct MonotonicityResult {
  double lambda_outer = 0.0;  // lambda_1(Omega)
  double lambda_inner = 0.0;  // lambda_1(Upsilon), Upsilon subset of Omega
  bool holds = false;
  explicit operator bool() const { return holds; }
};

/// Checks lambda_1(Omega) <= lambda_1(Upsilon) for a submask Upsilon on the
/// same lattice.
MonotonicityResult monotonicity_check(const GridDomain& outer, const GridDomain& inner,
                                      const FracParams& prm, const SolverOptions& opts = {});

}  // namespace fraclab
