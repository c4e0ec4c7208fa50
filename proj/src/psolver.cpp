#include "fraclab/psolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace fraclab {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 80;
// Relative slack below which a monotone step counts as roundoff-level.
constexpr double kRoundoffSlack = 1e-14;
// lambda_1(Omega) <= lambda_1(Upsilon) is checked up to this relative slack.
constexpr double kMonotonicitySlack = 1e-8;

Eigen::VectorXd initial_vector(const NonlocalOperator& op, const SolverOptions& opts) {
  const GridDomain& dom = op.domain();
  switch (opts.init_mode) {
    case InitMode::kDistance:
      return op.restrict(distance_to_complement(dom));
    case InitMode::kRandom: {
      std::mt19937_64 gen(opts.seed);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      Eigen::VectorXd v(op.size());
      for (Index i = 0; i < op.size(); ++i) v[i] = dist(gen);
      return v;
    }
    case InitMode::kCustom: {
      if (!opts.init_values) throw std::invalid_argument("custom init without start vector");
      const Eigen::VectorXd& s = *opts.init_values;
      if (s.size() == op.size()) return s;
      if (s.size() == dom.num_nodes()) {
        Eigen::VectorXd v(op.size());
        const auto& in = dom.inside_nodes();
        for (Index i = 0; i < op.size(); ++i) v[i] = s[in[i]];
        return v;
      }
      throw std::invalid_argument("custom start vector has the wrong size");
    }
  }
  throw std::invalid_argument("unknown init mode");
}

double relative_grad(const Eigen::VectorXd& g, const Eigen::VectorXd& v, double q) {
  return g.norm() * v.norm() / q;
}

}  // namespace

void SolverOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(tol_rel_q > 0.0) || !(tol_grad > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw std::invalid_argument("backtrack_factor must lie in (0, 1)");
}

EigenResult minimize_first(const GridDomain& dom, const FracParams& prm,
                           const SolverOptions& opts) {
  opts.validate();
  const NonlocalOperator op(dom, prm);

  Eigen::VectorXd v = initial_vector(op, opts);
  if (!v.allFinite()) throw std::invalid_argument("start vector is not finite");
  // A non-negative start stays in the cone u >= 0: |u| never has a larger
  // quotient than u.
  const bool project = (v.array() >= 0.0).all();
  if (project) v = v.cwiseAbs();
  v = op.normalize(v);

  Eigen::VectorXd g;
  double q = op.quotient_and_gradient(v, g);
  EigenResult res{q, op.extend(v), 0, relative_grad(g, v, q), false, {}};
  if (opts.record_history) res.history.push_back(q);

  double step = opts.step0 * v.norm() / std::max(g.norm(), 1e-300);
  Eigen::VectorXd v_new, g_new;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const double gnorm_rel = relative_grad(g, v, q);
    if (gnorm_rel <= opts.tol_grad) {
      res.converged = true;
      break;
    }
    const double g2 = g.squaredNorm();
    double q_new = q;
    bool accepted = false;
    double t = step;
    for (int k = 0; k < kMaxBacktracks; ++k, t *= opts.backtrack_factor) {
      v_new = v - t * g;
      if (project) v_new = v_new.cwiseAbs();
      if (v_new.cwiseAbs().maxCoeff() == 0.0) continue;
      v_new = op.normalize(v_new);
      q_new = op.quotient_and_gradient(v_new, g_new);
      if (!std::isfinite(q_new)) continue;
      const double predicted = kArmijo * t * g2;
      if (q_new <= q - predicted ||
          (q_new <= q && predicted <= kRoundoffSlack * q)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    // Barzilai-Borwein step for the next trial.
    const Eigen::VectorXd s = v_new - v;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * t;

    const double rel_change = (q - q_new) / q_new;
    v.swap(v_new);
    g.swap(g_new);
    q = q_new;
    if (opts.record_history) res.history.push_back(q);
    if (rel_change <= opts.tol_rel_q) {
      ++it;
      res.converged = true;
      break;
    }
  }

  res.lambda = q;
  res.u = op.extend(v);
  res.iters = it;
  res.final_grad_norm = relative_grad(g, v, q);
  if (res.final_grad_norm <= opts.tol_grad) res.converged = true;
  return res;
}

Eigen::MatrixXd p2_form_matrix(const GridDomain& dom, double alpha) {
  const int n = dom.dim();
  const double h = dom.h();
  const double two_alpha = 2.0 * alpha;
  if (!(alpha > 0.0 && alpha <= 1.0 && two_alpha > n && two_alpha < n + 2))
    throw std::invalid_argument("alpha outside the p = 2 admissible range");
  const double cell = std::pow(h, n);
  const auto& in = dom.inside_nodes();
  const Index m = static_cast<Index>(in.size());
  const Box cb = dom.cell_box();

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    const Point xi = dom.coord(in[i]);
    double row = 0.0;
    for (Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const double wgt = cell * std::pow((dom.coord(in[j]) - xi).norm(), -two_alpha);
      a(i, j) = -2.0 * wgt;
      row += wgt;
    }
    double cross = 0.0;
    for (Index y = 0; y < dom.num_nodes(); ++y) {
      if (dom.inside(y)) continue;
      cross += cell * std::pow((dom.coord(y) - xi).norm(), -two_alpha);
    }
    // Exterior of the cell-covered box, bracketed by the balls through the
    // nearest face and the farthest corner.
    double d_near = std::min(xi.x() - cb.lo.x(), cb.hi.x() - xi.x());
    double d_far = std::max(xi.x() - cb.lo.x(), cb.hi.x() - xi.x());
    double sphere = 2.0;
    if (n == 2) {
      d_near = std::min({d_near, xi.y() - cb.lo.y(), cb.hi.y() - xi.y()});
      d_far = std::hypot(d_far, std::max(xi.y() - cb.lo.y(), cb.hi.y() - xi.y()));
      sphere = 2.0 * std::numbers::pi;
    }
    const double tail = 0.5 * sphere / (two_alpha - n) *
                        (std::pow(d_near, n - two_alpha) + std::pow(d_far, n - two_alpha));
    a(i, i) = 2.0 * row + 2.0 * (cross + tail);
  }
  return a;
}

EigenResult p2_oracle(const GridDomain& dom, double alpha) {
  const Eigen::MatrixXd a = p2_form_matrix(dom, alpha);
  const Index m = a.rows();
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("p = 2 form is not positive definite");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(m).normalized();
  double rq = x.dot(a * x);
  bool converged = false;
  int it = 0;
  for (; it < 20000; ++it) {
    Eigen::VectorXd y = llt.solve(x);
    y.normalize();
    const Eigen::VectorXd ay = a * y;
    const double rq_new = y.dot(ay);
    const double resid = (ay - rq_new * y).norm();
    const double change = std::abs(rq_new - rq);
    x = std::move(y);
    rq = rq_new;
    if (change <= 1e-15 * rq && resid <= 1e-11 * rq) {
      converged = true;
      ++it;
      break;
    }
  }
  if (x.sum() < 0.0) x = -x;
  // sum u^2 h^n = 1
  x /= std::sqrt(std::pow(dom.h(), dom.dim()));
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dom.num_nodes());
  const auto& in = dom.inside_nodes();
  for (Index i = 0; i < m; ++i) full[in[i]] = x[i];
  const double resid = (a * x - rq * x).norm() / (rq * x.norm());
  return EigenResult{rq, GridFunction(dom, std::move(full)), it, resid, converged, {}};
}

GridFunction sign_fixed(const GridFunction& u) {
  Index k = 0;
  u.values.cwiseAbs().maxCoeff(&k);
  if (u.values[k] >= 0.0) return u;
  return GridFunction(u.domain, -u.values, -u.exterior);
}

SweepTable p_sweep(const GridDomain& dom, double alpha, std::vector<double> ps,
                   const SolverOptions& opts) {
  if (ps.empty()) throw std::invalid_argument("empty p list");
  std::sort(ps.begin(), ps.end());
  for (double p : ps) FracParams{alpha, p}.validate(dom.dim());

  SweepTable table;
  table.alpha = alpha;
  table.inradius = inscribed_radius(distance_to_complement(dom));
  table.target = std::pow(table.inradius, -alpha);

  SolverOptions o = opts;
  for (double p : ps) {
    const FracParams prm{alpha, p};
    if (table.last_u) {
      o.init_mode = InitMode::kCustom;
      o.init_values = table.last_u->values;
    }
    EigenResult r = minimize_first(dom, prm, o);
    const NonlocalOperator op(dom, prm);
    SweepRow row;
    row.p = p;
    row.lambda = r.lambda;
    row.root = std::exp(std::log(r.lambda) / p);
    row.converged = r.converged;
    row.iters = r.iters;
    row.rel_tail_width = op.relative_tail_width(op.restrict(r.u));
    table.rows.push_back(row);
    table.last_u = std::move(r.u);
  }
  return table;
}

MonotonicityResult monotonicity_check(const GridDomain& outer, const GridDomain& inner,
                                      const FracParams& prm, const SolverOptions& opts) {
  if (!outer.same_lattice(inner))
    throw std::invalid_argument("domains are not on the same lattice");
  for (Index k : inner.inside_nodes()) {
    if (!outer.inside(k)) throw std::invalid_argument("inner mask is not a subset of outer mask");
  }
  MonotonicityResult r;
  r.lambda_outer = minimize_first(outer, prm, opts).lambda;
  r.lambda_inner = minimize_first(inner, prm, opts).lambda;
  r.holds = r.lambda_outer <= r.lambda_inner * (1.0 + kMonotonicitySlack);
  return r;
}

}  // namespace fraclab
