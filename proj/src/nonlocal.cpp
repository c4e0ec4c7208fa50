#include "fraclab/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fraclab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log(sum exp(terms)), accumulated in index order.
double log_sum(const std::vector<double>& terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw std::overflow_error(what);
  return v;
}

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

bool FracParams::admissible(int n) const {
  const double ap = alpha * p;
  return alpha > 0.0 && alpha <= 1.0 && p >= 2.0 && ap > n && ap < n + p;
}

void FracParams::validate(int n) const {
  std::ostringstream msg;
  if (!(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0)) {
    msg << "alpha = " << alpha << " outside (0, 1]";
  } else if (!(std::isfinite(p) && p >= 2.0)) {
    msg << "p = " << p << " below 2";
  } else if (!(alpha * p > n)) {
    msg << "alpha*p = " << alpha * p << " violates n < alpha*p (n = " << n << ")";
  } else if (!(alpha * p < n + p)) {
    msg << "alpha*p = " << alpha * p << " violates alpha*p < n + p (n = " << n << ")";
  } else {
    return;
  }
  throw std::invalid_argument(msg.str());
}

std::string FracParams::describe() const {
  std::ostringstream s;
  s << "alpha=" << alpha << " p=" << p;
  return s.str();
}

double unit_sphere_measure(int n) { return n == 1 ? 2.0 : 2.0 * std::numbers::pi; }

double radial_tail(int n, double alpha_p, double d) {
  return unit_sphere_measure(n) * std::pow(d, n - alpha_p) / (alpha_p - n);
}

struct NonlocalOperator::Pass {
  double umax = 0.0;
  double log_d = 0.0;  // log of the largest scaled difference quotient
  double s_pairs = 0.0;
  double s_self = 0.0;
  double s_den = 0.0;
  Eigen::VectorXd w;           // v / umax
  Eigen::VectorXd pair_force;  // sum_y sgn(w_y - w_x) r^(p-1) a_xy
  Eigen::VectorXd self_force;  // sgn(w_x) s_x^(p-1) k_x
};

NonlocalOperator::NonlocalOperator(GridDomain dom, FracParams prm)
    : dom_(std::move(dom)), prm_(prm) {
  const int n = dom_.dim();
  prm_.validate(n);
  const double ap = prm_.alpha * prm_.p;
  const double h = dom_.h();
  log_cell_ = n * std::log(h);

  const auto& in = dom_.inside_nodes();
  const Index m = size();
  const Eigen::Vector2i ext = dom_.extent();

  // Kernel tables over integer lattice offsets.
  const int ox = ext.x() - 1, oy = ext.y() - 1;
  const int tw = 2 * ox + 1;
  auto offset_slot = [&](const Eigen::Vector2i& d) {
    return static_cast<std::size_t>(d.y() + oy) * tw + (d.x() + ox);
  };
  std::vector<double> root_kernel(static_cast<std::size_t>(tw) * (2 * oy + 1), 0.0);
  for (int dj = -oy; dj <= oy; ++dj) {
    for (int di = -ox; di <= ox; ++di) {
      if (di == 0 && dj == 0) continue;
      const double d2 = static_cast<double>(di) * di + static_cast<double>(dj) * dj;
      root_kernel[offset_slot({di, dj})] = std::pow(d2, -0.5 * prm_.alpha);
    }
  }
  const double root_scale = std::pow(h, n / prm_.p - prm_.alpha);

  root_weight_.setZero(m, m);
  for (Index c = 0; c < m; ++c) {
    const Eigen::Vector2i lc = dom_.lattice(in[c]);
    for (Index r = 0; r < m; ++r) {
      if (r == c) continue;
      root_weight_(r, c) = root_scale * root_kernel[offset_slot(dom_.lattice(in[r]) - lc)];
    }
  }

  log_cross_.resize(m);
  log_tail_lo_.resize(m);
  log_tail_hi_.resize(m);
  root_self_.resize(m);
  const double log_sigma = std::log(unit_sphere_measure(n));
  for (Index i = 0; i < m; ++i) {
    const Eigen::Vector2i li = dom_.lattice(in[i]);
    // sum over outside nodes of (lattice distance)^(-alpha p), normalized by
    // the nearest one so no term exceeds 1.
    double min_d2 = std::numeric_limits<double>::infinity();
    std::vector<double> d2s;
    for (Index y = 0; y < dom_.num_nodes(); ++y) {
      if (dom_.inside(y)) continue;
      const Eigen::Vector2i d = dom_.lattice(y) - li;
      const double d2 = static_cast<double>(d.x()) * d.x() + static_cast<double>(d.y()) * d.y();
      d2s.push_back(d2);
      min_d2 = std::min(min_d2, d2);
    }
    double s = 0.0;
    for (double d2 : d2s) s += std::pow(d2 / min_d2, -0.5 * ap);
    log_cross_[i] = log_cell_ - ap * std::log(h) - 0.5 * ap * std::log(min_d2) + std::log(s);

    const double d_near = dom_.distance_to_cell_box_boundary(in[i]);
    const double d_far = dom_.farthest_cell_box_distance(in[i]);
    log_tail_lo_[i] = log_sigma + (n - ap) * std::log(d_far) - std::log(ap - n);
    log_tail_hi_[i] = log_sigma + (n - ap) * std::log(d_near) - std::log(ap - n);
    const double log_tail_mid = std::log(0.5) + log_add(log_tail_lo_[i], log_tail_hi_[i]);
    root_self_[i] = std::exp((std::log(2.0) + log_add(log_cross_[i], log_tail_mid)) / prm_.p);
  }
}

Eigen::VectorXd NonlocalOperator::restrict(const GridFunction& u) const {
  if (!u.domain.same_lattice(dom_) || u.domain.mask() != dom_.mask())
    throw std::invalid_argument("grid function lives on a different domain");
  if (!u.zero_extended()) throw std::invalid_argument("grid function is not zero-extended");
  const auto& in = dom_.inside_nodes();
  Eigen::VectorXd v(size());
  for (Index i = 0; i < size(); ++i) v[i] = u.values[in[i]];
  return v;
}

GridFunction NonlocalOperator::extend(const Eigen::VectorXd& v) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dom_.num_nodes());
  const auto& in = dom_.inside_nodes();
  for (Index i = 0; i < size(); ++i) full[in[i]] = v[i];
  return GridFunction(dom_, std::move(full));
}

NonlocalOperator::Pass NonlocalOperator::run(const Eigen::VectorXd& v, bool want_forces) const {
  if (v.size() != size()) throw std::invalid_argument("vector size does not match unknowns");
  if (!v.allFinite()) throw std::invalid_argument("NaN or infinite value in grid function");
  Pass out;
  out.umax = v.cwiseAbs().maxCoeff();
  if (out.umax == 0.0) throw std::invalid_argument("grid function vanishes on Omega");
  const double p = prm_.p;
  const Index m = size();
  out.w = v / out.umax;
  const Eigen::VectorXd& w = out.w;

  double dmax = 0.0;
  for (Index c = 0; c < m; ++c) {
    dmax = std::max(dmax, std::abs(w[c]) * root_self_[c]);
    for (Index r = 0; r < c; ++r)
      dmax = std::max(dmax, std::abs(w[r] - w[c]) * root_weight_(r, c));
  }
  out.log_d = std::log(dmax);
  const double inv_d = 1.0 / dmax;

  Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd tpow;
  if (want_forces) tpow.setZero(m, m);

  // Each column is an independent task, so the result does not depend on the
  // thread count.
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < m; ++c) {
    double acc = 0.0;
    for (Index r = 0; r < c; ++r) {
      const double ratio = std::abs(w[r] - w[c]) * root_weight_(r, c) * inv_d;
      const double t = ratio > 0.0 ? std::pow(ratio, p - 1.0) : 0.0;
      acc += t * ratio;
      if (want_forces) {
        tpow(r, c) = t;
        tpow(c, r) = t;
      }
    }
    col_sum[c] = acc;
  }
  out.s_pairs = 2.0 * col_sum.sum();

  Eigen::VectorXd self_terms(m);
  for (Index i = 0; i < m; ++i) {
    self_terms[i] = std::pow(std::abs(w[i]) * root_self_[i] * inv_d, p);
  }
  out.s_self = self_terms.sum();
  out.s_den = w.cwiseAbs().array().pow(p).sum();

  if (want_forces) {
    out.pair_force.resize(m);
    out.self_force.resize(m);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < m; ++c) {
      double f = 0.0;
      for (Index r = 0; r < m; ++r) {
        const double t = tpow(r, c);
        if (t != 0.0) f += sign_of(w[r] - w[c]) * t * root_weight_(r, c);
      }
      out.pair_force[c] = f;
      const double s = std::abs(w[c]) * root_self_[c] * inv_d;
      out.self_force[c] = sign_of(w[c]) * std::pow(s, p - 1.0) * root_self_[c];
    }
  }
  return out;
}

double NonlocalOperator::quotient(const Eigen::VectorXd& v) const {
  const Pass s = run(v, false);
  return std::exp(prm_.p * s.log_d + std::log(s.s_pairs + s.s_self) - std::log(s.s_den));
}

double NonlocalOperator::quotient_and_gradient(const Eigen::VectorXd& v,
                                               Eigen::VectorXd& grad) const {
  const Pass s = run(v, true);
  const double p = prm_.p;
  const double num = s.s_pairs + s.s_self;
  const double q = std::exp(p * s.log_d + std::log(num) - std::log(s.s_den));
  const double pref =
      std::exp(std::log(p) + (p - 1.0) * s.log_d - std::log(s.s_den) - std::log(s.umax));
  const double ratio = std::exp(s.log_d) * num / s.s_den;
  const Eigen::ArrayXd wa = s.w.array();
  const Eigen::ArrayXd mass_force = wa.sign() * wa.abs().pow(p - 1.0);
  grad = pref * (-2.0 * s.pair_force.array() + s.self_force.array() - ratio * mass_force).matrix();
  return q;
}

Eigen::VectorXd NonlocalOperator::apply(const Eigen::VectorXd& v) const {
  const Pass s = run(v, true);
  const double scale = std::exp((prm_.p - 1.0) * (std::log(s.umax) + s.log_d));
  return scale * (2.0 * s.pair_force - s.self_force);
}

double NonlocalOperator::apply_at(const Eigen::VectorXd& v, Index node) const {
  if (v.size() != size()) throw std::invalid_argument("vector size does not match unknowns");
  if (node < 0 || node >= dom_.num_nodes()) throw std::invalid_argument("node out of range");
  const double p = prm_.p;
  const auto& in = dom_.inside_nodes();
  const auto it = std::lower_bound(in.begin(), in.end(), node);
  const bool inside = it != in.end() && *it == node;
  const Index self = inside ? static_cast<Index>(it - in.begin()) : -1;
  const double ux = inside ? v[self] : 0.0;

  // Signed terms in log-magnitude form.
  std::vector<double> logs;
  std::vector<double> signs;
  const double log_root_scale = (dom_.dim() / p - prm_.alpha) * std::log(dom_.h());
  for (Index j = 0; j < size(); ++j) {
    if (j == self) continue;
    const double diff = v[j] - ux;
    if (diff == 0.0) continue;
    const Eigen::Vector2i d = dom_.lattice(in[j]) - dom_.lattice(node);
    const double d2 = static_cast<double>(d.x()) * d.x() + static_cast<double>(d.y()) * d.y();
    const double log_a = log_root_scale - 0.5 * prm_.alpha * std::log(d2);
    logs.push_back(std::log(2.0) + (p - 1.0) * std::log(std::abs(diff)) + p * log_a);
    signs.push_back(sign_of(diff));
  }
  if (inside && ux != 0.0) {
    logs.push_back((p - 1.0) * std::log(std::abs(ux)) + p * std::log(root_self_[self]));
    signs.push_back(-sign_of(ux));
  }
  if (logs.empty()) return 0.0;
  const double mx = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) acc += signs[k] * std::exp(logs[k] - mx);
  return acc * std::exp(mx);
}

EnergyBreakdown NonlocalOperator::energy(const Eigen::VectorXd& v) const {
  if (v.size() != size()) throw std::invalid_argument("vector size does not match unknowns");
  if (!v.allFinite()) throw std::invalid_argument("NaN or infinite value in grid function");
  EnergyBreakdown e;
  const double umax = v.cwiseAbs().maxCoeff();
  if (umax == 0.0) return e;
  const double p = prm_.p;
  const Index m = size();
  const Eigen::VectorXd w = v / umax;
  const double log_front = log_cell_ + p * std::log(umax);

  double dmax = 0.0;
  for (Index c = 0; c < m; ++c)
    for (Index r = 0; r < c; ++r)
      dmax = std::max(dmax, std::abs(w[r] - w[c]) * root_weight_(r, c));
  if (dmax > 0.0) {
    Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(m);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < m; ++c) {
      double acc = 0.0;
      for (Index r = 0; r < c; ++r)
        acc += std::pow(std::abs(w[r] - w[c]) * root_weight_(r, c) / dmax, p);
      col_sum[c] = acc;
    }
    e.interior = finite_or_throw(
        std::exp(log_front + p * std::log(dmax) + std::log(2.0 * col_sum.sum())),
        "interior energy overflows");
  }

  std::vector<double> lc, llo, lhi;
  for (Index i = 0; i < m; ++i) {
    if (w[i] == 0.0) continue;
    const double base = std::log(2.0) + p * std::log(std::abs(w[i]));
    lc.push_back(base + log_cross_[i]);
    llo.push_back(base + log_tail_lo_[i]);
    lhi.push_back(base + log_tail_hi_[i]);
  }
  e.cross = finite_or_throw(std::exp(log_front + log_sum(lc)), "cross energy overflows");
  e.tail_lower = finite_or_throw(std::exp(log_front + log_sum(llo)), "tail energy overflows");
  e.tail_upper = finite_or_throw(std::exp(log_front + log_sum(lhi)), "tail energy overflows");
  return e;
}

double NonlocalOperator::lp_mass(const Eigen::VectorXd& v) const {
  const double umax = v.cwiseAbs().maxCoeff();
  if (umax == 0.0) return 0.0;
  const double s = (v / umax).cwiseAbs().array().pow(prm_.p).sum();
  return std::exp(log_cell_ + prm_.p * std::log(umax) + std::log(s));
}

Eigen::VectorXd NonlocalOperator::normalize(const Eigen::VectorXd& v) const {
  const double umax = v.cwiseAbs().maxCoeff();
  if (umax == 0.0) throw std::invalid_argument("cannot normalize the zero function");
  const Eigen::VectorXd w = v / umax;
  const double s = w.cwiseAbs().array().pow(prm_.p).sum();
  // (h^n s)^(1/p) in log form
  const double factor = std::exp((log_cell_ + std::log(s)) / prm_.p);
  return w / factor;
}

double NonlocalOperator::relative_tail_width(const Eigen::VectorXd& v) const {
  const EnergyBreakdown e = energy(v);
  return (e.tail_upper - e.tail_lower) / e.total();
}

EnergyBreakdown gagliardo_energy(const GridFunction& u, const FracParams& prm) {
  NonlocalOperator op(u.domain, prm);
  return op.energy(op.restrict(u));
}

double rayleigh_quotient(const GridFunction& u, const FracParams& prm) {
  NonlocalOperator op(u.domain, prm);
  return op.quotient(op.restrict(u));
}

GridFunction rayleigh_gradient(const GridFunction& u, const FracParams& prm) {
  NonlocalOperator op(u.domain, prm);
  Eigen::VectorXd g;
  op.quotient_and_gradient(op.restrict(u), g);
  return op.extend(g);
}

double apply_Lp(const GridFunction& u, const FracParams& prm, Index node) {
  NonlocalOperator op(u.domain, prm);
  return op.apply_at(op.restrict(u), node);
}

}  // namespace fraclab
