#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "types.hpp"

namespace argen {

/// Box-constrained quadratic program with a weighted l1 pull toward an
/// anchor v0:
///
///   minimize over v in [0, l]
///     F(v) = 1/2 v'Av + b'v + sum_i d_i |v_i - v0_i|
///
/// A must be symmetric positive semidefinite, d and v0 nonnegative, l
/// strictly positive (entries may be +infinity).
struct QpProblem {
  Matrix A;
  Vector b;
  Vector d;
  Vector v0;
  Vector l;

  int dim() const { return static_cast<int>(b.size()); }

  /// Checks all problem invariants. Returns the diagonal jitter that was
  /// needed to certify A as positive semidefinite (0 for a cleanly PSD
  /// matrix). Throws std::invalid_argument naming the offending field.
  double validate(double sym_tol = 1e-8) const;
};

/// Elementwise split A = plus - minus with plus, minus >= 0.
inline std::pair<Matrix, Matrix> split_matrix(const Matrix& A) {
  return {A.cwiseMax(0.0), (-A).cwiseMax(0.0)};
}

/// F(v). Accumulates per-coordinate terms in extended precision so descent
/// checks see a deterministic, well-conditioned sum.
inline double objective(const QpProblem& prob, const Vector& v) {
  const int p = prob.dim();
  if (v.size() != p) {
    throw std::invalid_argument("objective: v has length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(p));
  }
  const Vector av = prob.A * v;
  long double acc = 0.0L;
  for (int i = 0; i < p; ++i) {
    acc += 0.5L * static_cast<long double>(v[i]) * av[i];
    acc += static_cast<long double>(prob.b[i]) * v[i];
    acc += static_cast<long double>(prob.d[i]) * std::abs(v[i] - prob.v0[i]);
  }
  return static_cast<double>(acc);
}

namespace detail {

/// Positive root of the per-coordinate surrogate equation
/// (a/v) r^2 + B r - c v = 0, written to avoid cancellation when B > 0 and
/// to give the correct limits when a or c vanish (linear-equation root when
/// the quadratic coefficient is zero, +infinity when no positive root
/// exists). Returns NaN only in the fully indeterminate a = c = B = 0 case.
inline double mu_root(double v, double a, double c, double B) {
  if (v == 0.0) return 0.0;
  if (a == 0.0 && c == 0.0 && B == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (B >= 0.0) {
    if (c == 0.0) return 0.0;
    return 2.0 * c * v / (B + std::sqrt(B * B + 4.0 * a * c));
  }
  return v * (std::sqrt(B * B + 4.0 * a * c) - B) / (2.0 * a);
}

}  // namespace detail

/// One simultaneous multiplicative update of every coordinate. The split of
/// the symmetrized A into positive and negative parts happens once at
/// construction, so repeated steps cost two matrix-vector products. The
/// problem must outlive the kernel.
class MuKernel {
 public:
  explicit MuKernel(const QpProblem& prob) : prob_(prob) {
    Matrix sym = 0.5 * (prob.A + prob.A.transpose());
    a_minus_ = (-sym).cwiseMax(0.0);
    a_plus_ = sym.cwiseMax(0.0);
  }

  const Matrix& a_plus() const { return a_plus_; }
  const Matrix& a_minus() const { return a_minus_; }

  Vector step(const Vector& v) const {
    const int p = prob_.dim();
    if (v.size() != p) {
      throw std::invalid_argument("mu_update: v has length " +
                                  std::to_string(v.size()) + ", expected " +
                                  std::to_string(p));
    }
    if (!v.allFinite() || (v.array() < 0.0).any()) {
      throw std::invalid_argument("mu_update: v must be finite and nonnegative");
    }
    const Vector a = a_plus_ * v;
    const Vector c = a_minus_ * v;
    Vector out(p);
    for (int i = 0; i < p; ++i) {
      double r1 = detail::mu_root(v[i], a[i], c[i], prob_.b[i] + prob_.d[i]);
      double r2 = detail::mu_root(v[i], a[i], c[i], prob_.b[i] - prob_.d[i]);
      // Indeterminate root: no force acts on the coordinate, keep it.
      if (std::isnan(r1)) r1 = v[i];
      if (std::isnan(r2)) r2 = v[i];
      double nv;
      if (r1 > prob_.v0[i]) {
        nv = std::min(r1, prob_.l[i]);
      } else if (r2 < prob_.v0[i]) {
        nv = std::min(r2, prob_.l[i]);
      } else {
        nv = std::min(prob_.v0[i], prob_.l[i]);
      }
      if (!std::isfinite(nv)) {
        throw std::domain_error(
            "mu_update: non-finite update at coordinate " + std::to_string(i) +
            " (unbounded direction or ill-conditioned input)");
      }
      out[i] = nv;
    }
    return out;
  }

 private:
  const QpProblem& prob_;
  Matrix a_plus_;
  Matrix a_minus_;
};

/// Convenience form of one update step; splits A on every call. Use MuKernel
/// directly when stepping repeatedly.
inline Vector mu_update(const QpProblem& prob, const Vector& v) {
  return MuKernel(prob).step(v);
}

struct SolverOptions {
  double tol = 1e-10;             // relative sup-norm change threshold
  int max_iter = 200000;
  std::optional<Vector> init;     // strictly positive start, <= l elementwise
  double epsilon_floor = 1e-300;  // smallest positive iterate entry kept
};

struct QpSolution {
  Vector v;
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  double psd_jitter = 0.0;  // diagonal shift needed to certify A
};

/// Sup-norm distance of zero from the subdifferential of F at v, after
/// projecting out directions blocked by active bounds. Coordinates within a
/// small relative tolerance of a bound or of the kink at v0 are scored by
/// that feature's one-sided condition, mirroring how the iteration parks
/// coordinates near features rather than exactly on them. Zero certifies a
/// global minimizer of this convex problem.
inline double kkt_residual(const QpProblem& prob, const Vector& v,
                           double active_tol = 1e-6) {
  const int p = prob.dim();
  if (v.size() != p) {
    throw std::invalid_argument("kkt_residual: dimension mismatch");
  }
  const Vector g =
      0.5 * (prob.A * v + prob.A.transpose() * v) + prob.b;
  const double vscale = 1.0 + v.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < p; ++i) {
    const double di = prob.d[i];
    const double v0i = prob.v0[i];
    const double li = prob.l[i];
    double res;
    if (v[i] <= active_tol * vscale) {
      // At the lower box edge only increase is feasible. Moving up changes
      // |v - v0| at slope -1 when v0 > 0 and +1 when the kink sits at zero.
      const double up_slope = g[i] + (v0i > 0.0 ? -di : di);
      res = std::max(0.0, -up_slope);
    } else if (std::isfinite(li) && li - v[i] <= active_tol * (1.0 + li)) {
      // At the upper edge only decrease is feasible.
      double kink_slope;
      if (std::abs(li - v0i) <= active_tol * (1.0 + v0i)) {
        kink_slope = di;  // kink exactly at the bound
      } else {
        kink_slope = li > v0i ? -di : di;
      }
      const double down_slope = -g[i] + kink_slope;
      res = std::max(0.0, -down_slope);
    } else if (std::abs(v[i] - v0i) <= active_tol * (1.0 + v0i)) {
      res = std::max(0.0, std::abs(g[i]) - di);
    } else {
      res = std::abs(g[i] + di * (v[i] > v0i ? 1.0 : -1.0));
    }
    worst = std::max(worst, res);
  }
  return worst;
}

inline double QpProblem::validate(double sym_tol) const {
  const int p = dim();
  if (p <= 0) {
    throw std::invalid_argument("QpProblem: dimension must be positive");
  }
  if (A.rows() != p || A.cols() != p) {
    throw std::invalid_argument("QpProblem: A must be " + std::to_string(p) +
                                "x" + std::to_string(p) + " to match b");
  }
  if (d.size() != p || v0.size() != p || l.size() != p) {
    throw std::invalid_argument("QpProblem: b, d, v0, l must share one length");
  }
  if (!A.allFinite()) {
    throw std::invalid_argument("QpProblem: A has non-finite entries");
  }
  if (!b.allFinite()) {
    throw std::invalid_argument("QpProblem: b has non-finite entries");
  }
  if (!d.allFinite() || (d.array() < 0.0).any()) {
    throw std::invalid_argument("QpProblem: d must be finite and nonnegative");
  }
  if (!v0.allFinite() || (v0.array() < 0.0).any()) {
    throw std::invalid_argument("QpProblem: v0 must be finite and nonnegative");
  }
  for (int i = 0; i < p; ++i) {
    // NaN fails the comparison and is rejected; +infinity passes.
    if (!(l[i] > 0.0)) {
      throw std::invalid_argument("QpProblem: l must be strictly positive (entry " +
                                  std::to_string(i) + ")");
    }
  }
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol * (1.0 + A.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("QpProblem: A is not symmetric within tolerance");
  }
  // PSD check by symmetric factorization; a jitter no larger than
  // 1e-10 * trace/p absorbs the roundoff of Gram matrices built from data.
  const Matrix sym = 0.5 * (A + A.transpose());
  const double jitter_cap = 1e-10 * std::max(sym.trace(), 0.0) / p;
  Eigen::LDLT<Matrix> ldlt(sym);
  const double min_d = ldlt.vectorD().minCoeff();
  const double factor_noise = 16.0 * std::numeric_limits<double>::epsilon() *
                              p * sym.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || min_d < -(jitter_cap + factor_noise)) {
    throw std::invalid_argument("QpProblem: A is not positive semidefinite");
  }
  return min_d < 0.0 ? -min_d : 0.0;
}

namespace detail {

inline Vector default_init(const QpProblem& prob, double tol) {
  const int p = prob.dim();
  Vector v(p);
  for (int i = 0; i < p; ++i) {
    v[i] = 0.5 * (tol + std::min(prob.l[i], 1.0 + prob.v0[i]));
  }
  return v;
}

}  // namespace detail

/// Iterates the multiplicative update from a strictly positive start until
/// the relative sup-norm change drops to tol or max_iter is hit. The
/// objective is nonincreasing along the whole trajectory (the update
/// minimizes a separable majorizer of F).
inline QpSolution solve_qp(const QpProblem& prob, const SolverOptions& opts = {}) {
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument("SolverOptions: tol must be positive");
  }
  if (opts.max_iter < 1) {
    throw std::invalid_argument("SolverOptions: max_iter must be at least 1");
  }
  QpSolution sol;
  sol.psd_jitter = prob.validate();

  Vector v;
  if (opts.init) {
    v = *opts.init;
    if (v.size() != prob.dim()) {
      throw std::invalid_argument("SolverOptions: init has wrong length");
    }
    if ((v.array() <= 0.0).any() || (v.array() > prob.l.array()).any()) {
      throw std::invalid_argument(
          "SolverOptions: init must be strictly positive and <= l");
    }
  } else {
    v = detail::default_init(prob, opts.tol);
  }

  const MuKernel kernel(prob);
  int iter = 0;
  bool converged = false;
  while (iter < opts.max_iter) {
    Vector nv = kernel.step(v);
    if (opts.epsilon_floor > 0.0) {
      for (int i = 0; i < nv.size(); ++i) {
        if (nv[i] > 0.0 && nv[i] < opts.epsilon_floor) {
          nv[i] = std::min(opts.epsilon_floor, prob.l[i]);
        }
      }
    }
    ++iter;
    const double change = (nv - v).lpNorm<Eigen::Infinity>();
    const double scale = 1.0 + v.lpNorm<Eigen::Infinity>();
    v.swap(nv);
    if (change <= opts.tol * scale) {
      converged = true;
      break;
    }
  }
  sol.v = std::move(v);
  sol.iterations = iter;
  sol.converged = converged;
  sol.objective = objective(prob, sol.v);
  sol.kkt_residual = kkt_residual(prob, sol.v);
  return sol;
}

/// The separable majorizer G(u, v) of F whose coordinatewise minimization
/// yields the multiplicative update. Test-support operation: requires u, v
/// in [0, l] and v > 0 (and u > 0) wherever the negative part of A touches
/// the coordinate, since those terms carry a logarithm.
inline double auxiliary_g(const QpProblem& prob, const Vector& u, const Vector& v) {
  const int p = prob.dim();
  if (u.size() != p || v.size() != p) {
    throw std::invalid_argument("auxiliary_g: dimension mismatch");
  }
  const Matrix sym = 0.5 * (prob.A + prob.A.transpose());
  long double acc = 0.0L;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const double aij = sym(i, j);
      if (aij > 0.0) {
        if (v[i] <= 0.0) {
          throw std::domain_error(
              "auxiliary_g: v must be positive where A+ touches (coordinate " +
              std::to_string(i) + ")");
        }
        acc += 0.5L * static_cast<long double>(aij) * u[i] * u[i] * v[j] / v[i];
      } else if (aij < 0.0) {
        if (u[i] <= 0.0 || u[j] <= 0.0 || v[i] <= 0.0 || v[j] <= 0.0) {
          throw std::domain_error(
              "auxiliary_g: log term needs positive u and v (coordinate " +
              std::to_string(i) + ")");
        }
        const double ratio = (u[i] * u[j]) / (v[i] * v[j]);
        acc -= 0.5L * static_cast<long double>(-aij) * v[i] * v[j] *
               (1.0 + std::log(ratio));
      }
    }
    acc += static_cast<long double>(prob.b[i]) * u[i];
    acc += static_cast<long double>(prob.d[i]) * std::abs(u[i] - prob.v0[i]);
  }
  return static_cast<double>(acc);
}

}  // namespace argen
