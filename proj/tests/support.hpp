#pragma once

// Shared helpers for the test suites: seeded random problem generators and
// independent brute-force oracles that never touch the solver's own update
// machinery.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "argen/qp.hpp"
#include "argen/rng.hpp"

namespace testsup {

struct ProblemGenOptions {
  double inf_l_prob = 0.0;   // probability that a coordinate has l = +inf
  double l_lo = 0.5;
  double l_hi = 1.6;
  int gram_extra = 2;        // rows of the Gram factor beyond p
  double b_scale = 2.0;
  double d_zero_prob = 0.4;
  double v0_zero_prob = 0.4;
};

inline argen::QpProblem random_problem(std::mt19937_64& eng, int p,
                                       const ProblemGenOptions& opt = {}) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd g(p + opt.gram_extra, p);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < p; ++j) g(i, j) = normal(eng);
  Eigen::MatrixXd a = g.transpose() * g;
  a = 0.5 * (a + a.transpose()).eval();

  argen::QpProblem prob;
  prob.A = a;
  prob.b.resize(p);
  prob.d.resize(p);
  prob.v0.resize(p);
  prob.l.resize(p);
  for (int i = 0; i < p; ++i) {
    prob.b[i] = opt.b_scale * normal(eng);
    prob.d[i] = unit(eng) < opt.d_zero_prob ? 0.0 : std::abs(normal(eng));
    prob.v0[i] = unit(eng) < opt.v0_zero_prob ? 0.0 : std::abs(normal(eng));
    if (unit(eng) < opt.inf_l_prob) {
      prob.l[i] = std::numeric_limits<double>::infinity();
    } else {
      prob.l[i] = opt.l_lo + (opt.l_hi - opt.l_lo) * unit(eng);
    }
  }
  return prob;
}

/// Brute-force minimizer for p <= 3 problems with finite l: a coarse grid
/// over [0, l] refined around the incumbent. When the incumbent sits on a
/// window face that is not a face of the original box, the window recenters
/// at full width instead of shrinking, so a poorly conditioned valley cannot
/// outrun the refinement. Sound for convex objectives.
inline double grid_oracle(const argen::QpProblem& prob, int pts = 33,
                          int max_rounds = 60) {
  const int p = prob.dim();
  std::vector<double> lo(p, 0.0), hi(p);
  double initial_span = 0.0;
  for (int i = 0; i < p; ++i) {
    hi[i] = prob.l[i];
    initial_span = std::max(initial_span, hi[i]);
  }

  Eigen::VectorXd point(p), best_point(p);
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> idx(p, 0);
    for (;;) {
      double quad = 0.0, lin = 0.0, pen = 0.0;
      for (int i = 0; i < p; ++i) {
        point[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (pts - 1);
      }
      for (int i = 0; i < p; ++i) {
        double row = 0.0;
        for (int j = 0; j < p; ++j) row += prob.A(i, j) * point[j];
        quad += point[i] * row;
        lin += prob.b[i] * point[i];
        pen += prob.d[i] * std::abs(point[i] - prob.v0[i]);
      }
      const double f = 0.5 * quad + lin + pen;
      if (f < best) {
        best = f;
        best_point = point;
      }
      int k = 0;
      while (k < p && ++idx[k] == pts) idx[k++] = 0;
      if (k == p) break;
    }

    bool on_movable_face = false;
    double span = 0.0;
    for (int i = 0; i < p; ++i) {
      const double step = (hi[i] - lo[i]) / (pts - 1);
      span = std::max(span, hi[i] - lo[i]);
      if (best_point[i] - lo[i] < 0.5 * step && lo[i] > 0.0)
        on_movable_face = true;
      if (hi[i] - best_point[i] < 0.5 * step && hi[i] < prob.l[i])
        on_movable_face = true;
    }
    if (span <= 1e-8 * std::max(1.0, initial_span)) break;
    for (int i = 0; i < p; ++i) {
      const double step = (hi[i] - lo[i]) / (pts - 1);
      const double half = on_movable_face ? 0.5 * (hi[i] - lo[i]) : 2.0 * step;
      lo[i] = std::max(0.0, best_point[i] - half);
      hi[i] = std::min(prob.l[i], best_point[i] + half);
    }
  }
  return best;
}

/// Cyclic coordinate descent with exact per-coordinate minimization. The
/// nonsmooth term is separable, so this converges to the global minimum and
/// serves as an oracle that shares no machinery with the solver under test.
inline Eigen::VectorXd cd_oracle(const argen::QpProblem& prob,
                                 int max_sweeps = 20000, double tol = 1e-14) {
  const int p = prob.dim();
  const Eigen::MatrixXd s = 0.5 * (prob.A + prob.A.transpose());
  Eigen::VectorXd v(p);
  for (int i = 0; i < p; ++i) v[i] = std::min(prob.v0[i], prob.l[i]);

  const auto piece = [](double alpha, double beta, double d, double m,
                        double x) {
    return 0.5 * alpha * x * x + beta * x + d * std::abs(x - m);
  };
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double move = 0.0;
    for (int i = 0; i < p; ++i) {
      const double alpha = s(i, i);
      const double beta = prob.b[i] + s.row(i).dot(v) - alpha * v[i];
      const double d = prob.d[i];
      const double m = prob.v0[i];
      const double hi = prob.l[i];
      double cands[5];
      int n = 0;
      cands[n++] = (-beta - d) / alpha;
      cands[n++] = (-beta + d) / alpha;
      cands[n++] = m;
      cands[n++] = 0.0;
      if (std::isfinite(hi)) cands[n++] = hi;
      double bx = v[i], bq = piece(alpha, beta, d, m, v[i]);
      for (int k = 0; k < n; ++k) {
        const double x = std::clamp(cands[k], 0.0, hi);
        const double q = piece(alpha, beta, d, m, x);
        if (q < bq) {
          bq = q;
          bx = x;
        }
      }
      move = std::max(move, std::abs(bx - v[i]));
      v[i] = bx;
    }
    if (move <= tol * (1.0 + v.lpNorm<Eigen::Infinity>())) break;
  }
  return v;
}

/// Classical multiplicative update for nonnegative QP (the d = 0 special
/// case), computed straight from the textbook formula.
inline Eigen::VectorXd classical_nqp_update(const Eigen::MatrixXd& a_plus,
                                            const Eigen::MatrixXd& a_minus,
                                            const Eigen::VectorXd& b,
                                            const Eigen::VectorXd& v) {
  const Eigen::VectorXd a = a_plus * v;
  const Eigen::VectorXd c = a_minus * v;
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    out[i] = v[i] * (-b[i] + std::sqrt(b[i] * b[i] + 4.0 * a[i] * c[i])) /
             (2.0 * a[i]);
  }
  return out;
}

}  // namespace testsup
