#include "ltoco/composite_step.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ltoco/errors.hpp"

namespace ltoco {

namespace {

void validate(const CompositeStepSpec& spec) {
  const Index p = spec.set.dim();
  const Index m = spec.constraints.num_constraints();
  if (spec.constraints.dim() != p || spec.v.size() != p || spec.anchor.size() != p) {
    throw InvalidInput("CompositeStepSpec: dimension mismatch");
  }
  if (spec.w.size() != m) throw InvalidInput("CompositeStepSpec: weight dimension mismatch");
  if ((spec.w.array() < 0.0).any()) throw InvalidInput("CompositeStepSpec: weights must be >= 0");
  if (!(spec.eta > 0.0)) throw InvalidParameter("CompositeStepSpec: eta must be > 0");
  if (!(spec.gamma >= 0.0)) throw InvalidParameter("CompositeStepSpec: gamma must be >= 0");
  if (!(spec.tol > 0.0)) throw InvalidParameter("CompositeStepSpec: tol must be > 0");
  if (!(spec.prox_weight > 0.0)) throw InvalidParameter("CompositeStepSpec: prox_weight must be > 0");
  if (spec.max_iters < 1) throw InvalidParameter("CompositeStepSpec: max_iters must be >= 1");
}

// The step restricted to rows with positive penalty weight rho_j = eta*gamma*w_j.
//
// Dual: max over lambda in [0,1]^r of
//   d(lambda) = min_{x in X} <x, c0 + A^T (rho .* lambda)> - <rho .* lambda, b>
//               + kappa/2 ||x - z||^2,
// attained at x(lambda) = P_X(z - (c0 + A^T(rho .* lambda)) / kappa).
// Any lambda in the box gives a lower bound on the primal optimum.
class StepDual {
 public:
  StepDual(const CompositeStepSpec& spec)
      : set_(spec.set), z_(spec.anchor), kappa_(spec.prox_weight), c0_(spec.eta * spec.v) {
    const Matrix& A = spec.constraints.matrix(spec.step);
    const Vector& b = spec.constraints.offset(spec.step);
    const double scale = spec.eta * spec.gamma;
    std::vector<Index> rows;
    for (Index j = 0; j < spec.w.size(); ++j) {
      if (scale * spec.w[j] > 0.0) rows.push_back(j);
    }
    const Index r = static_cast<Index>(rows.size());
    A_.resize(r, A.cols());
    b_.resize(r);
    rho_.resize(r);
    for (Index k = 0; k < r; ++k) {
      A_.row(k) = A.row(rows[k]);
      b_[k] = b[rows[k]];
      rho_[k] = scale * spec.w[rows[k]];
    }
  }

  Index rows() const { return A_.rows(); }
  Index dim() const { return z_.size(); }

  Vector unprojected(const Vector& lam) const {
    return z_ - (c0_ + A_.transpose() * rho_.cwiseProduct(lam)) / kappa_;
  }
  Vector primal_at(const Vector& lam) const { return set_.project(unprojected(lam)); }

  double primal_value(const Vector& x) const {
    return c0_.dot(x) + rho_.dot((A_ * x - b_).cwiseMax(0.0)) + 0.5 * kappa_ * (x - z_).squaredNorm();
  }
  double dual_value(const Vector& lam, const Vector& x) const {
    return c0_.dot(x) + rho_.cwiseProduct(lam).dot(A_ * x - b_) +
           0.5 * kappa_ * (x - z_).squaredNorm();
  }
  Vector dual_gradient(const Vector& x) const { return rho_.cwiseProduct(A_ * x - b_); }

  double lipschitz() const {
    if (rows() == 0) return 0.0;
    const Matrix DA = rho_.asDiagonal() * A_;
    const Matrix H = DA.transpose() * DA;
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() / kappa_;
  }

  // Guess the optimal multipliers from an approximate lambda: rows with
  // lambda strictly inside (0,1) (or, in the primal variant, rows nearly
  // active at x(lambda)) are treated as kinks a_j x = b_j and their
  // multipliers are solved for from the stationarity system.
  Vector polish(const Vector& lam, bool primal_classification) const {
    const Index r = rows();
    const Index p = dim();
    const Vector u = unprojected(lam);
    const Vector x = set_.project(u);
    const Vector g = A_ * x - b_;
    constexpr double kEdge = 1e-9;

    std::vector<Index> kink;
    Vector out = Vector::Zero(r);
    for (Index j = 0; j < r; ++j) {
      const double scale = std::max(1.0, A_.row(j).cwiseAbs().sum());
      const bool inside = lam[j] > kEdge && lam[j] < 1.0 - kEdge;
      const bool near = std::abs(g[j]) <= 1e-7 * scale;
      if (primal_classification ? near : inside) {
        kink.push_back(j);
      } else if (primal_classification ? g[j] > 0.0 : lam[j] >= 1.0 - kEdge) {
        out[j] = 1.0;
      }
    }

    // Linear part of the gradient contributed by the fully active rows.
    Vector lin = c0_ + A_.transpose() * rho_.cwiseProduct(out);
    if (kink.empty()) return out;

    const Index nk = static_cast<Index>(kink.size());
    Matrix AK(nk, p);
    Vector bK(nk);
    for (Index k = 0; k < nk; ++k) {
      AK.row(k) = A_.row(kink[k]);
      bK[k] = b_[kink[k]];
    }

    Vector mu;
    if (set_.is_box()) {
      const Box& box = set_.as_box();
      std::vector<Index> free_idx;
      for (Index i = 0; i < p; ++i) {
        if (u[i] > box.lower[i] && u[i] < box.upper[i]) free_idx.push_back(i);
      }
      const Index nf = static_cast<Index>(free_idx.size());
      if (nf == 0) return out_with(out, kink, lam);
      Matrix AKF(nk, nf);
      Vector base(nf);
      for (Index a = 0; a < nf; ++a) {
        const Index i = free_idx[a];
        AKF.col(a) = AK.col(i);
        base[a] = z_[i] - lin[i] / kappa_;
      }
      // A_K x = b_K with x_F = base - A_KF^T mu / kappa and x_C clamped.
      Vector rhs = AKF * base - bK;
      for (Index i = 0; i < p; ++i) {
        if (std::find(free_idx.begin(), free_idx.end(), i) == free_idx.end()) {
          rhs += AK.col(i) * x[i];
        }
      }
      const Matrix M = AKF * AKF.transpose() / kappa_;
      mu = M.completeOrthogonalDecomposition().solve(rhs);
    } else {
      const Ball& ball = set_.as_ball();
      const Matrix M = AK * AK.transpose();
      const auto cod = M.completeOrthogonalDecomposition();
      // Ball multiplier theta: (kappa + theta) x = kappa z + theta c - lin - A_K^T mu.
      auto solve_for = [&](double theta, Vector& xt) {
        const Vector base = kappa_ * z_ + theta * ball.center - lin;
        Vector m = cod.solve(AK * base - (kappa_ + theta) * bK);
        xt = (base - AK.transpose() * m) / (kappa_ + theta);
        return m;
      };
      Vector xt;
      mu = solve_for(0.0, xt);
      if ((xt - ball.center).norm() > ball.radius) {
        double lo = 0.0;
        double hi = kappa_;
        for (int it = 0; it < 200; ++it) {
          solve_for(hi, xt);
          if ((xt - ball.center).norm() <= ball.radius) break;
          lo = hi;
          hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          solve_for(mid, xt);
          if ((xt - ball.center).norm() > ball.radius) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        mu = solve_for(hi, xt);
      }
    }

    for (Index k = 0; k < nk; ++k) {
      const Index j = kink[k];
      out[j] = std::clamp(mu[k] / rho_[j], 0.0, 1.0);
    }
    return out;
  }

 private:
  static Vector out_with(Vector out, const std::vector<Index>& kink, const Vector& lam) {
    for (Index j : kink) out[j] = std::clamp(lam[j], 0.0, 1.0);
    return out;
  }

  const FeasibleSet& set_;
  const Vector& z_;
  double kappa_;
  Vector c0_;
  Matrix A_;
  Vector b_;
  Vector rho_;
};

struct Incumbent {
  Vector x;
  double f = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();

  void offer_primal(const Vector& cand, double value) {
    if (value < f) {
      f = value;
      x = cand;
    }
  }
  void offer_lower(double value) { lower = std::max(lower, value); }
  double gap() const { return std::max(0.0, f - lower); }
};

StepResult finish(const CompositeStepSpec& spec, const Incumbent& inc, int iters, bool fast) {
  StepResult out{DecisionVector(inc.x)};
  out.objective = composite_objective(spec, inc.x);
  out.gap_bound = fast ? 0.0 : inc.gap();
  out.verified = out.gap_bound <= spec.tol;
  out.fast_path = fast;
  out.iterations = iters;
  return out;
}

StepResult solve_dual(const CompositeStepSpec& spec, const StepDual& dual) {
  const Index r = dual.rows();
  Incumbent inc;

  // lambda = 0 is optimal whenever the unpenalized step is already feasible
  // for every weighted row.
  {
    const Vector lam0 = Vector::Zero(r);
    const Vector x0 = dual.primal_at(lam0);
    inc.offer_primal(x0, dual.primal_value(x0));
    inc.offer_lower(dual.dual_value(lam0, x0));
    if (inc.gap() <= spec.tol) return finish(spec, inc, 0, false);
  }

  auto try_lambda = [&](const Vector& lam) {
    const Vector x = dual.primal_at(lam);
    inc.offer_primal(x, dual.primal_value(x));
    const double d = dual.dual_value(lam, x);
    inc.offer_lower(d);
    return d;
  };
  auto try_polish = [&](const Vector& lam) {
    for (bool primal_cls : {false, true}) {
      Vector cur = lam;
      for (int round = 0; round < 4 && inc.gap() > spec.tol; ++round) {
        cur = dual.polish(cur, primal_cls);
        try_lambda(cur);
      }
      if (inc.gap() <= spec.tol) return;
    }
  };

  const double L = dual.lipschitz();
  if (!(L > 0.0)) return finish(spec, inc, 0, false);

  Vector lam = (dual.dual_gradient(inc.x).array() > 0.0).cast<double>().matrix();
  double d_prev = try_lambda(lam);
  Vector y = lam;
  double t = 1.0;
  int k = 0;
  try_polish(lam);
  while (inc.gap() > spec.tol && k < spec.max_iters) {
    ++k;
    const Vector xy = dual.primal_at(y);
    const Vector next = (y + dual.dual_gradient(xy) / L).cwiseMax(0.0).cwiseMin(1.0);
    const double d_next = try_lambda(next);
    if (d_next < d_prev) {
      // adaptive restart
      y = next;
      t = 1.0;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - lam);
      t = t_next;
    }
    lam = next;
    d_prev = d_next;
    if (k % 10 == 0) try_polish(lam);
  }
  if (inc.gap() > spec.tol) try_polish(lam);
  return finish(spec, inc, k, false);
}

StepResult solve_subgradient(const CompositeStepSpec& spec, const StepDual& dual) {
  const Index r = dual.rows();
  const ConstraintBlock& g = spec.constraints;
  Incumbent inc;
  Vector x = spec.set.project(spec.anchor);
  inc.offer_primal(x, composite_objective(spec, x));
  const Vector scaled_w = spec.eta * spec.gamma * spec.w;
  const double kappa = spec.prox_weight;
  int k = 0;
  for (k = 1; k <= spec.max_iters; ++k) {
    const Vector s = spec.eta * spec.v + g.weighted_violation_subgradient(spec.step, x, scaled_w) +
                     kappa * (x - spec.anchor);
    x = spec.set.project(x - s / (kappa * k));
    inc.offer_primal(x, composite_objective(spec, x));
  }
  // Lower bound from the sign pattern of the best iterate.
  const Vector lam_sign = (dual.dual_gradient(inc.x).array() > 0.0).cast<double>().matrix();
  for (const Vector& lam : {Vector(Vector::Zero(r)), lam_sign}) {
    const Vector xl = dual.primal_at(lam);
    inc.offer_lower(dual.dual_value(lam, xl));
  }
  return finish(spec, inc, k - 1, false);
}

}  // namespace

double composite_objective(const CompositeStepSpec& spec, const Vector& x) {
  const Vector gx = spec.constraints.evaluate(spec.step, x);
  return spec.eta * spec.v.dot(x) + spec.eta * spec.gamma * spec.w.dot(gx.cwiseMax(0.0)) +
         spec.prox_weight * 0.5 * (x - spec.anchor).squaredNorm();
}

double objective_scale(const CompositeStepSpec& spec, double F) {
  const double diam = spec.set.diameter();
  return spec.eta * (spec.v.norm() * diam + spec.gamma * spec.w.lpNorm<1>() * F) + diam * diam;
}

StepResult solve_composite_step(const CompositeStepSpec& spec, InnerMethod method) {
  validate(spec);
  if (spec.gamma * spec.w.lpNorm<1>() == 0.0) {
    Incumbent inc;
    inc.x = spec.set.project(spec.anchor - spec.eta * spec.v / spec.prox_weight);
    return finish(spec, inc, 0, true);
  }
  const StepDual dual(spec);
  if (method == InnerMethod::Subgradient) return solve_subgradient(spec, dual);
  return solve_dual(spec, dual);
}

DecisionVector brute_force_step(const CompositeStepSpec& spec, double resolution,
                                const std::optional<Box>& window) {
  validate(spec);
  const Index p = spec.set.dim();
  if (p > 2) throw UnsupportedDimension("brute_force_step supports p <= 2");
  if (!(resolution > 0.0)) throw InvalidParameter("brute_force_step: resolution must be > 0");

  Box region = spec.set.bounding_box();
  if (window) {
    region.lower = region.lower.cwiseMax(window->lower);
    region.upper = region.upper.cwiseMin(window->upper);
    if ((region.lower.array() > region.upper.array()).any()) {
      throw InvalidInput("brute_force_step: window does not meet X");
    }
  }
  std::vector<long> n(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    n[i] = std::max(1L, static_cast<long>(std::ceil((region.upper[i] - region.lower[i]) / resolution)));
  }
  auto coord = [&](Index i, long k) {
    if (k == n[i]) return region.upper[i];
    return region.lower[i] + (region.upper[i] - region.lower[i]) * static_cast<double>(k) /
                                 static_cast<double>(n[i]);
  };

  Vector best = spec.set.project(region.lower);
  double best_f = std::numeric_limits<double>::infinity();
  Vector x(p);
  const long n1 = p == 2 ? n[1] : 0;
  for (long a = 0; a <= n[0]; ++a) {
    x[0] = coord(0, a);
    for (long b = 0; b <= n1; ++b) {
      if (p == 2) x[1] = coord(1, b);
      if (!spec.set.contains(x, 0.0)) continue;
      const double f = composite_objective(spec, x);
      if (f < best_f) {
        best_f = f;
        best = x;
      }
    }
  }
  return DecisionVector(best);
}

}  // namespace ltoco
