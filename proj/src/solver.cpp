#include "ihoc/solver.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "ihoc/errors.hpp"

namespace ihoc {

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  positive(outer_tol, "outer_tol");
  positive(inner_grad_tol, "inner_grad_tol");
  positive(constraint_tol, "constraint_tol");
  positive(kkt_tol, "kkt_tol");
  positive(penalty_init, "penalty_init");
  if (!(penalty_growth > 1.0)) {
    throw std::invalid_argument("penalty_growth must exceed 1");
  }
  if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
  if (max_inner < 1) throw std::invalid_argument("max_inner must be >= 1");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::LineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

namespace {

constexpr double kC1 = 1e-4;
constexpr double kC2 = 0.9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective evaluation that maps range errors and NaN to +inf so trial steps
// into undefined territory are simply rejected.
double safe_value(const std::function<double(const Vec&)>& f, const Vec& z) {
  try {
    const double v = f(z);
    return std::isfinite(v) ? v : kInf;
  } catch (const std::range_error&) {
    return kInf;
  }
}

struct LineSearchResult {
  double step = 0.0;
  double value = 0.0;
  Vec gradient;
  bool ok = false;
};

// Strong-Wolfe line search by bracketing and safeguarded cubic interpolation.
// Near machine precision, where decreases in f are no longer measurable, a
// step is also accepted under the approximate Wolfe conditions (value within
// a relative 1e-10 of f0, slope in [c2 f'(0), -0.8 f'(0)]).
class WolfeSearch {
 public:
  WolfeSearch(const std::function<double(const Vec&)>& f,
              const std::function<Vec(const Vec&)>& grad, const Vec& z,
              const Vec& p, double f0, double d0)
      : f_(f), grad_(grad), z_(z), p_(p), f0_(f0), d0_(d0) {
    flat_ = 1e-10 * std::max(1.0, std::abs(f0));
  }

  LineSearchResult run(double initial_step) {
    double lo = 0.0, f_lo = f0_, d_lo = d0_;
    double hi = kInf, f_hi = kInf, d_hi = kNaN;
    double a = initial_step;
    for (int it = 0; it < 80; ++it) {
      const Vec za = z_ + a * p_;
      const double fa = safe_value(f_, za);
      Vec ga;
      double da = kNaN;
      if (std::isfinite(fa)) {
        ga = grad_(za);
        da = ga.dot(p_);
        if (!std::isfinite(da)) da = kNaN;
      }
      if (std::isfinite(da)) {
        const bool strong =
            fa <= f0_ + kC1 * a * d0_ && std::abs(da) <= -kC2 * d0_;
        const bool approx = fa <= f0_ + flat_ && da >= kC2 * d0_ &&
                            da <= -0.8 * d0_;
        if (strong || approx) return {a, fa, std::move(ga), true};
        if (fa < best_value_) {
          best_value_ = fa;
          best_step_ = a;
          best_gradient_ = ga;
        }
      }
      if (!std::isfinite(da) || da >= 0.0 || fa > f_lo + flat_) {
        hi = a;
        f_hi = fa;
        d_hi = da;
      } else {
        lo = a;
        f_lo = fa;
        d_lo = da;
      }
      if (!std::isfinite(hi)) {
        a = 2.0 * a;
        continue;
      }
      const double width = hi - lo;
      if (width <= 1e-16 * std::max(1.0, lo)) break;
      double next = kNaN;
      if (std::isfinite(f_hi) && std::isfinite(d_hi)) {
        next = cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi);
      }
      if (!(next >= lo + 0.1 * width && next <= hi - 0.1 * width)) {
        next = lo + 0.5 * width;
      }
      a = next;
    }
    if (best_step_ > 0.0 && best_value_ < f0_) {
      return {best_step_, best_value_, std::move(best_gradient_), true};
    }
    return {};
  }

 private:
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  static double cubic_min(double a, double fa, double da, double b, double fb,
                          double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double rad = d1 * d1 - da * db;
    if (!(rad >= 0.0)) return kNaN;
    const double d2 = std::copysign(std::sqrt(rad), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  }

  const std::function<double(const Vec&)>& f_;
  const std::function<Vec(const Vec&)>& grad_;
  const Vec& z_;
  const Vec& p_;
  double f0_, d0_;
  double flat_ = 0.0;
  double best_value_ = kInf;
  double best_step_ = 0.0;
  Vec best_gradient_;
};

}  // namespace

InnerResult bfgs_minimize(const std::function<double(const Vec&)>& f,
                          const std::function<Vec(const Vec&)>& grad,
                          const Vec& z0, double grad_tol, int max_iter) {
  const int dim = static_cast<int>(z0.size());
  InnerResult res;
  res.z = z0;
  res.value = f(z0);
  res.gradient = grad(z0);
  if (dim == 0) {
    res.converged = true;
    return res;
  }
  Mat H = Mat::Identity(dim, dim);
  bool identity = true;
  bool scaled = false;
  int stall = 0;
  double best_gnorm = res.gradient.lpNorm<Eigen::Infinity>();

  for (int k = 0; k < max_iter; ++k) {
    if (res.gradient.lpNorm<Eigen::Infinity>() <= grad_tol) {
      res.converged = true;
      return res;
    }
    Vec p = -H * res.gradient;
    double d0 = p.dot(res.gradient);
    if (!(d0 < 0.0)) {
      H.setIdentity();
      identity = true;
      scaled = false;
      p = -res.gradient;
      d0 = p.dot(res.gradient);
    }
    // First step from identity: keep the trial step length O(1) in z.
    const double step0 =
        identity && !scaled ? std::min(1.0, 1.0 / p.lpNorm<Eigen::Infinity>())
                            : 1.0;
    LineSearchResult ls =
        WolfeSearch(f, grad, res.z, p, res.value, d0).run(step0);
    if (!ls.ok) {
      if (!identity) {
        H.setIdentity();
        identity = true;
        scaled = false;
        continue;
      }
      res.line_search_failed = true;
      return res;
    }
    ++res.iterations;
    const Vec s = ls.step * p;
    const Vec y = ls.gradient - res.gradient;
    const double decrease = res.value - ls.value;
    res.z += s;
    res.value = ls.value;
    res.gradient = std::move(ls.gradient);

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        H *= sy / y.squaredNorm();
        scaled = true;
      }
      const Vec Hy = H * y;
      const double yHy = y.dot(Hy);
      H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
           (Hy * s.transpose() + s * Hy.transpose()) / sy;
      identity = false;
    } else {
      H.setIdentity();
      identity = true;
      scaled = false;
    }

    const double gnorm = res.gradient.lpNorm<Eigen::Infinity>();
    if (gnorm < best_gnorm) {
      best_gnorm = gnorm;
      stall = 0;
    } else if (decrease <= 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::abs(res.value))) {
      if (++stall >= 20) break;
    } else {
      stall = 0;
    }
  }
  res.converged = res.gradient.lpNorm<Eigen::Infinity>() <= grad_tol;
  return res;
}

SolveReport solve(const NlpFunctions& nlp, const Vec& z0,
                  const SolverConfig& cfg) {
  cfg.validate();
  if (z0.size() != nlp.num_variables) {
    throw DimensionError("initial guess length does not match the NLP");
  }
  SolveReport rep;
  rep.z = z0;
  rep.multipliers = Vec::Zero(nlp.num_constraints);
  double rho = cfg.penalty_init;
  const bool has_constraints = nlp.num_constraints > 0;

  auto constraints = [&](const Vec& z) -> Vec {
    return has_constraints ? nlp.constraints(z) : Vec();
  };
  Vec c = constraints(rep.z);
  double viol_prev = has_constraints ? c.lpNorm<Eigen::Infinity>() : 0.0;
  std::optional<double> la_prev;
  bool ls_failure = false;

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    const Vec r = rep.multipliers;
    auto phi = [&](const Vec& z) {
      double v = nlp.cost(z);
      if (has_constraints) {
        const Vec cz = nlp.constraints(z);
        v += r.dot(cz) + 0.5 * rho * cz.squaredNorm();
      }
      return v;
    };
    auto phi_grad = [&](const Vec& z) -> Vec {
      if (!has_constraints) return nlp.lagrangian_gradient(z, Vec());
      return nlp.lagrangian_gradient(z, r + rho * nlp.constraints(z));
    };
    InnerResult inner = bfgs_minimize(phi, phi_grad, rep.z,
                                      cfg.inner_grad_tol, cfg.max_inner);
    rep.inner_iters_total += inner.iterations;
    rep.outer_iters = outer;
    rep.z = inner.z;
    ls_failure = inner.line_search_failed;

    c = constraints(rep.z);
    const double viol = has_constraints ? c.lpNorm<Eigen::Infinity>() : 0.0;
    rep.violation_history.push_back(viol);
    rep.max_constraint_violation = viol;
    if (has_constraints) rep.multipliers += rho * c;
    rep.kkt_residual = inner.gradient.lpNorm<Eigen::Infinity>();
    const double la = inner.value;
    const bool la_settled =
        la_prev && std::abs(la - *la_prev) <=
                       cfg.outer_tol * std::max(1.0, std::abs(la));
    la_prev = la;

    if (viol <= cfg.constraint_tol && rep.kkt_residual <= cfg.kkt_tol &&
        (la_settled || inner.converged)) {
      rep.status = SolveStatus::Converged;
      break;
    }
    if (has_constraints && viol > cfg.constraint_tol &&
        viol > 0.25 * viol_prev) {
      rho = std::min(rho * cfg.penalty_growth, cfg.penalty_cap);
      if (rho >= cfg.penalty_cap) rep.degenerate = true;
    }
    viol_prev = viol;
    rep.status = ls_failure ? SolveStatus::LineSearchFailure
                            : SolveStatus::MaxIterations;
  }
  rep.penalty = rho;
  rep.cost = nlp.cost(rep.z);
  return rep;
}

}  // namespace ihoc
