#include "ihoc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ihoc {

namespace {

constexpr double kLogFloor = 1e-12;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void validate_problem(const IhocProblem& p) {
  if (p.nx <= 0 || p.nu <= 0) {
    throw std::invalid_argument(p.name + ": nx and nu must be positive");
  }
  if (p.x0.size() != p.nx) {
    throw std::invalid_argument(p.name + ": x0 length differs from nx");
  }
  if (!p.dynamics || !p.running_cost) {
    throw std::invalid_argument(p.name + ": dynamics and cost are required");
  }
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(0.5, 2.5);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(p.nx), u(p.nu);
    for (int i = 0; i < p.nx; ++i) x[i] = dist(rng);
    for (int i = 0; i < p.nu; ++i) u[i] = dist(rng) - 1.5;
    const Vec f = p.dynamics(x, u);
    if (f.size() != p.nx) {
      throw std::invalid_argument(p.name + ": dynamics output length != nx");
    }
    if (!p.has_jacobians()) continue;

    Mat fx(p.nx, p.nx), fu(p.nx, p.nu);
    Vec gx(p.nx), gu(p.nu);
    p.jac_dynamics(x, u, fx, fu);
    p.grad_cost(x, u, gx, gu);
    auto check = [&](bool is_state, int col) {
      Vec xp = x, xm = x, up = u, um = u;
      if (is_state) {
        xp[col] += h;
        xm[col] -= h;
      } else {
        up[col] += h;
        um[col] -= h;
      }
      const Vec df = (p.dynamics(xp, up) - p.dynamics(xm, um)) / (2 * h);
      const double dg =
          (p.running_cost(xp, up) - p.running_cost(xm, um)) / (2 * h);
      for (int r = 0; r < p.nx; ++r) {
        const double analytic = is_state ? fx(r, col) : fu(r, col);
        if (!close_rel(analytic, df[r], 1e-5)) {
          std::ostringstream msg;
          msg << p.name << ": dynamics Jacobian mismatch at row " << r
              << ", " << (is_state ? "x" : "u") << col;
          throw std::invalid_argument(msg.str());
        }
      }
      const double analytic_g = is_state ? gx[col] : gu[col];
      if (!close_rel(analytic_g, dg, 1e-5)) {
        std::ostringstream msg;
        msg << p.name << ": cost gradient mismatch at "
            << (is_state ? "x" : "u") << col;
        throw std::invalid_argument(msg.str());
      }
    };
    for (int c = 0; c < p.nx; ++c) check(true, c);
    for (int c = 0; c < p.nu; ++c) check(false, c);
  }
}

IhocProblem example1(Example1Form form) {
  const double ln2 = std::numbers::ln2;
  const double sqrt2 = std::numbers::sqrt2;
  auto y_star = [=](double t) { return ln2 * std::exp(-sqrt2 * t); };

  IhocProblem p;
  p.nx = 1;
  p.nu = 1;
  ExactSolution exact;
  exact.cost = kExample1OptimalCost;
  exact.control = [=](double t) {
    return Vec::Constant(1, -(1.0 + sqrt2) * y_star(t));
  };

  if (form == Example1Form::A) {
    p.name = "example1-a";
    p.x0 = Vec::Constant(1, 2.0);
    p.dynamics = [](const Vec& x, const Vec& u) {
      const double xc = std::max(x[0], kLogFloor);
      return Vec::Constant(1, xc * std::log(xc) + xc * u[0]);
    };
    p.running_cost = [](const Vec& x, const Vec& u) {
      const double lx = std::log(std::max(x[0], kLogFloor));
      return 0.5 * (lx * lx + u[0] * u[0]);
    };
    p.jac_dynamics = [](const Vec& x, const Vec& u, Mat& fx, Mat& fu) {
      const double xc = std::max(x[0], kLogFloor);
      fx.resize(1, 1);
      fu.resize(1, 1);
      fx(0, 0) = x[0] > kLogFloor ? std::log(xc) + 1.0 + u[0] : 0.0;
      fu(0, 0) = xc;
    };
    p.grad_cost = [](const Vec& x, const Vec& u, Vec& gx, Vec& gu) {
      const double xc = std::max(x[0], kLogFloor);
      gx.resize(1);
      gu.resize(1);
      gx[0] = x[0] > kLogFloor ? std::log(xc) / xc : 0.0;
      gu[0] = u[0];
    };
    p.in_domain = [](const Vec& x) { return x[0] > kLogFloor; };
    exact.state = [=](double t) {
      return Vec::Constant(1, std::exp(y_star(t)));
    };
  } else {
    p.name = "example1-b";
    p.x0 = Vec::Constant(1, ln2);
    p.dynamics = [](const Vec& z, const Vec& u) {
      return Vec::Constant(1, z[0] + u[0]);
    };
    p.running_cost = [](const Vec& z, const Vec& u) {
      return 0.5 * (z[0] * z[0] + u[0] * u[0]);
    };
    p.jac_dynamics = [](const Vec&, const Vec&, Mat& fx, Mat& fu) {
      fx = Mat::Ones(1, 1);
      fu = Mat::Ones(1, 1);
    };
    p.grad_cost = [](const Vec& z, const Vec& u, Vec& gx, Vec& gu) {
      gx = Vec::Constant(1, z[0]);
      gu = Vec::Constant(1, u[0]);
    };
    exact.state = [=](double t) { return Vec::Constant(1, y_star(t)); };
  }
  p.exact = std::move(exact);
  validate_problem(p);
  return p;
}

namespace example2_data {

Eigen::Matrix2d closed_loop() {
  Eigen::Matrix2d m;
  m << 0.0, 1.0, -2.82842712474619, -3.557647291327851;
  return m;
}

Eigen::RowVector2d gain() {
  Eigen::RowVector2d k;
  k << 4.828427124746193, 2.557647291327851;
  return k;
}

}  // namespace example2_data

namespace {

// exp(M t) for a 2x2 matrix with distinct real eigenvalues (Sylvester).
Eigen::Matrix2d expm_2x2(const Eigen::Matrix2d& m, double t) {
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  const double l1 = 0.5 * (tr - disc);
  const double l2 = 0.5 * (tr + disc);
  const double e1 = std::exp(l1 * t);
  const double e2 = std::exp(l2 * t);
  const double a = (l2 * e1 - l1 * e2) / (l2 - l1);
  const double b = (e2 - e1) / (l2 - l1);
  return a * Eigen::Matrix2d::Identity() + b * m;
}

}  // namespace

IhocProblem example2() {
  IhocProblem p;
  p.name = "example2";
  p.nx = 2;
  p.nu = 1;
  p.x0 = Vec(2);
  p.x0 << -4.0, 4.0;
  p.dynamics = [](const Vec& x, const Vec& u) {
    Vec f(2);
    f << x[1], 2.0 * x[0] - x[1] + u[0];
    return f;
  };
  p.running_cost = [](const Vec& x, const Vec& u) {
    return x[0] * x[0] + 0.5 * x[1] * x[1] + 0.25 * u[0] * u[0];
  };
  p.jac_dynamics = [](const Vec&, const Vec&, Mat& fx, Mat& fu) {
    fx.resize(2, 2);
    fx << 0.0, 1.0, 2.0, -1.0;
    fu.resize(2, 1);
    fu << 0.0, 1.0;
  };
  p.grad_cost = [](const Vec& x, const Vec& u, Vec& gx, Vec& gu) {
    gx.resize(2);
    gx << 2.0 * x[0], x[1];
    gu = Vec::Constant(1, 0.5 * u[0]);
  };

  const Eigen::Matrix2d m = example2_data::closed_loop();
  const Eigen::RowVector2d k = example2_data::gain();
  const Eigen::Vector2d x0(-4.0, 4.0);
  ExactSolution exact;
  exact.cost = example2_data::kOptimalCost;
  exact.state = [=](double t) -> Vec { return expm_2x2(m, t) * x0; };
  exact.control = [=](double t) -> Vec {
    return Vec::Constant(1, -(k * (expm_2x2(m, t) * x0))(0));
  };
  p.exact = std::move(exact);
  validate_problem(p);
  return p;
}

IhocProblem make_problem(std::string_view name) {
  if (name == "example1-a") return example1(Example1Form::A);
  if (name == "example1-b") return example1(Example1Form::B);
  if (name == "example2") return example2();
  throw std::invalid_argument("unknown problem: " + std::string(name));
}

std::vector<std::string> problem_names() {
  return {"example1-a", "example1-b", "example2"};
}

std::pair<Mat, Mat> eval_exact(const ExactSolution& sol,
                               const std::vector<double>& t_grid) {
  const int count = static_cast<int>(t_grid.size());
  Mat states, controls;
  for (int c = 0; c < count; ++c) {
    if (!(t_grid[c] >= 0.0)) {
      throw std::invalid_argument("eval_exact: times must be nonnegative");
    }
    const Vec x = sol.state(t_grid[c]);
    const Vec u = sol.control(t_grid[c]);
    if (c == 0) {
      states.resize(x.size(), count);
      controls.resize(u.size(), count);
    }
    states.col(c) = x;
    controls.col(c) = u;
  }
  return {states, controls};
}

}  // namespace ihoc
