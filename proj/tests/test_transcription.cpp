#include <doctest.h>

#include <cmath>
#include <memory>

#include "ihoc/analysis.hpp"
#include "ihoc/errors.hpp"
#include "ihoc/transcription.hpp"
#include "test_support.hpp"

using namespace ihoc;
using ihoc::test::near_rel;

namespace {

Transcription make(const IhocProblem& p, double alpha, int n, MapKind kind, double L,
                   TranscriptionForm form = TranscriptionForm::Generic) {
  return Transcription(p, discretize(alpha, n), DomainMap(kind, L), form);
}

Vec exact_z(const Transcription& tr) {
  const Vec t = tr.t_nodes();
  const auto [X, U] = eval_exact(*tr.problem().exact, std::vector<double>(t.begin(), t.end()));
  return tr.pack(X, U);
}

Vec random_vec(std::mt19937_64& g, int n, double lo, double hi) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = test::uniform(g, lo, hi);
  return v;
}

IhocProblem zero_problem() {
  IhocProblem p;
  p.name = "constant";
  p.nx = 2;
  p.nu = 1;
  p.x0 = Vec{{0.7, -1.2}};
  p.dynamics = [](const Vec&, const Vec&) { return Vec::Zero(2).eval(); };
  p.running_cost = [](const Vec&, const Vec&) { return 0.0; };
  p.jac_dynamics = [](const Vec&, const Vec&, Mat& fx, Mat& fu) {
    fx = Mat::Zero(2, 2);
    fu = Mat::Zero(2, 1);
  };
  p.grad_cost = [](const Vec&, const Vec&, Vec& gx, Vec& gu) {
    gx = Vec::Zero(2);
    gu = Vec::Zero(1);
  };
  return p;
}

// Smooth nonlinear problem with random coefficients and analytic derivatives.
IhocProblem synthetic_problem(unsigned seed) {
  auto g = test::rng(seed);
  const int nx = 2 + seed % 2, nu = 1 + seed % 2;
  Mat A(nx, nx), B(nx, nu), C(nx, nx);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nx; ++j) {
      A(i, j) = test::uniform(g, -1, 1);
      C(i, j) = test::uniform(g, -0.5, 0.5);
    }
    for (int j = 0; j < nu; ++j) B(i, j) = test::uniform(g, -1, 1);
  }
  IhocProblem p;
  p.name = "synthetic-" + std::to_string(seed);
  p.nx = nx;
  p.nu = nu;
  p.x0 = random_vec(g, nx, -1, 1);
  p.dynamics = [=](const Vec& x, const Vec& u) {
    return (A * x + B * u + C * x.array().sin().matrix()).eval();
  };
  p.running_cost = [](const Vec& x, const Vec& u) {
    return 0.5 * x.squaredNorm() + 0.25 * u.array().pow(4).sum() + std::cos(x[0] * u[0]);
  };
  p.jac_dynamics = [=](const Vec& x, const Vec&, Mat& fx, Mat& fu) {
    fx = A + C * x.array().cos().matrix().asDiagonal();
    fu = B;
  };
  p.grad_cost = [](const Vec& x, const Vec& u, Vec& gx, Vec& gu) {
    const double s = -std::sin(x[0] * u[0]);
    gx = x;
    gx[0] += s * u[0];
    gu = u.array().pow(3);
    gu[0] += s * x[0];
  };
  return p;
}

void check_gradient(const Transcription& tr, std::mt19937_64& g) {
  const Vec z = random_vec(g, tr.num_variables(), 0.2, 1.2);
  const Vec r = random_vec(g, tr.num_constraints(), -1, 1);
  const Vec grad = tr.lagrangian_gradient(z, r);
  const double h = 1e-6;
  for (int i = 0; i < z.size(); ++i) {
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    const double fd = (tr.lagrangian(zp, r) - tr.lagrangian(zm, r)) / (2 * h);
    INFO(tr.problem().name << " component " << i);
    CHECK(near_rel(grad[i], fd, 1e-6));
  }
}

}  // namespace

TEST_CASE("layout") {
  const Transcription t1 = make(example2(), 0.5, 1, MapKind::Logarithmic, 1.0);
  CHECK(t1.num_variables() == 4);
  CHECK(t1.num_constraints() == 2);

  const Transcription tr = make(example2(), 0.5, 5, MapKind::Logarithmic, 1.0);
  CHECK(tr.num_variables() == 2 * 5 + 6);
  CHECK(tr.num_constraints() == 10);
  CHECK(tr.x_index(0, 1) == 0);
  CHECK(tr.x_index(1, 5) == 9);
  CHECK(tr.u_index(0, 0) == 10);
  CHECK(tr.u_index(0, 5) == 15);
  CHECK_THROWS_AS(tr.x_index(0, 0), std::out_of_range);
  CHECK_THROWS_AS(tr.x_index(2, 1), std::out_of_range);
  CHECK_THROWS_AS(tr.u_index(0, 6), std::out_of_range);

  const Vec z = Vec::LinSpaced(16, 1.0, 16.0);
  const Mat X = tr.states(z), U = tr.controls(z);
  CHECK(X.col(0) == example2().x0);
  CHECK(X(1, 3) == z[tr.x_index(1, 3)]);
  CHECK(U(0, 0) == z[tr.u_index(0, 0)]);
  CHECK(tr.pack(X, U) == z);
  CHECK(tr.initial_guess(GuessPreset::Ones) == Vec::Ones(16));
  CHECK(tr.initial_guess(GuessPreset::Half) == Vec::Constant(16, 0.5));
  CHECK_THROWS_AS(tr.cost(Vec::Ones(15)), DimensionError);
  CHECK_THROWS_AS(tr.lagrangian_gradient(z, Vec::Ones(3)), DimensionError);
  CHECK_THROWS_AS(discretize(0.5, 0), DomainError);
}

TEST_CASE("row zero is never emitted") {
  const Transcription tr = make(zero_problem(), 0.5, 6, MapKind::Algebraic, 1.0);
  CHECK(tr.constraints(tr.initial_guess(GuessPreset::Ones)).size() == 2 * 6);
}

TEST_CASE("exact solution nearly satisfies the collocated equations") {
  const Transcription tr = make(example1(Example1Form::B), 0.5, 16, MapKind::Logarithmic, 6.0);
  const Vec z = exact_z(tr);
  CHECK(tr.constraints(z).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(tr.cost(z) - 0.579958091) <= 1e-8);
}

TEST_CASE("exact-solution residual decays with n") {
  double prev = INFINITY;
  for (int n : {4, 8, 12, 16}) {
    const Transcription tr = make(example1(Example1Form::B), 0.5, n, MapKind::Logarithmic, 4.0);
    const double res = tr.constraints(exact_z(tr)).cwiseAbs().maxCoeff();
    INFO("n=" << n << " residual=" << res);
    CHECK(res <= 3.0 * prev);
    prev = res;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("factored forms agree with the generic form") {
  auto g = test::rng(21);
  struct Case {
    double alpha;
    int n;
    MapKind kind;
    double L;
  };
  for (Case c : {Case{0.0, 8, MapKind::Logarithmic, 1.0}, Case{0.0, 8, MapKind::Algebraic, 1.0},
                 Case{0.5, 12, MapKind::Algebraic, 2.5}, Case{1.5, 10, MapKind::Logarithmic, 4.0}}) {
    for (const IhocProblem& p : {example2(), example1(Example1Form::B)}) {
      const Transcription gen = make(p, c.alpha, c.n, c.kind, c.L, TranscriptionForm::Generic);
      const Transcription fac = make(p, c.alpha, c.n, c.kind, c.L, TranscriptionForm::Factored);
      for (int s = 0; s < 5; ++s) {
        const Vec z = random_vec(g, gen.num_variables(), -1, 1);
        const Vec cg = gen.constraints(z), cf = fac.constraints(z);
        for (int i = 0; i < cg.size(); ++i) CHECK(near_rel(cg[i], cf[i], 1e-13));
        CHECK(near_rel(gen.cost(z), fac.cost(z), 1e-13));
      }
    }
  }
}

TEST_CASE("cost smoke tests") {
  const Transcription zero = make(zero_problem(), 0.5, 7, MapKind::Logarithmic, 2.0);
  CHECK(zero.cost(zero.initial_guess(GuessPreset::Ones)) == 0.0);
  CHECK(zero.lagrangian_gradient(zero.initial_guess(GuessPreset::Half), Vec::Zero(14)) ==
        Vec::Zero(zero.num_variables()));

  IhocProblem one = zero_problem();
  one.running_cost = [](const Vec&, const Vec&) { return 1.0; };
  one.grad_cost = {};
  for (int n : {4, 20, 60}) {
    const Transcription tr = make(one, 0.5, n, MapKind::Logarithmic, 3.0);
    const double J = tr.cost(tr.initial_guess(GuessPreset::Ones));
    CHECK(std::isfinite(J));
    CHECK(J > 0.0);
  }

  IhocProblem bad = zero_problem();
  bad.running_cost = [](const Vec& x, const Vec&) { return x[0] > 5 ? NAN : 0.0; };
  bad.grad_cost = {};
  const Transcription tb = make(bad, 0.5, 3, MapKind::Logarithmic, 1.0);
  CHECK_THROWS_AS(tb.cost(Vec::Constant(tb.num_variables(), 10.0)), RangeError);
}

TEST_CASE("analytic gradients match finite differences") {
  auto g = test::rng(33);
  check_gradient(make(example2(), 0.5, 5, MapKind::Logarithmic, 2.5), g);
  check_gradient(make(example2(), 0.0, 5, MapKind::Algebraic, 1.0, TranscriptionForm::Factored), g);
  check_gradient(make(example1(Example1Form::B), 0.5, 7, MapKind::Logarithmic, 4.0), g);
  check_gradient(make(example1(Example1Form::A), 1.0, 6, MapKind::Algebraic, 2.0), g);
  for (unsigned seed : {1u, 2u, 3u}) {
    check_gradient(make(synthetic_problem(seed), -0.3, 6, MapKind::Logarithmic, 1.5), g);
  }
}

TEST_CASE("finite-difference fallback agrees with analytic derivatives") {
  auto g = test::rng(44);
  for (unsigned seed : {4u, 5u}) {
    IhocProblem p = synthetic_problem(seed);
    const Transcription analytic = make(p, 0.5, 6, MapKind::Logarithmic, 2.0);
    p.jac_dynamics = {};
    p.grad_cost = {};
    const Transcription numeric = make(p, 0.5, 6, MapKind::Logarithmic, 2.0);
    const Vec z = random_vec(g, analytic.num_variables(), -1, 1);
    const Vec r = random_vec(g, analytic.num_constraints(), -1, 1);
    const Vec ga = analytic.lagrangian_gradient(z, r), gn = numeric.lagrangian_gradient(z, r);
    for (int i = 0; i < ga.size(); ++i) CHECK(near_rel(ga[i], gn[i], 1e-7));
    const Mat ja = analytic.constraint_jacobian(z), jn = numeric.constraint_jacobian(z);
    CHECK((ja - jn).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, ja.cwiseAbs().maxCoeff()));
    check_gradient(numeric, g);
  }
}

TEST_CASE("Jacobian and gradients are consistent with the Lagrangian gradient") {
  auto g = test::rng(55);
  const Transcription tr = make(example2(), 0.5, 6, MapKind::Logarithmic, 2.5);
  const Vec z = random_vec(g, tr.num_variables(), -1, 1);
  const Vec r = random_vec(g, tr.num_constraints(), -1, 1);
  const Vec lhs = tr.lagrangian_gradient(z, r);
  const Vec rhs = tr.cost_gradient(z) + tr.constraint_jacobian(z).transpose() * r;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
}

TEST_CASE("recovery reproduces nodes and tracks the exact solution") {
  auto tr = std::make_shared<const Transcription>(
      make(example1(Example1Form::B), 0.5, 10, MapKind::Logarithmic, 4.25));
  const SolveReport rep = solve(make_nlp(tr), tr->initial_guess(GuessPreset::Ones));
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(rep.kkt_residual <= 1e-6);
  CHECK(tr->lagrangian_gradient(rep.z, rep.multipliers).cwiseAbs().maxCoeff() <= 1e-6);

  const Vec tn = tr->t_nodes();
  const Trajectory at_nodes = tr->recover(rep.z, std::vector<double>(tn.begin(), tn.end()));
  CHECK(at_nodes.states_eval == at_nodes.states);
  CHECK(at_nodes.controls_eval == at_nodes.controls);
  CHECK(at_nodes.states(0, 0) == tr->problem().x0[0]);
  for (int j = 0; j <= 10; ++j) CHECK(at_nodes.state_at(tn[j])[0] == at_nodes.states(0, j));

  const Trajectory traj = tr->recover(rep.z, uniform_times());
  CHECK(error_report(traj, *tr->problem().exact, EvalGrid::Uniform).mae_xu <= 1e-5);
  CHECK_THROWS_AS(tr->recover(rep.z, {-1.0}), DomainError);
}

TEST_CASE("constant problem recovers the initial state everywhere") {
  const Transcription tr = make(zero_problem(), 0.5, 5, MapKind::Algebraic, 1.0);
  Vec z = tr.initial_guess(GuessPreset::Half);
  Mat X = tr.states(z);
  for (int j = 1; j <= 5; ++j) X.col(j) = tr.problem().x0;
  z = tr.pack(X, tr.controls(z));
  CHECK(tr.constraints(z).cwiseAbs().maxCoeff() == 0.0);
  const Trajectory traj = tr.recover(z, uniform_times());
  for (int i = 0; i < traj.states_eval.cols(); ++i) {
    CHECK((traj.states_eval.col(i) - tr.problem().x0).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("domain violations are counted") {
  const Transcription tr = make(example1(Example1Form::A), 0.5, 4, MapKind::Logarithmic, 1.0);
  Vec z = tr.initial_guess(GuessPreset::Ones);
  CHECK(tr.domain_violations(z) == 0);
  z[tr.x_index(0, 2)] = -0.3;
  z[tr.x_index(0, 4)] = 0.0;
  CHECK(tr.domain_violations(z) == 2);
}
