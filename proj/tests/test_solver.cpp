#include <doctest.h>

#include <cmath>
#include <memory>

#include "ihoc/solver.hpp"
#include "ihoc/transcription.hpp"
#include "test_support.hpp"

using namespace ihoc;

namespace {

NlpFunctions toy() {
  NlpFunctions nlp;
  nlp.num_variables = 2;
  nlp.num_constraints = 1;
  nlp.cost = [](const Vec& z) { return z.squaredNorm(); };
  nlp.constraints = [](const Vec& z) { return Vec{{z[0] + z[1] - 1.0}}; };
  nlp.lagrangian_gradient = [](const Vec& z, const Vec& r) {
    return (2.0 * z + Vec::Constant(2, r[0])).eval();
  };
  return nlp;
}

NlpFunctions example2_nlp() {
  auto tr = std::make_shared<const Transcription>(
      example2(), discretize(0.5, 9), DomainMap(MapKind::Logarithmic, 2.5));
  return make_nlp(tr);
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(SolverConfig{}.validate());
  SolverConfig c;
  c.penalty_growth = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("penalty_growth"), std::invalid_argument);
  c = {};
  c.outer_tol = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("outer_tol"), std::invalid_argument);
  c = {};
  c.max_inner = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.constraint_tol = -1e-3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("status names") {
  CHECK(to_string(SolveStatus::Converged) == "converged");
  CHECK(to_string(SolveStatus::MaxIterations) == "max_iterations");
  CHECK(to_string(SolveStatus::LineSearchFailure) == "line_search_failure");
}

TEST_CASE("unconstrained quadratic") {
  auto g = test::rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    Vec a(6);
    for (int i = 0; i < 6; ++i) a[i] = test::uniform(g, -10, 10);
    NlpFunctions nlp;
    nlp.num_variables = 6;
    nlp.num_constraints = 0;
    nlp.cost = [a](const Vec& z) { return (z - a).squaredNorm(); };
    nlp.constraints = [](const Vec&) { return Vec(0); };
    nlp.lagrangian_gradient = [a](const Vec& z, const Vec&) { return (2.0 * (z - a)).eval(); };
    const SolveReport rep = solve(nlp, Vec::Zero(6));
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.outer_iters == 1);
    CHECK((rep.z - a).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("equality-constrained toy problem") {
  const SolveReport rep = solve(toy(), Vec{{3.0, -2.0}});
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(std::abs(rep.z[0] - 0.5) <= 1e-8);
  CHECK(std::abs(rep.z[1] - 0.5) <= 1e-8);
  CHECK(std::abs(rep.multipliers[0] + 1.0) <= 1e-8);
  CHECK(rep.cost == doctest::Approx(0.5));
  CHECK(rep.max_constraint_violation <= SolverConfig{}.constraint_tol);
  CHECK_FALSE(rep.degenerate);
}

TEST_CASE("length mismatch is rejected") {
  CHECK_THROWS(solve(toy(), Vec::Zero(3)));
}

TEST_CASE("iteration cap yields MaxIterations") {
  SolverConfig cfg;
  cfg.max_outer = 1;
  cfg.max_inner = 2;
  const SolveReport rep = solve(example2_nlp(), Vec::Ones(2 * 9 + 10), cfg);
  CHECK(rep.status != SolveStatus::Converged);
  CHECK(rep.outer_iters == 1);
}

TEST_CASE("example 2 cost") {
  const NlpFunctions nlp = example2_nlp();
  const SolveReport rep = solve(nlp, Vec::Ones(nlp.num_variables));
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(std::abs(rep.cost - example2_data::kOptimalCost) <= 1e-8);
  CHECK(rep.kkt_residual <= 1e-6);
  CHECK(nlp.lagrangian_gradient(rep.z, rep.multipliers).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.max_constraint_violation <= 1e-10);
  REQUIRE_FALSE(rep.violation_history.empty());
  CHECK(rep.violation_history.back() <= rep.violation_history.front());
}

TEST_CASE("solves are deterministic") {
  const NlpFunctions nlp = example2_nlp();
  const SolveReport a = solve(nlp, Vec::Constant(nlp.num_variables, 0.5));
  const SolveReport b = solve(nlp, Vec::Constant(nlp.num_variables, 0.5));
  CHECK(a.z == b.z);
  CHECK(a.multipliers == b.multipliers);
  CHECK(a.cost == b.cost);
  CHECK(a.outer_iters == b.outer_iters);
  CHECK(a.inner_iters_total == b.inner_iters_total);
  CHECK(a.violation_history == b.violation_history);
}

TEST_CASE("inner BFGS on the Rosenbrock function") {
  auto f = [](const Vec& z) {
    return 100 * std::pow(z[1] - z[0] * z[0], 2) + std::pow(1 - z[0], 2);
  };
  auto grad = [](const Vec& z) {
    return Vec{{-400 * z[0] * (z[1] - z[0] * z[0]) - 2 * (1 - z[0]),
                200 * (z[1] - z[0] * z[0])}};
  };
  const InnerResult res = bfgs_minimize(f, grad, Vec{{-1.2, 1.0}}, 1e-9, 500);
  CHECK(res.converged);
  CHECK(std::abs(res.z[0] - 1.0) <= 1e-7);
  CHECK(std::abs(res.z[1] - 1.0) <= 1e-7);
  CHECK(res.gradient.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("penalty grows for an infeasible problem until capped") {
  NlpFunctions nlp;
  nlp.num_variables = 1;
  nlp.num_constraints = 2;
  nlp.cost = [](const Vec& z) { return z[0] * z[0]; };
  nlp.constraints = [](const Vec& z) { return Vec{{z[0] - 1.0, z[0] + 1.0}}; };
  nlp.lagrangian_gradient = [](const Vec& z, const Vec& r) {
    return Vec{{2 * z[0] + r[0] + r[1]}};
  };
  SolverConfig cfg;
  cfg.max_outer = 30;
  const SolveReport rep = solve(nlp, Vec::Zero(1), cfg);
  CHECK(rep.status != SolveStatus::Converged);
  CHECK(rep.penalty > cfg.penalty_init);
}
