#include <doctest.h>

#include <cmath>
#include <memory>

#include "ihoc/barycentric.hpp"
#include "ihoc/errors.hpp"
#include "test_support.hpp"

using namespace ihoc;
using ihoc::test::near_rel;

namespace {

std::shared_ptr<const RadauGrid> make_grid(double alpha, int n) {
  return std::make_shared<const RadauGrid>(ggr_nodes(GegenbauerBasis(alpha), n));
}

// Relative spread of the ratios a_i / b_i.
double ratio_spread(const Vec& a, const Vec& b) {
  const Vec r = a.cwiseQuotient(b);
  const double mid = r[0];
  return (r.array() / mid - 1.0).abs().maxCoeff();
}

void check_signs(const Vec& xi, bool first_negative = true) {
  if (first_negative) CHECK(xi[0] < 0.0);
  for (int i = 0; i < xi.size(); ++i) {
    CHECK(std::isfinite(xi[i]));
    CHECK(xi[i] != 0.0);
    if (i > 0) CHECK((xi[i] > 0) != (xi[i - 1] > 0));
  }
}

}  // namespace

TEST_CASE("weights for n = 1, alpha = 1/2") {
  auto g = make_grid(0.5, 1);
  const BarycentricWeights thm = weights_thm(g);
  CHECK(thm.xi[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(thm.xi[1] == doctest::Approx(1.0).epsilon(1e-14));

  const BarycentricWeights dir = weights_direct(g);
  CHECK(dir.xi[1] / dir.xi[0] == doctest::Approx(-1.0).epsilon(1e-14));
  // raw product formula 1 / prod (tau_j - tau_i) is {3/4, -3/4}
  const double d0 = 1.0 / (g->nodes[1] - g->nodes[0]);
  CHECK(d0 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(ratio_spread(thm.xi, Vec{{d0, -d0}}) <= 1e-14);

  const BarycentricWeights sw = weights_switch(g, 0.1, SwitchVariant::B2);
  CHECK(sw.xi[0] == thm.xi[0]);
  CHECK(sw.xi[1] == thm.xi[1]);
}

TEST_CASE("sign pattern and finiteness") {
  for (double a : {-0.49, -0.4, 0.0, 0.5, 1.0, 2.0}) {
    for (int n : {1, 2, 7, 20, 60}) {
      auto g = make_grid(a, n);
      check_signs(weights_thm(g).xi);
      check_signs(weights_switch(g, 0.1, SwitchVariant::B1).xi);
      check_signs(weights_switch(g, 0.1, SwitchVariant::B2).xi);
      // raw product formula starts positive
      check_signs(weights_direct(g).xi, false);
    }
  }
}

TEST_CASE("closed-form weights are proportional to the product formula") {
  for (double a : {-0.4, 0.0, 0.5, 1.0, 2.0}) {
    for (int n = 1; n <= 15; ++n) {
      auto g = make_grid(a, n);
      const Vec direct = weights_direct(g).xi;
      INFO("alpha=" << a << " n=" << n);
      CHECK(ratio_spread(weights_thm(g).xi, direct) <= 1e-10);
      CHECK(ratio_spread(weights_switch(g, 0.1, SwitchVariant::B1).xi, direct) <= 1e-10);
      CHECK(ratio_spread(weights_switch(g, 0.1, SwitchVariant::B2).xi, direct) <= 1e-10);
    }
  }
  auto g40 = make_grid(0.5, 40);
  CHECK(ratio_spread(weights_switch(g40).xi, weights_direct(g40).xi) <= 1e-9);
}

TEST_CASE("trigonometric identity behind the second switch") {
  auto g = make_grid(0.5, 30);
  for (int i = 1; i <= g->n; ++i) {
    const double t = g->nodes[i];
    if (1.0 - t < 1e-3) continue;
    CHECK(std::sin(std::acos(t)) / std::sqrt(1.0 + t) ==
          doctest::Approx(std::sqrt(1.0 - t)).epsilon(1e-12));
  }
}

TEST_CASE("switch parameter must lie in (0, 1)") {
  auto g = make_grid(0.5, 4);
  CHECK_THROWS_AS(weights_switch(g, 0.0), DomainError);
  CHECK_THROWS_AS(weights_switch(g, -0.1), DomainError);
  CHECK_THROWS_AS(weights_switch(g, 1.0), DomainError);
  CHECK_NOTHROW(weights_switch(g, 0.5));
}

TEST_CASE("interpolant reproduces polynomials") {
  {
    auto g = make_grid(0.5, 2);
    RationalInterpolant ip(weights_switch(g), g->nodes.array().square());
    CHECK(interp_eval(ip, 0.5) == doctest::Approx(0.25).epsilon(1e-13));
  }
  {
    auto g = make_grid(0.5, 12);
    RationalInterpolant ip(weights_switch(g), g->nodes.array().exp());
    CHECK(std::abs(interp_eval(ip, 0.3) - std::exp(0.3)) <= 1e-9);
  }
  auto r = test::rng(3);
  for (double a : {-0.4, 0.0, 0.5, 1.0}) {
    for (int n : {1, 5, 12, 30}) {
      auto g = make_grid(a, n);
      const BarycentricWeights w = weights_switch(g);
      RationalInterpolant ident(w, g->nodes);
      for (int deg = 0; deg <= n; deg += std::max(1, n / 6)) {
        RationalInterpolant ip(w, g->nodes.array().pow(deg).matrix());
        for (int s = 0; s < 20; ++s) {
          const double t = test::uniform(r, -1.0, 1.0);
          INFO("alpha=" << a << " n=" << n << " deg=" << deg << " t=" << t);
          CHECK(std::abs(ip(t) - std::pow(t, deg)) <= 1e-11);
          if (deg == 0) CHECK(std::abs(ident(t) - t) <= 1e-13);
        }
      }
    }
  }
}

TEST_CASE("node short-circuit returns data exactly") {
  auto g = make_grid(1.0, 9);
  Vec f(10);
  for (int i = 0; i < 10; ++i) f[i] = std::cos(3.0 * i) + 0.1 * i;
  RationalInterpolant ip(weights_switch(g), f);
  for (int i = 0; i <= 9; ++i) {
    CHECK(ip(g->nodes[i]) == f[i]);
    CHECK(ip(g->nodes[i] + 5e-16) == f[i]);
  }
  const Vec e = lagrange_basis(ip.weights(), g->nodes[4]);
  CHECK(e[4] == 1.0);
  CHECK(e.sum() == 1.0);
}

TEST_CASE("partition of unity and constant reproduction") {
  auto r = test::rng(11);
  for (double a : {-0.49, 0.5, 2.0}) {
    auto g = make_grid(a, 25);
    const BarycentricWeights w = weights_switch(g);
    RationalInterpolant c(w, Vec::Constant(26, -3.5));
    for (int s = 0; s < 1000; ++s) {
      const double t = test::uniform(r, -1.0, 1.0);
      CHECK(std::abs(lagrange_basis(w, t).sum() - 1.0) <= 1e-13);
      CHECK(std::abs(c(t) + 3.5) <= 1e-13 * 3.5);
    }
  }
}

TEST_CASE("interpolant is invariant under weight scaling") {
  auto g = make_grid(0.5, 16);
  const BarycentricWeights w = weights_switch(g);
  const Vec f = g->nodes.array().sin();
  RationalInterpolant base(w, f);
  for (double s : {1e-8, 1.0, 1e8}) {
    BarycentricWeights ws = w;
    ws.xi *= s;
    RationalInterpolant ip(ws, f);
    for (double t : {-0.97, -0.31, 0.0, 0.42, 0.999}) {
      CHECK(std::abs(ip(t) - base(t)) <= 1e-15);
    }
  }
}

TEST_CASE("Lebesgue constants") {
  auto g0 = make_grid(0.5, 0);
  CHECK(lebesgue_constant(weights_switch(g0), 10) == doctest::Approx(1.0));

  auto g = make_grid(0.5, 10);
  const BarycentricWeights w = weights_switch(g);
  const double lam = lebesgue_constant(w, 500);
  CHECK(lam >= 1.0);
  for (int i = 0; i <= 10; ++i) {
    CHECK(lebesgue_function(w, g->nodes[i]) == doctest::Approx(1.0));
  }
  // the maximum is never below any sampled value
  for (int s = 0; s <= 200; ++s) {
    const double t = -1.0 + 2.0 * s / 201.0;
    CHECK(lebesgue_function(w, t) <= lam * (1 + 1e-12));
  }

  for (int n : {5, 20, 40, 60}) {
    const double near_limit = lebesgue_constant(weights_switch(make_grid(-0.499, n)), 50 * (n + 1));
    const double reference = lebesgue_constant(weights_switch(make_grid(-0.4, n)), 50 * (n + 1));
    INFO("n=" << n);
    CHECK(std::isfinite(near_limit));
    CHECK(near_limit <= 3.0 * reference);
    CHECK(reference <= 3.0 * near_limit);
  }
}

TEST_CASE("normalized product weights") {
  auto g = make_grid(0.5, 8);
  const auto ref = direct_weights_normalized(g->nodes);
  CHECK(ref[0] == -1.0L);
  const Vec thm = weights_thm(g).xi;
  for (int i = 0; i <= 8; ++i) {
    CHECK(near_rel(static_cast<double>(ref[i]), -thm[i] / thm[0], 1e-12));
  }
}
