#include <catch2/catch_amalgamated.hpp>

#include "multichain/fixtures.hpp"
#include "multichain/values.hpp"

using namespace multichain;

namespace {

Policy fork_policy(double p_left) {
  Policy p;
  p.table.resize(3, 2);
  p.table << p_left, 1.0 - p_left, 0.5, 0.5, 0.5, 0.5;
  return p;
}

}  // namespace

TEST_CASE("fork fixture values in closed form") {
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  const double p = 0.5;
  const ValueBundle b = evaluate(m, fork_policy(p), c);

  CHECK(b.j(0) == Catch::Approx(p).margin(1e-12));
  CHECK(b.j(1) == Catch::Approx(1.0).margin(1e-12));
  CHECK(b.j(2) == Catch::Approx(0.0).margin(1e-12));
  CHECK(b.v(0) == Catch::Approx(-p).margin(1e-12));
  CHECK(b.v(1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(b.v(2) == Catch::Approx(0.0).margin(1e-12));

  // action-conditioned gain from the fork: the chosen branch's gain
  CHECK(b.k(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(b.k(0, 1) == Catch::Approx(0.0).margin(1e-12));
  // relative action values vanish on absorbing states
  CHECK(b.q(1, 0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(b.q(1, 1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(b.q(2, 0) == Catch::Approx(0.0).margin(1e-12));
  // splice: transient fork row carries K, recurrent rows carry Q
  CHECK(b.g(0, 0) == b.k(0, 0));
  CHECK(b.g(0, 1) == b.k(0, 1));
  CHECK(b.g(1, 0) == b.q(1, 0));
  CHECK(b.g(2, 1) == b.q(2, 1));
}

TEST_CASE("gain difference on the fork is the left-probability difference") {
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const PdlResult r =
      performance_difference(m, fork_policy(0.8), fork_policy(0.3), mu, c);
  CHECK(r.lhs == Catch::Approx((0.8 - 0.3) / 3.0).margin(1e-12));
  CHECK(r.rhs == Catch::Approx(r.lhs).margin(1e-10));
  // only the transient fork state contributes
  CHECK(r.recurrent_term == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("performance difference requires full support") {
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  Vector mu = Vector::Zero(3);
  mu(0) = 1.0;
  CHECK_THROWS_AS(
      performance_difference(m, fork_policy(0.5), fork_policy(0.4), mu, c),
      std::invalid_argument);
}

TEST_CASE("gradient table on the fork") {
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  Vector mu = Vector::Zero(3);
  mu(0) = 1.0;  // all mass on the fork state
  const GradientTable g = policy_gradient(m, fork_policy(0.5), mu, c);
  CHECK_FALSE(g.mu_full_support);
  // transient row: delta(0) K(0, a) with delta(0) = mu(0) = 1
  CHECK(g.grad(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(g.grad(0, 1) == Catch::Approx(0.0).margin(1e-12));
  // recurrent rows: d(s) Q(s, a) = 0 since Q vanishes there
  CHECK(g.grad(1, 0) == Catch::Approx(0.0).margin(1e-12));

  const Vector mu_u = Vector::Constant(3, 1.0 / 3.0);
  const GradientTable gu = policy_gradient(m, fork_policy(0.5), mu_u, c);
  CHECK(gu.mu_full_support);
  CHECK(gu.grad(0, 0) == Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("deterministic policies evaluate on their own chain") {
  const Mdp m = make_twochain();
  const Policy det = clipped_deterministic(m, {0, 0, 0}, 0.0);
  const ValueBundle b = evaluate_on_own_chain(m, det);
  CHECK(b.j(0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(b.j(2) == Catch::Approx(0.0).margin(1e-12));
  // the interior-only entry point refuses the same policy
  CHECK_THROWS_AS(evaluate(m, det, classify(m)), std::invalid_argument);
}

TEST_CASE("finite difference matches the analytic directional derivative") {
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  TangentDirection u;
  u.u = Matrix::Zero(3, 2);
  u.u(0, 0) = 1.0;
  u.u(0, 1) = -1.0;
  const Policy p = fork_policy(0.5);
  const GradientTable g = policy_gradient(m, p, mu, c);
  const double analytic = (g.grad.cwiseProduct(u.u)).sum();
  const double fd = finite_diff_directional(m, p, mu, u, c, 1e-5);
  CHECK(analytic == Catch::Approx(fd).margin(1e-9));
  // d/dp of (p + 1 + 0)/3 is 1/3
  CHECK(analytic == Catch::Approx(1.0 / 3.0).margin(1e-12));
}
