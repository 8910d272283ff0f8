#include <catch2/catch_amalgamated.hpp>

#include "multichain/fixtures.hpp"
#include "multichain/mdp.hpp"

using namespace multichain;

TEST_CASE("validate_mdp reports violations with coordinates") {
  Mdp m = make_twochain();
  REQUIRE(validate_mdp(m).empty());

  SECTION("row sum off") {
    m.kernel[0](0, 1) = 0.5;
    const auto v = validate_mdp(m);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].s == 0);
    CHECK(v[0].a == 0);
    CHECK_THROWS_AS(require_valid(m), ValidationError);
  }
  SECTION("negative probability") {
    m.kernel[1](0, 2) = 1.2;
    m.kernel[1](0, 1) = -0.2;
    const auto v = validate_mdp(m);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].s == 0);
    CHECK(v[0].a == 1);
  }
  SECTION("reward above the bound") {
    m.reward(1, 0) = 2.0;
    const auto v = validate_mdp(m);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].s == 1);
    CHECK(v[0].a == 0);
  }
  SECTION("shape mismatch") {
    m.kernel.pop_back();
    CHECK_FALSE(validate_mdp(m).empty());
  }
  SECTION("validation never renormalizes") {
    m.kernel[0](0, 1) = 0.5;
    (void)validate_mdp(m);
    CHECK(m.kernel[0](0, 1) == 0.5);
  }
}

TEST_CASE("policy helpers") {
  const Mdp m = make_twochain();
  const Policy u = uniform_policy(m);
  CHECK(is_interior(u));
  CHECK(u.table(0, 0) == 0.5);

  const Policy det = clipped_deterministic(m, {0, 0, 1}, 0.1);
  CHECK(det.table(0, 0) == Catch::Approx(0.9));
  CHECK(det.table(0, 1) == Catch::Approx(0.1));
  CHECK(det.table(2, 1) == Catch::Approx(0.9));
  CHECK(is_interior(det));

  const Policy hard = clipped_deterministic(m, {0, 0, 1}, 0.0);
  CHECK_FALSE(is_interior(hard));
  CHECK_THROWS_AS(require_interior(hard, "test"), std::invalid_argument);
}

TEST_CASE("induced chain of the fork fixture") {
  const Mdp m = make_twochain();
  Policy p = uniform_policy(m);
  p.table(0, 0) = 0.7;
  p.table(0, 1) = 0.3;
  const InducedChain ch = induce_chain(m, p);
  CHECK(ch.p_pi(0, 1) == Catch::Approx(0.7));
  CHECK(ch.p_pi(0, 2) == Catch::Approx(0.3));
  CHECK(ch.p_pi(1, 1) == 1.0);
  CHECK(ch.r_pi(1) == 1.0);
  CHECK(ch.r_pi(0) == 0.0);
}

TEST_CASE("policy operator reproduces the induced chain from flat tables") {
  KeyedRng rng{11, 0x7E57u};
  for (int i = 0; i < 20; ++i) {
    const Fixture f = random_multichain_sample(100 + i);
    const Policy p = random_interior_policy(f.mdp, rng);
    const InducedChain ch = induce_chain(f.mdp, p);
    const Matrix pk = ch.theta_pi * flat_kernel(f.mdp);
    const Vector pr = ch.theta_pi * flat_reward(f.mdp);
    CHECK(inf_norm(Matrix(pk - ch.p_pi)) <= 1e-12);
    CHECK(inf_norm(Vector(pr - ch.r_pi)) <= 1e-12);
  }
}

TEST_CASE("perturb_policy stays inside the open box or refuses") {
  const Mdp m = make_twochain();
  const Policy p = uniform_policy(m);
  TangentDirection u;
  u.u = Matrix::Zero(3, 2);
  u.u(0, 0) = 1.0;
  u.u(0, 1) = -1.0;
  const Policy moved = perturb_policy(p, u, 0.1);
  CHECK(moved.table(0, 0) == Catch::Approx(0.6));
  CHECK(moved.table(0, 1) == Catch::Approx(0.4));
  CHECK_THROWS_AS(perturb_policy(p, u, 0.5), std::invalid_argument);

  TangentDirection bad;
  bad.u = Matrix::Ones(3, 2);  // rows do not sum to zero
  CHECK_THROWS_AS(perturb_policy(p, bad, 0.1), std::invalid_argument);
}
