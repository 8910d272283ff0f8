#include <catch2/catch_amalgamated.hpp>

#include "multichain/chain.hpp"
#include "multichain/fixtures.hpp"

using namespace multichain;

namespace {

// truncated power average (1/k) sum_{t=1..k} P^t, the definitional check
// for the limiting projector
Matrix cesaro_oracle(const Matrix& p, int k) {
  Matrix power = Matrix::Identity(p.rows(), p.cols());
  Matrix acc = Matrix::Zero(p.rows(), p.cols());
  for (int t = 1; t <= k; ++t) {
    power = power * p;
    acc += power;
  }
  return acc / k;
}

Matrix two_cycle() {
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  return p;
}

}  // namespace

TEST_CASE("classification of the fixtures") {
  const Fixture two = twochain_fixture();
  const Classification c = classify(two.mdp);
  CHECK(c.same_structure(two.planted));
  CHECK(c.label == std::vector<int>{-1, 0, 1});
  CHECK(c.is_recurrent(1));
  CHECK_FALSE(c.is_recurrent(0));

  const Fixture ring = make_ergodic_ring(5, 0.2, 2, 3);
  const Classification cr = classify(ring.mdp);
  CHECK(cr.num_classes() == 1);
  CHECK(cr.transient.empty());
  CHECK(cr.same_structure(ring.planted));
}

TEST_CASE("planted structures recovered on generated multichains") {
  for (std::uint64_t seed = 50; seed < 80; ++seed) {
    const Fixture f = random_multichain_sample(seed);
    CHECK(classify(f.mdp).same_structure(f.planted));
  }
  const Fixture w = make_weakly_comm(4, 2, 2, 9);
  CHECK(classify(w.mdp).same_structure(w.planted));
}

TEST_CASE("canonical decomposition blocks are stochastic where they must be") {
  const Fixture f = random_multichain_sample(123);
  const Policy p = uniform_policy(f.mdp);
  const Classification c = classify(f.mdp);
  const CanonicalForm cf = canonical_decompose(f.mdp, p, c);
  for (size_t i = 0; i < cf.r_blocks.size(); ++i) {
    const Matrix& r = cf.r_blocks[i];
    for (int s = 0; s < r.rows(); ++s)
      CHECK(r.row(s).sum() == Catch::Approx(1.0).margin(1e-12));
    const Vector& g = cf.stationary[i];
    CHECK(g.minCoeff() > 0.0);
    CHECK(g.sum() == Catch::Approx(1.0).margin(1e-12));
    CHECK(inf_norm(Vector((r.transpose() * g) - g)) <= 1e-12);
  }
}

TEST_CASE("limiting projector matches the truncated power average") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const Fixture f = random_multichain_sample(seed);
    const Policy p = uniform_policy(f.mdp);
    const Classification c = classify(f.mdp);
    const Matrix p_pi = induce_chain(f.mdp, p).p_pi;
    const Matrix p_star = cesaro_limit(f.mdp, p, c);
    const Matrix approx = cesaro_oracle(p_pi, 4000);
    CHECK(inf_norm(Matrix(p_star - approx)) <= 5e-3);
  }
}

TEST_CASE("visitation measures: support, splice and mass identities") {
  KeyedRng rng{5, 0xD157u};
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    const Fixture f = random_multichain_sample(seed);
    const Classification c = classify(f.mdp);
    const Policy p = random_interior_policy(f.mdp, rng);
    const Vector mu = random_full_support_mu(f.mdp.n_states, rng);
    const VisitationBundle v = visitation(f.mdp, p, c, mu);
    CHECK(v.d.sum() == Catch::Approx(1.0).margin(1e-10));
    for (int s : c.transient) {
      CHECK(std::abs(v.d(s)) <= 1e-12);
      CHECK(v.rho(s) == v.delta(s));
    }
    for (const auto& cls : c.recurrent_classes)
      for (int s : cls) {
        CHECK(v.delta(s) == mu(s));  // no transient path feeds it back
        CHECK(v.rho(s) == v.d(s));
      }
    // delta solves the embedded transient system
    const Matrix p_pi = induce_chain(f.mdp, p).p_pi;
    Matrix t_bar = Matrix::Zero(f.mdp.n_states, f.mdp.n_states);
    for (int s : c.transient)
      for (int t : c.transient) t_bar(s, t) = p_pi(s, t);
    const Vector resid =
        v.delta - (mu + t_bar.transpose() * v.delta);
    CHECK(inf_norm(resid) <= 1e-10);
  }
}

TEST_CASE("expected target time: identities and worked chains") {
  // two-state flip chain: stationary (1/2, 1/2), mean hitting time 1 to
  // the other state, so the stationary-weighted target time is 1/2
  const Matrix p = two_cycle();
  const Classification c = classify_chain(p);
  REQUIRE(c.num_classes() == 1);
  const ChainConstants k = chain_constants_chain(p, c, 0, 0);
  CHECK(k.t_tar_class[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(k.t_half == 0);  // no transient block

  // start independence of the stationary-weighted combination
  for (std::uint64_t seed : {41u, 42u}) {
    const Fixture f = random_multichain_sample(seed);
    const Policy pol = uniform_policy(f.mdp);
    const Classification cf = classify(f.mdp);
    const CanonicalForm form = canonical_decompose(f.mdp, pol, cf);
    for (int i = 0; i < cf.num_classes(); ++i) {
      const Matrix& r = form.r_blocks[i];
      const Vector& g = form.stationary[i];
      const int ni = static_cast<int>(r.rows());
      // direct mean hitting times from every start
      double ref = -1.0;
      for (int s0 = 0; s0 < ni; ++s0) {
        double acc = 0.0;
        for (int t = 0; t < ni; ++t) {
          if (t == s0) continue;
          // delete row/col t and solve (I - R_minor) h = 1
          Matrix minor(ni - 1, ni - 1);
          std::vector<int> keep;
          for (int x = 0; x < ni; ++x)
            if (x != t) keep.push_back(x);
          for (size_t a = 0; a < keep.size(); ++a)
            for (size_t b = 0; b < keep.size(); ++b)
              minor(a, b) = r(keep[a], keep[b]);
          const Matrix sys =
              Matrix::Identity(ni - 1, ni - 1) - minor;
          const Vector h = solve_checked(sys, Vector::Ones(ni - 1), "test");
          const auto pos = std::find(keep.begin(), keep.end(), s0);
          acc += g(t) * h(static_cast<int>(pos - keep.begin()));
        }
        if (ref < 0.0)
          ref = acc;
        else
          CHECK(acc == Catch::Approx(ref).margin(1e-8));
      }
      const ChainConstants kc =
          chain_constants_chain(induce_chain(f.mdp, pol).p_pi, cf, 0, 0);
      CHECK(kc.t_tar_class[i] == Catch::Approx(ref).margin(1e-8));
    }
  }
}

TEST_CASE("transient half-life and cover-time conventions") {
  const Fixture two = twochain_fixture();
  const Policy p = uniform_policy(two.mdp);
  const Classification c = classify(two.mdp);
  const ChainConstants k = chain_constants(two.mdp, p, c);
  // the single transient state leaves immediately: first power already 0
  CHECK(k.t_half == 1);
  // singleton classes are covered on arrival
  CHECK(k.t_cov_class[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(k.cov_exact);

  const Matrix flip = two_cycle();
  const Classification cf = classify_chain(flip);
  const ChainConstants kf = chain_constants_chain(flip, cf, 0, 0);
  CHECK(kf.t_cov_class[0] == Catch::Approx(2.0).margin(1e-12));

  // exact subset-DP and Monte Carlo agree on a small ergodic class
  const Fixture ring = make_ergodic_ring(5, 0.3, 2, 4);
  const Classification cr = classify(ring.mdp);
  const Matrix pr = induce_chain(ring.mdp, uniform_policy(ring.mdp)).p_pi;
  const ChainConstants exact = chain_constants_chain(pr, cr, 0, 0);
  REQUIRE(exact.cov_exact);
  const detail::McCover mc = detail::cover_times_mc(pr, 0, 50000, 77);
  CHECK(std::abs(mc.value - exact.t_cov) <=
        5.0 * mc.std_error + 0.05 * exact.t_cov);
}

TEST_CASE("stale classification is rejected") {
  const Fixture f = twochain_fixture();
  Classification wrong;
  wrong.recurrent_classes = {{0, 1}, {2}};
  wrong.transient = {};
  wrong.label = {0, 0, 1};
  const Matrix p_pi = induce_chain(f.mdp, uniform_policy(f.mdp)).p_pi;
  CHECK_THROWS_AS(canonical_decompose_chain(p_pi, wrong),
                  std::invalid_argument);
}
