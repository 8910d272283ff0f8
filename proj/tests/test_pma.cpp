#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "multichain/fixtures.hpp"
#include "multichain/pma.hpp"

using namespace multichain;

TEST_CASE("step schedules") {
  const StepSchedule c{ScheduleKind::constant, 0.5, 2.0};
  CHECK(c.next_eta(0.5) == 0.5);

  KeyedRng rng{17, 0x57E9u};
  for (int i = 0; i < 200; ++i) {
    const double ca = 1.0 + std::pow(10.0, rng.next_in(-6.0, 3.0));
    const StepSchedule a{ScheduleKind::adaptive, 1.0, ca};
    const double eta = std::pow(10.0, rng.next_in(-3.0, 3.0));
    const double next = a.next_eta(eta);
    CHECK(next * (ca - 1.0) >= eta * ca);  // defining inequality, exactly
  }
  const StepSchedule a{ScheduleKind::adaptive, 1.0, 2.0};
  CHECK(a.next_eta(StepSchedule::kEtaCap) == StepSchedule::kEtaCap);
  CHECK_THROWS_AS((StepSchedule{ScheduleKind::adaptive, 1.0, 1.0}.validate()),
                  InfeasibleConfigError);
  CHECK_THROWS_AS((StepSchedule{ScheduleKind::constant, 0.0, 2.0}.validate()),
                  InfeasibleConfigError);
}

TEST_CASE("exact ascent on the fork converges to the clipped optimum") {
  const Mdp m = make_twochain();
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const double alpha = 0.05;
  const StepSchedule sched{ScheduleKind::constant, 0.5, 2.0};
  const PmaTrace t = run_pma(m, mu, alpha, sched, DivergenceKind::kl, 60,
                             uniform_policy(m));
  REQUIRE(t.iterates.size() == 61);
  const Policy& last = t.iterates.back().policy;
  CHECK(last.table(0, 0) == Catch::Approx(0.95).margin(1e-9));
  CHECK(t.iterates.back().j_mu == Catch::Approx(0.65).margin(1e-9));
  CHECK_FALSE(t.has_reference);
  CHECK(std::isnan(t.iterates.back().gap));
  for (size_t k = 0; k + 1 < t.iterates.size(); ++k)
    CHECK(t.iterates[k + 1].j_mu >= t.iterates[k].j_mu - 1e-12);
}

TEST_CASE("zero iterations yields the single starting row") {
  const Mdp m = make_twochain();
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const PmaTrace t =
      run_pma(m, mu, 0.1, {ScheduleKind::constant, 0.5, 2.0},
              DivergenceKind::euclidean, 0, uniform_policy(m));
  REQUIRE(t.iterates.size() == 1);
  CHECK(t.iterates[0].k == 0);
}

TEST_CASE("alpha outside the open interval is infeasible") {
  const Mdp m = make_twochain();
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  for (double bad : {0.0, 0.5, 0.6}) {
    CHECK_THROWS_AS(run_pma(m, mu, bad, {ScheduleKind::constant, 0.5, 2.0},
                            DivergenceKind::kl, 1, uniform_policy(m)),
                    InfeasibleConfigError);
  }
}

TEST_CASE("mismatch coefficients on structured fixtures") {
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const CoefficientEstimate est =
      estimate_coefficients(m, mu, 0.1, c, 32, 12345);
  // ||rho||_1 = mu(fork) + total recurrent mass = 1/3 + 1 for every policy
  CHECK(est.b_alpha == Catch::Approx(4.0 / 3.0).margin(1e-10));
  CHECK(est.method == CoeffMethod::vertex_enumeration);
  CHECK(est.lower_bound);
  CHECK(est.c_alpha >= 1.0);

  const Fixture ring = make_ergodic_ring(5, 0.2, 2, 6);
  const CoefficientEstimate er = estimate_coefficients(
      ring.mdp, Vector::Constant(5, 0.2), 0.1, classify(ring.mdp), 16, 7);
  CHECK(er.b_alpha == Catch::Approx(1.0).margin(1e-10));  // no transient mass

  // a single-action MDP admits exactly one policy, so the ratio is 1
  Mdp single;
  single.n_states = 2;
  single.n_actions = 1;
  single.reward_bound = 1.0;
  single.kernel.assign(1, Matrix::Zero(2, 2));
  single.kernel[0] << 0.5, 0.5, 0.5, 0.5;
  single.reward = Matrix::Zero(2, 1);
  const CoefficientEstimate es = estimate_coefficients(
      single, Vector::Constant(2, 0.5), 0.5, classify(single), 4, 3);
  CHECK(es.c_alpha == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("floor selection for weakly communicating problems") {
  CHECK(select_alpha_weakly_communicating(0.1, 2, 0.1) ==
        Catch::Approx(1.0 / 6.0).margin(1e-15));
  // the computed floor exceeds 1/|A|: infeasible before any eps screening
  CHECK_THROWS_AS(select_alpha_weakly_communicating(1.0, 2, 0.1),
                  InfeasibleConfigError);
  CHECK_THROWS_AS(select_alpha_weakly_communicating(0.1, 1, 1.0),
                  InfeasibleConfigError);
  CHECK_THROWS_AS(select_alpha_weakly_communicating(0.1, 2, 0.0),
                  InfeasibleConfigError);
}

TEST_CASE("policy iteration on the fork and against brute force") {
  const Mdp m = make_twochain();
  const PolicyIterationResult r = policy_iteration(m);
  CHECK(r.actions[0] == 0);
  CHECK(r.j_star(0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.j_star(1) == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.j_star(2) == Catch::Approx(0.0).margin(1e-12));

  // brute force: optimal gain is the per-state max over the deterministic
  // policies (finite multichain MDPs attain it there)
  std::vector<Fixture> small;
  small.push_back(make_random_multichain({{2, 1}, 2, 2, 1.0}, 71));
  small.push_back(make_random_multichain({{1, 2}, 1, 3, 1.0}, 72));
  small.push_back(make_random_multichain({{3}, 2, 2, 1.0}, 73));
  for (const Fixture& f : small) {
    const int n = f.mdp.n_states, na = f.mdp.n_actions;
    long long total = 1;
    for (int s = 0; s < n; ++s) total *= na;
    REQUIRE(total <= 4096);
    Vector best = Vector::Constant(n, -1e300);
    std::vector<int> act(n, 0);
    for (long long it = 0; it < total; ++it) {
      long long x = it;
      for (int s = 0; s < n; ++s) {
        act[s] = static_cast<int>(x % na);
        x /= na;
      }
      const ValueBundle b =
          evaluate_on_own_chain(f.mdp, clipped_deterministic(f.mdp, act, 0.0));
      best = best.cwiseMax(b.j);
    }
    const PolicyIterationResult pi = policy_iteration(f.mdp);
    CHECK(inf_norm(Vector(pi.j_star - best)) <= 1e-9);
  }
}

TEST_CASE("reference search is at least as good as the clipped optimum") {
  const Mdp m = make_twochain();
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const ReferenceSearchResult r =
      find_reference_policy(m, mu, 0.05, DivergenceKind::kl, 30, 5);
  // pi(L|fork) = 0.95 gives J_mu = (0.95 + 1 + 0)/3
  CHECK(r.j_mu == Catch::Approx(1.95 / 3.0).margin(1e-9));
}
