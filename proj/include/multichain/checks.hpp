#pragma once

// Self-contained property suites.
//
// Each suite re-derives its expected values independently of the code
// under test: projections are compared against a KKT oracle that
// enumerates floor patterns, gradients against central differences,
// Cesaro limits against truncated power averages, and the optimizer
// against brute-force references.  The command-line `check` subcommand
// and the acceptance runner both call these functions, so the pinned
// tolerances live here.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "multichain/chain.hpp"
#include "multichain/fixtures.hpp"
#include "multichain/mdp.hpp"
#include "multichain/pma.hpp"
#include "multichain/projection.hpp"
#include "multichain/sampling.hpp"
#include "multichain/values.hpp"

namespace multichain {

struct CheckLine {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::vector<CheckLine> lines;
  double seconds = 0.0;

  bool pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
  void add(const std::string& label, bool ok, const std::string& detail) {
    lines.push_back({label, ok, detail});
  }
};

namespace detail {

inline std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Suite: bellman.  Value identities on random multichain fixtures.
// ---------------------------------------------------------------------------

inline SuiteReport check_bellman(int n_fixtures = 100,
                                 std::uint64_t seed = 2026) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "bellman";
  double worst_bellman = 0.0, worst_star = 0.0, worst_const = 0.0,
         worst_norm = 0.0, worst_gain_bound = 0.0;
  for (int i = 0; i < n_fixtures; ++i) {
    const Fixture f = random_multichain_sample(seed + i);
    const Mdp& m = f.mdp;
    const Classification c = classify(m);
    KeyedRng rng{seed, 0xBE11u, static_cast<std::uint64_t>(i)};
    const Policy p = random_interior_policy(m, rng);
    const InducedChain ch = induce_chain(m, p);
    const ValueBundle b = evaluate(m, p, c);
    const Matrix p_star = cesaro_limit(m, p, c);
    worst_bellman =
        std::max(worst_bellman, inf_norm(Vector(ch.p_pi * b.j - b.j)));
    worst_bellman = std::max(
        worst_bellman, inf_norm(Vector(ch.r_pi + ch.p_pi * b.v - b.j - b.v)));
    worst_star =
        std::max(worst_star, inf_norm(Matrix(p_star * ch.p_pi - p_star)));
    worst_star =
        std::max(worst_star, inf_norm(Matrix(ch.p_pi * p_star - p_star)));
    worst_star =
        std::max(worst_star, inf_norm(Matrix(p_star * p_star - p_star)));
    worst_norm = std::max(worst_norm, inf_norm(Vector(p_star * b.v)));
    for (const auto& cls : c.recurrent_classes)
      for (int s : cls) {
        worst_const = std::max(worst_const, std::abs(b.j(s) - b.j(cls[0])));
        for (int a = 0; a < m.n_actions; ++a)
          worst_const = std::max(worst_const, std::abs(b.k(s, a) - b.j(s)));
      }
    worst_gain_bound =
        std::max(worst_gain_bound, inf_norm(b.j) - m.reward_bound);
  }
  rep.add("gain/bias Bellman residuals <= 1e-9", worst_bellman <= 1e-9,
          "max " + detail::sci(worst_bellman));
  rep.add("P_star product identities <= 1e-10", worst_star <= 1e-10,
          "max " + detail::sci(worst_star));
  rep.add("P_star V = 0 within 1e-9", worst_norm <= 1e-9,
          "max " + detail::sci(worst_norm));
  rep.add("gain constant per class (and K(s,a)=J there) within 1e-10",
          worst_const <= 1e-10, "max " + detail::sci(worst_const));
  rep.add("gain magnitude within the reward bound",
          worst_gain_bound <= 1e-12, "max excess " + detail::sci(worst_gain_bound));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: pdl.  Gain-difference identity with mixed visitation measures.
// ---------------------------------------------------------------------------

inline SuiteReport check_pdl(int n_fixtures = 100,
                             int triples_per_fixture = 100,
                             std::uint64_t seed = 2027) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "pdl";
  double worst = 0.0;
  for (int i = 0; i < n_fixtures; ++i) {
    const Fixture f = random_multichain_sample(seed + i);
    const Classification c = classify(f.mdp);
    for (int t = 0; t < triples_per_fixture; ++t) {
      KeyedRng rng{seed, 0x9D1u, static_cast<std::uint64_t>(i),
                   static_cast<std::uint64_t>(t)};
      const Policy p = random_interior_policy(f.mdp, rng);
      const Policy p2 = random_interior_policy(f.mdp, rng);
      const Vector mu = random_full_support_mu(f.mdp.n_states, rng);
      const PdlResult r = performance_difference(f.mdp, p, p2, mu, c);
      worst = std::max(worst, std::abs(r.lhs - r.rhs));
    }
  }
  rep.add("difference identity |lhs - rhs| <= 1e-8", worst <= 1e-8,
          "max " + detail::sci(worst));
  double worst_unichain = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Fixture ring = make_ergodic_ring(5 + (i % 3), 0.15, 2, seed + i);
    const Classification c = classify(ring.mdp);
    KeyedRng rng{seed, 0x9D2u, static_cast<std::uint64_t>(i)};
    const Policy p = random_interior_policy(ring.mdp, rng);
    const Policy p2 = random_interior_policy(ring.mdp, rng);
    const Vector mu = random_full_support_mu(ring.mdp.n_states, rng);
    const PdlResult r = performance_difference(ring.mdp, p, p2, mu, c);
    worst_unichain = std::max(worst_unichain, std::abs(r.transient_term));
  }
  rep.add("no-transient chains put zero mass in the transient term (1e-10)",
          worst_unichain <= 1e-10, "max " + detail::sci(worst_unichain));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: grad.  Exact gradient table against central finite differences.
// ---------------------------------------------------------------------------

inline SuiteReport check_grad(int n_directions = 100,
                              std::uint64_t seed = 2028) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "grad";
  double worst_rel = 0.0;
  int done = 0;
  for (int i = 0; done < n_directions; ++i) {
    const Fixture f = random_multichain_sample(seed + i);
    const Classification c = classify(f.mdp);
    KeyedRng rng{seed, 0x96ADu, static_cast<std::uint64_t>(i)};
    const Policy p = random_interior_policy(f.mdp, rng);
    const Vector mu = random_full_support_mu(f.mdp.n_states, rng);
    const GradientTable g = policy_gradient(f.mdp, p, mu, c);
    for (int dir = 0; dir < 5 && done < n_directions; ++dir, ++done) {
      const TangentDirection u =
          random_tangent(f.mdp.n_states, f.mdp.n_actions, rng);
      const double analytic = (g.grad.cwiseProduct(u.u)).sum();
      const double fd = finite_diff_directional(f.mdp, p, mu, u, c, 1e-5);
      worst_rel = std::max(
          worst_rel, std::abs(analytic - fd) / (1.0 + std::abs(fd)));
    }
  }
  rep.add("directional derivatives match central differences (1e-5 rel)",
          worst_rel <= 1e-5, "max " + detail::sci(worst_rel));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: proj.  Floored-simplex projections against a KKT oracle.
// ---------------------------------------------------------------------------

namespace detail {

/// Brute-force projection by enumerating every candidate floor pattern
/// and checking primal feasibility plus KKT multiplier signs.
inline Vector oracle_project(DivergenceKind kind, const Vector& q,
                             double alpha) {
  const int d = static_cast<int>(q.size());
  Vector best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    const int clipped = __builtin_popcount(mask);
    Vector p(d);
    bool ok = true;
    if (clipped == d) {
      ok = std::abs(d * alpha - 1.0) <= 1e-9;
      p.setConstant(alpha);
    } else if (kind == DivergenceKind::euclidean) {
      double free_sum = 0.0;
      for (int i = 0; i < d; ++i)
        if (!(mask & (1u << i))) free_sum += q(i);
      const double lam = (1.0 - clipped * alpha - free_sum) / (d - clipped);
      for (int i = 0; i < d; ++i) {
        if (mask & (1u << i)) {
          p(i) = alpha;
          if (q(i) + lam > alpha + 1e-11) ok = false;  // multiplier sign
        } else {
          p(i) = q(i) + lam;
          if (p(i) < alpha - 1e-11) ok = false;  // primal feasibility
        }
      }
    } else {
      double free_mass = 0.0;
      for (int i = 0; i < d; ++i)
        if (!(mask & (1u << i))) free_mass += q(i);
      if (free_mass <= 0.0) continue;
      const double scale = (1.0 - clipped * alpha) / free_mass;
      if (!(scale > 0.0)) continue;
      for (int i = 0; i < d; ++i) {
        if (mask & (1u << i)) {
          p(i) = alpha;
          if (scale * q(i) > alpha + 1e-11) ok = false;
        } else {
          p(i) = scale * q(i);
          if (p(i) < alpha - 1e-11) ok = false;
        }
      }
    }
    if (!ok) continue;
    double obj = 0.0;
    if (kind == DivergenceKind::euclidean)
      obj = 0.5 * (p - q).squaredNorm();
    else
      for (int i = 0; i < d; ++i)
        obj += p(i) > 0.0 ? p(i) * std::log(p(i) / q(i)) : 0.0;
    if (obj < best_obj) {
      best_obj = obj;
      best = p;
    }
  }
  return best;
}

}  // namespace detail

inline SuiteReport check_proj(int n_instances = 1000,
                              std::uint64_t seed = 2029) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "proj";
  double worst_gap = 0.0, worst_feas = 0.0, worst_opt = 0.0;
  for (int i = 0; i < n_instances; ++i) {
    KeyedRng rng{seed, 0x960Au, static_cast<std::uint64_t>(i)};
    const int d = 1 + rng.next_below(8);
    const double alpha = rng.next_u01() / d;
    Vector q(d);
    for (int x = 0; x < d; ++x) q(x) = rng.next_in(-2.0, 2.0);
    const FlooredSimplexPoint pe = euclid_project_floor(q, alpha);
    const Vector oe =
        detail::oracle_project(DivergenceKind::euclidean, q, alpha);
    worst_gap = std::max(worst_gap, inf_norm(Vector(pe.p - oe)));
    worst_feas = std::max({worst_feas, std::abs(pe.p.sum() - 1.0),
                           alpha - pe.p.minCoeff()});
    Vector w(d);
    for (int x = 0; x < d; ++x) w(x) = 0.01 + rng.next_u01();
    w /= w.sum();
    const FlooredSimplexPoint pk = kl_project_floor(w, alpha);
    const Vector ok = detail::oracle_project(DivergenceKind::kl, w, alpha);
    worst_gap = std::max(worst_gap, inf_norm(Vector(pk.p - ok)));
    worst_feas = std::max({worst_feas, std::abs(pk.p.sum() - 1.0),
                           alpha - pk.p.minCoeff()});
    for (int t = 0; t < 4; ++t) {
      const Vector cand = random_floored_row(d, alpha, rng);
      worst_opt =
          std::max(worst_opt, 0.5 * (pe.p - q).squaredNorm() -
                                  0.5 * (cand - q).squaredNorm());
      double dk = 0.0, dc = 0.0;
      for (int x = 0; x < d; ++x) {
        if (pk.p(x) > 0.0) dk += pk.p(x) * std::log(pk.p(x) / w(x));
        if (cand(x) > 0.0) dc += cand(x) * std::log(cand(x) / w(x));
      }
      worst_opt = std::max(worst_opt, dk - dc);
    }
  }
  rep.add("both projections match the KKT oracle within 1e-8",
          worst_gap <= 1e-8, "max " + detail::sci(worst_gap));
  rep.add("projection outputs feasible within 1e-12", worst_feas <= 1e-12,
          "max violation " + detail::sci(worst_feas));
  rep.add("no sampled feasible point beats a projection (1e-10)",
          worst_opt <= 1e-10, "max excess " + detail::sci(worst_opt));
  const FlooredSimplexPoint we =
      euclid_project_floor((Vector(2) << 1.0, 0.0).finished(), 0.2);
  const FlooredSimplexPoint wk =
      kl_project_floor((Vector(2) << 0.9, 0.1).finished(), 0.2);
  const double worked =
      std::max({std::abs(we.p(0) - 0.8), std::abs(we.p(1) - 0.2),
                std::abs(wk.p(0) - 0.8), std::abs(wk.p(1) - 0.2)});
  rep.add("worked two-point instances reproduced exactly", worked <= 1e-15,
          "max " + detail::sci(worked));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: monotone.  Ascent property and first-order step optimality.
// ---------------------------------------------------------------------------

inline SuiteReport check_monotone(std::uint64_t seed = 2030) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "monotone";
  double worst_drop = -std::numeric_limits<double>::infinity();
  double worst_foc = -std::numeric_limits<double>::infinity();
  double worst_feas = 0.0;
  int runs = 0;
  std::vector<Fixture> fixtures;
  fixtures.push_back(twochain_fixture());
  fixtures.push_back(random_multichain_sample(seed + 1));
  fixtures.push_back(random_multichain_sample(seed + 2));
  fixtures.push_back(make_weakly_comm(4, 2, 2, seed + 3));
  fixtures.push_back(make_ergodic_ring(5, 0.2, 3, seed + 4));
  for (const auto& f : fixtures) {
    const Classification c = classify(f.mdp);
    const double alpha = 0.2 / f.mdp.n_actions;  // well inside (0, 1/|A|)
    const Vector mu = Vector::Constant(f.mdp.n_states, 1.0 / f.mdp.n_states);
    for (DivergenceKind kind : {DivergenceKind::euclidean, DivergenceKind::kl})
      for (ScheduleKind sk :
           {ScheduleKind::constant, ScheduleKind::adaptive}) {
        const StepSchedule sched{sk, 0.4, 1.8};
        KeyedRng rng{seed, 0x30A0u, static_cast<std::uint64_t>(runs)};
        const Policy pi0 = random_floored_policy(f.mdp, alpha, rng);
        const PmaTrace t = run_pma(f.mdp, mu, alpha, sched, kind, 25, pi0);
        ++runs;
        for (size_t k = 0; k + 1 < t.iterates.size(); ++k) {
          worst_drop = std::max(worst_drop,
                                t.iterates[k].j_mu - t.iterates[k + 1].j_mu);
          const ValueBundle b = evaluate(f.mdp, t.iterates[k].policy, c);
          const Matrix diff =
              t.iterates[k].policy.table - t.iterates[k + 1].policy.table;
          for (int s = 0; s < f.mdp.n_states; ++s) {
            worst_foc = std::max(
                worst_foc, diff.row(s).dot(b.g.row(s)));
            const Vector row =
                t.iterates[k + 1].policy.table.row(s).transpose();
            worst_feas = std::max({worst_feas, std::abs(row.sum() - 1.0),
                                   alpha - row.minCoeff()});
          }
        }
      }
  }
  rep.add("gain never drops along any run (1e-10)", worst_drop <= 1e-10,
          "worst drop " + detail::sci(worst_drop) + " over " +
              std::to_string(runs) + " runs");
  rep.add("per-state first-order condition <G, pi_k - pi_{k+1}> <= 1e-10",
          worst_foc <= 1e-10, "max " + detail::sci(worst_foc));
  rep.add("every iterate stays in the floored simplex (1e-12)",
          worst_feas <= 1e-12, "max violation " + detail::sci(worst_feas));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: rates.  Empirical 1/k and geometric gap decay.
// ---------------------------------------------------------------------------

inline SuiteReport check_rates(std::uint64_t seed = 2031) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "rates";
  std::vector<Fixture> fixtures;
  fixtures.push_back(twochain_fixture());
  fixtures.push_back(random_multichain_sample(seed + 11));
  fixtures.push_back(random_multichain_sample(seed + 23));
  for (const auto& f : fixtures) {
    const double alpha = 0.2 / f.mdp.n_actions;
    const Vector mu = Vector::Constant(f.mdp.n_states, 1.0 / f.mdp.n_states);
    const Classification c = classify(f.mdp);
    const ReferenceSearchResult ref_search =
        find_reference_policy(f.mdp, mu, alpha, DivergenceKind::kl, 100, seed);
    const ReferenceInfo ref = make_reference(f.mdp, ref_search.policy, mu, c);
    const CoefficientEstimate est =
        estimate_coefficients(f.mdp, mu, alpha, c, 64, seed);
    const Policy pi0 = uniform_policy(f.mdp);

    // moderate step: fast enough to show the 1/(k+1) shape, slow enough
    // that the k=5 anchor gap is far from the convergence floor
    const StepSchedule const_sched{ScheduleKind::constant, 0.1, est.c_alpha};
    const PmaTrace t_const = run_pma(f.mdp, mu, alpha, const_sched,
                                     DivergenceKind::kl, 500, pi0, &ref);
    const EnvelopeReport sub =
        check_sublinear_envelope(t_const, est, const_sched.eta0, 5, 2.0);
    double worst_product = 0.0, budget = 0.0;
    for (const auto& row : sub.rows) {
      if (row.k < 5) continue;
      worst_product = std::max(worst_product, row.gap * (row.k + 1));
    }
    budget = 2.0 * sub.rows[5].gap * 6.0;
    rep.add("constant-step gap_k (k+1) stays within 2x its k=5 level [" +
                f.name + "]",
            sub.hard_ok,
            "max product " + detail::sci(worst_product) + " vs budget " +
                detail::sci(budget));

    const double c_for_schedule = std::max(est.c_alpha, 1.0 + 1e-3);
    const StepSchedule ada{ScheduleKind::adaptive, 0.5, c_for_schedule};
    const PmaTrace t_ada = run_pma(f.mdp, mu, alpha, ada, DivergenceKind::kl,
                                   60, pi0, &ref);
    CoefficientEstimate est_for_env = est;
    est_for_env.c_alpha = c_for_schedule;
    const EnvelopeReport lin =
        check_linear_envelope(t_ada, est_for_env, ada.eta0, 0.05);
    rep.add("adaptive-step log-gap slope beats log(1 - 1/c_alpha) + 0.05 [" +
                f.name + "]",
            lin.hard_ok,
            "slope " + detail::sci(lin.fitted_slope) + " vs limit " +
                detail::sci(lin.slope_limit));
  }
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: critic.  Sampled G tables against exact ones on the fork fixture.
// ---------------------------------------------------------------------------

inline SuiteReport check_critic(int n_seeds = 100, std::uint64_t seed = 2032) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "critic";
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  const Policy p = uniform_policy(m);
  const ValueBundle exact = evaluate(m, p, c);
  const CriticConfig cfg{50, 200, 50, 200};
  int hits = 0;
  double mean_k0 = 0.0;
  for (int i = 0; i < n_seeds; ++i) {
    GenerativeModel gm{m, seed + i};
    const GEstimate ge = critic(gm, p, cfg, c);
    if (inf_norm(Matrix(ge.g_hat - exact.g)) <= 0.05) ++hits;
    mean_k0 += ge.k_hat(0, 0);
  }
  mean_k0 /= n_seeds;
  rep.add("||G_hat - G||_inf <= 0.05 in at least 95/100 seeds", hits >= 95,
          std::to_string(hits) + "/" + std::to_string(n_seeds));
  const double bias = std::abs(mean_k0 - exact.k(0, 0));
  // truncation bound 2(||V||_inf + R)/(H+1) with ||V||_inf pinned at 1,
  // an upper bound over every policy on this fixture
  const double bias_bound = 2.0 * (1.0 + m.reward_bound) / (cfg.h + 1);
  rep.add("averaged K_hat(0,0) within the truncation-bias bound",
          bias <= bias_bound,
          detail::sci(bias) + " vs bound " + detail::sci(bias_bound));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: classify.  Single-trajectory structure discovery.
// ---------------------------------------------------------------------------

inline SuiteReport check_classify(int n_seeds = 100, double delta = 0.05,
                                  std::uint64_t seed = 2033) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "classify";
  for (const Fixture& f : standard_fixtures()) {
    const Classification truth = classify(f.mdp);
    const Policy p = uniform_policy(f.mdp);
    const ChainConstants k = chain_constants(f.mdp, p, truth, 20000, seed);
    const SamplingWindows w = suggest_windows(k, delta);
    int recovered = 0, inconsistent_4x = 0;
    for (int i = 0; i < n_seeds; ++i) {
      GenerativeModel gm{f.mdp, seed + 1000 + i};
      try {
        const Classification got =
            classify_by_sampling(gm, p, w.m1, w.m2);
        if (got.same_structure(truth)) ++recovered;
      } catch (const InconsistentClassificationError&) {
        // counts as a non-recovery for this seed
      }
      GenerativeModel gm4{f.mdp, seed + 5000 + i};
      try {
        (void)classify_by_sampling(gm4, p, 4 * w.m1, 4 * w.m2);
      } catch (const InconsistentClassificationError&) {
        ++inconsistent_4x;
      }
    }
    rep.add("window classification recovers the structure >= 95/100 [" +
                f.name + "]",
            recovered >= 95,
            std::to_string(recovered) + "/" + std::to_string(n_seeds) +
                " (m1=" + std::to_string(w.m1) +
                ", m2=" + std::to_string(w.m2) + ")");
    rep.add("no inconsistency errors at 4x windows [" + f.name + "]",
            inconsistent_4x == 0, std::to_string(inconsistent_4x) + " errors");
  }
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: spma.  Sampled mirror ascent lands near the exact run.
// ---------------------------------------------------------------------------

inline SuiteReport check_spma(std::uint64_t seed = 2034) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "spma";
  const Mdp m = make_twochain();
  const Classification c = classify(m);
  const double alpha = 0.05;
  const Vector mu = Vector::Constant(3, 1.0 / 3.0);
  const StepSchedule sched{ScheduleKind::constant, 0.5, 2.0};
  const Policy pi0 = uniform_policy(m);
  const ReferenceSearchResult ref_search =
      find_reference_policy(m, mu, alpha, DivergenceKind::kl, 60, seed);
  const ReferenceInfo ref = make_reference(m, ref_search.policy, mu, c);
  const CoefficientEstimate est = estimate_coefficients(m, mu, alpha, c, 64, seed);

  const PmaTrace exact =
      run_pma(m, mu, alpha, sched, DivergenceKind::kl, 60, pi0, &ref);
  // horizon 200 keeps every per-round gradient error below 0.01 here
  const CriticConfig cfg{4, 200, 4, 200};
  GenerativeModel gm{m, seed};
  const PmaTrace sampled = run_spma(gm, mu, alpha, sched, DivergenceKind::kl,
                                    60, pi0, cfg, &ref);
  double max_eps = 0.0;
  for (const auto& it : sampled.iterates)
    if (!std::isnan(it.eps_hat)) max_eps = std::max(max_eps, it.eps_hat);
  rep.add("per-round gradient error stayed below eps = 0.01", max_eps <= 0.01,
          "max eps_hat " + detail::sci(max_eps));
  const double slack = 4.0 * est.c_alpha * est.b_alpha * 0.01 + 1e-6;
  const double final_gap = sampled.iterates.back().gap;
  const double exact_gap = exact.iterates.back().gap;
  rep.add("final sampled gap within the inexact-ascent slack of the exact gap",
          final_gap <= exact_gap + slack,
          detail::sci(final_gap) + " vs " + detail::sci(exact_gap) + " + " +
              detail::sci(slack));
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: weakly.  Floor selection in a weakly communicating MDP.
// ---------------------------------------------------------------------------

inline SuiteReport check_weakly(std::uint64_t seed = 2035) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "weakly";
  const Fixture f = make_weakly_comm(4, 2, 2, seed + 1);
  const Mdp& m = f.mdp;
  const Classification c = classify(m);
  const Vector mu = Vector::Constant(m.n_states, 1.0 / m.n_states);
  const PolicyIterationResult opt = policy_iteration(m);
  double j_spread = 0.0;
  for (int s = 0; s < m.n_states; ++s)
    j_spread = std::max(j_spread, std::abs(opt.j_star(s) - opt.j_star(0)));
  rep.add("optimal gain constant across states (weakly communicating)",
          j_spread <= 1e-8, "spread " + detail::sci(j_spread));
  const ValueBundle opt_values = evaluate_on_own_chain(m, opt.policy);
  const double q_norm = inf_norm(Matrix(opt_values.q.cwiseAbs()));
  const double eps = 0.05;
  const double alpha =
      select_alpha_weakly_communicating(eps, m.n_actions, q_norm);
  const Policy pi0 = uniform_policy(m);
  const ReferenceSearchResult ref_search =
      find_reference_policy(m, mu, alpha, DivergenceKind::kl, 100, seed);
  const ReferenceInfo ref = make_reference(m, ref_search.policy, mu, c);
  const CoefficientEstimate est =
      estimate_coefficients(m, mu, alpha, c, 64, seed);
  const double eta = 1.0;
  const double d0 = detail::weighted_divergence(DivergenceKind::kl, ref.rho,
                                                ref.policy.table, pi0.table);
  const double gap0 = ref.j_mu - mu.dot(evaluate(m, pi0, c).j);
  const int iters = static_cast<int>(std::ceil(
      (2.0 / eps) * (d0 / eta + est.c_alpha * std::max(gap0, 0.0))));
  const StepSchedule sched{ScheduleKind::constant, eta, est.c_alpha};
  const PmaTrace t =
      run_pma(m, mu, alpha, sched, DivergenceKind::kl, iters, pi0, &ref);
  const double j_star_mu = mu.dot(opt.j_star);
  const double final_gap = j_star_mu - t.iterates.back().j_mu;
  rep.add("after the prescribed iteration count the gain is 0.05-optimal",
          final_gap <= eps,
          "gap to the unclipped optimum " + detail::sci(final_gap) + " after " +
              std::to_string(iters) + " iterations (alpha " +
              detail::sci(alpha) + ")");
  rep.seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// Suite: target.  Row averages of recurrent blocks against target times.
// ---------------------------------------------------------------------------

inline SuiteReport check_target_time(std::uint64_t seed = 2036) {
  detail::Timer timer;
  SuiteReport rep;
  rep.name = "target";
  double worst_excess = -1.0;
  std::vector<Fixture> fixtures = standard_fixtures();
  fixtures.push_back(random_multichain_sample(seed + 3));
  fixtures.push_back(random_multichain_sample(seed + 4));
  for (const Fixture& f : fixtures) {
    const Classification c = classify(f.mdp);
    const Policy p = uniform_policy(f.mdp);
    const CanonicalForm cf =
        canonical_decompose_chain(induce_chain(f.mdp, p).p_pi, c);
    const ChainConstants k = chain_constants(f.mdp, p, c, 20000, seed);
    for (int i = 0; i < c.num_classes(); ++i) {
      const Matrix& r = cf.r_blocks[i];
      const int ni = static_cast<int>(r.rows());
      Matrix power = Matrix::Identity(ni, ni);
      Matrix avg = Matrix::Zero(ni, ni);
      int next_check = 1;
      for (int t = 1; t <= 100; ++t) {
        power = power * r;
        avg += power;
        if (t == next_check) {
          for (int s = 0; s < ni; ++s) {
            const double dist =
                ((avg.row(s) / t).transpose() - cf.stationary[i])
                    .cwiseAbs()
                    .sum();
            const double bound = 2.0 * k.t_tar_class[i] / t;
            worst_excess = std::max(worst_excess, dist - bound);
          }
          next_check *= 10;
        }
      }
    }
  }
  rep.add("truncated row averages obey the 2 t_tar / k bound at k=1,10,100",
          worst_excess <= 1e-10, "max excess " + detail::sci(worst_excess));
  rep.seconds = timer.seconds();
  return rep;
}

}  // namespace multichain
