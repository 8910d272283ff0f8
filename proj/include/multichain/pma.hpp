#pragma once

// Clipped policy mirror ascent with exact evaluation.
//
// Each iteration evaluates the current policy exactly, forms the
// advantage-like table G (Q on recurrent states, K on transient states),
// and solves one regularized ascent step per state over the alpha-floored
// simplex.  Improvement is monotone for every step size; step schedules
// only control the rate.  The distribution-mismatch coefficients that
// enter the rate bounds,
//   b_alpha = max_{pi in Pi_alpha} ||rho^pi_mu||_1,
//   c_alpha = max_s max_pi rho^pi_mu(s) / min_pi rho^pi_mu(s),
// are maximized over finitely many sampled policies here, so the returned
// values are lower bounds; every envelope built from them says so.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "multichain/chain.hpp"
#include "multichain/mdp.hpp"
#include "multichain/projection.hpp"
#include "multichain/rng.hpp"
#include "multichain/values.hpp"

namespace multichain {

struct InfeasibleConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class ScheduleKind { constant, adaptive };

/// Step-size schedule.  The adaptive schedule grows geometrically,
/// eta_{k+1} = eta_k * c_alpha / (c_alpha - 1), nudged up by ulps when
/// rounding would break the defining inequality
/// (c_alpha - 1) eta_{k+1} >= c_alpha eta_k; growth saturates at kEtaCap
/// to keep arithmetic finite on long runs.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  double eta0 = 1.0;
  double c_alpha = 2.0;  // only read by the adaptive schedule

  static constexpr double kEtaCap = 1e12;

  void validate() const {
    if (!(eta0 > 0.0))
      throw InfeasibleConfigError("StepSchedule: eta0 must be positive");
    if (kind == ScheduleKind::adaptive && !(c_alpha > 1.0))
      throw InfeasibleConfigError(
          "StepSchedule: adaptive schedule needs c_alpha > 1");
  }

  double next_eta(double eta) const {
    if (kind == ScheduleKind::constant) return eta;
    if (eta >= kEtaCap) return eta;
    double next = eta * (c_alpha / (c_alpha - 1.0));
    while (next * (c_alpha - 1.0) < eta * c_alpha)
      next = std::nextafter(next, std::numeric_limits<double>::infinity());
    return std::min(next, kEtaCap);
  }
};

/// One recorded iterate.  gap and divergence_to_ref are NaN when the run
/// had no reference policy; eps_hat is NaN for exact-gradient runs.
struct PmaIterate {
  int k = 0;
  double j_mu = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();
  double divergence_to_ref = std::numeric_limits<double>::quiet_NaN();
  double eta = 0.0;
  double wall_seconds = 0.0;
  long long samples_cum = 0;
  double eps_hat = std::numeric_limits<double>::quiet_NaN();
  Policy policy;
};

struct PmaTrace {
  std::vector<PmaIterate> iterates;
  bool has_reference = false;
  double j_ref = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void require_in_floor(const Policy& p, double alpha, const char* who) {
  if (p.table.size() == 0)
    throw std::invalid_argument(std::string(who) + ": empty policy");
  for (int s = 0; s < p.table.rows(); ++s) {
    if (std::abs(p.table.row(s).sum() - 1.0) > kProbTol)
      throw std::invalid_argument(std::string(who) + ": policy row s=" +
                                  std::to_string(s) + " does not sum to 1");
    for (int a = 0; a < p.table.cols(); ++a)
      if (p.table(s, a) < alpha - kFloorFeasTol)
        throw std::invalid_argument(
            std::string(who) + ": pi(" + std::to_string(a) + "|" +
            std::to_string(s) + ") violates the floor alpha = " +
            std::to_string(alpha));
  }
}

inline void require_alpha_open(double alpha, int n_actions, const char* who) {
  if (!(alpha > 0.0) || !(alpha < 1.0 / n_actions))
    throw InfeasibleConfigError(
        std::string(who) + ": alpha must lie in (0, 1/|A|), got " +
        std::to_string(alpha) + " with |A| = " + std::to_string(n_actions));
}

/// rho-weighted divergence sum_s rho(s) D(ref(.|s), p(.|s)).
inline double weighted_divergence(DivergenceKind kind, const Vector& rho,
                                  const Matrix& ref, const Matrix& p) {
  double acc = 0.0;
  for (int s = 0; s < ref.rows(); ++s)
    acc += rho(s) *
           divergence(kind, ref.row(s).transpose(), p.row(s).transpose());
  return acc;
}

}  // namespace detail

/// Optional reference for gap and divergence reporting in a trace.
struct ReferenceInfo {
  Policy policy;
  Vector rho;   ///< visitation splice of the reference policy from mu
  double j_mu;  ///< exact gain of the reference from mu
};

/// Builds ReferenceInfo for an arbitrary policy in Pi_alpha.
inline ReferenceInfo make_reference(const Mdp& m, const Policy& ref,
                                    const Vector& mu,
                                    const Classification& c) {
  ReferenceInfo info;
  info.policy = ref;
  info.rho = visitation(m, ref, c, mu).rho;
  info.j_mu = mu.dot(evaluate(m, ref, c).j);
  return info;
}

/// Runs `iters` exact mirror-ascent iterations from pi0 and records every
/// iterate (k = 0..iters, so the trace has iters + 1 rows).  Row k stores
/// the step size that produces iterate k+1; the last row stores the next
/// step the schedule would have taken.
inline PmaTrace run_pma(const Mdp& m, const Vector& mu, double alpha,
                        const StepSchedule& schedule, DivergenceKind kind,
                        int iters, const Policy& pi0,
                        const ReferenceInfo* ref = nullptr) {
  require_valid(m);
  detail::require_distribution(mu, m.n_states, "run_pma");
  detail::require_alpha_open(alpha, m.n_actions, "run_pma");
  schedule.validate();
  require_policy_shape(m, pi0, "run_pma");
  detail::require_in_floor(pi0, alpha, "run_pma");
  if (iters < 0) throw InfeasibleConfigError("run_pma: iters must be >= 0");

  const Classification c = classify(m);
  const auto t0 = std::chrono::steady_clock::now();
  PmaTrace trace;
  if (ref) {
    trace.has_reference = true;
    trace.j_ref = ref->j_mu;
  }
  Policy cur = pi0;
  cur.floor = alpha;
  double eta = schedule.eta0;
  for (int k = 0; k <= iters; ++k) {
    const ValueBundle b = evaluate(m, cur, c);
    PmaIterate it;
    it.k = k;
    it.j_mu = mu.dot(b.j);
    it.eta = eta;
    it.policy = cur;
    if (ref) {
      it.gap = ref->j_mu - it.j_mu;
      it.divergence_to_ref = detail::weighted_divergence(
          kind, ref->rho, ref->policy.table, cur.table);
    }
    it.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    trace.iterates.push_back(std::move(it));
    if (k == iters) break;
    Policy next;
    next.table.resize(m.n_states, m.n_actions);
    next.floor = alpha;
    for (int s = 0; s < m.n_states; ++s)
      next.table.row(s) = mirror_step(cur.table.row(s).transpose(),
                                      b.g.row(s).transpose(), eta, kind, alpha)
                              .p.transpose();
    cur = std::move(next);
    eta = schedule.next_eta(eta);
  }
  return trace;
}

enum class CoeffMethod { vertex_enumeration, random_sampling };

/// Sampled lower bounds for the mismatch coefficients.  lower_bound is
/// always true: the maxima run over the examined policies only.
struct CoefficientEstimate {
  double b_alpha = 1.0;
  double c_alpha = 1.0;
  CoeffMethod method = CoeffMethod::random_sampling;
  long long policies_examined = 0;
  bool lower_bound = true;
};

/// Uniform sample from M_alpha: floor plus a flat Dirichlet spread of the
/// leftover mass.
inline Vector random_floored_row(int d, double alpha, KeyedRng& rng) {
  Vector e(d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    e(i) = -std::log(1.0 - rng.next_u01());
    sum += e(i);
  }
  if (sum <= 0.0) return Vector::Constant(d, 1.0 / d);
  return Vector::Constant(d, alpha) + (1.0 - d * alpha) * e / sum;
}

inline Policy random_floored_policy(const Mdp& m, double alpha,
                                    KeyedRng& rng) {
  Policy p;
  p.table.resize(m.n_states, m.n_actions);
  p.floor = alpha;
  for (int s = 0; s < m.n_states; ++s)
    p.table.row(s) = random_floored_row(m.n_actions, alpha, rng).transpose();
  return p;
}

/// Maximizes ||rho||_1 and the per-state rho ratios over all clipped
/// deterministic policies (when |A|^|S| <= 4096) plus n_samples random
/// policies from Pi_alpha.  Requires a full-support mu: without it some
/// state can have rho = 0 and the ratio c_alpha is unbounded.
inline CoefficientEstimate estimate_coefficients(const Mdp& m,
                                                 const Vector& mu,
                                                 double alpha,
                                                 const Classification& c,
                                                 int n_samples,
                                                 std::uint64_t seed) {
  detail::require_distribution(mu, m.n_states, "estimate_coefficients");
  require_full_support(mu, "estimate_coefficients");
  detail::require_alpha_open(alpha, m.n_actions, "estimate_coefficients");
  CoefficientEstimate est;
  Vector rho_min, rho_max;
  const auto absorb = [&](const Policy& p) {
    const Vector rho = visitation(m, p, c, mu).rho;
    est.b_alpha = std::max(est.b_alpha, rho.cwiseAbs().sum());
    if (est.policies_examined == 0) {
      rho_min = rho;
      rho_max = rho;
    } else {
      rho_min = rho_min.cwiseMin(rho);
      rho_max = rho_max.cwiseMax(rho);
    }
    ++est.policies_examined;
  };

  double combos = 1.0;
  for (int s = 0; s < m.n_states; ++s) {
    combos *= m.n_actions;
    if (combos > 4096.0) break;
  }
  if (combos <= 4096.0) {
    est.method = CoeffMethod::vertex_enumeration;
    std::vector<int> act(m.n_states, 0);
    while (true) {
      absorb(clipped_deterministic(m, act, alpha));
      int s = 0;
      while (s < m.n_states && ++act[s] == m.n_actions) act[s++] = 0;
      if (s == m.n_states) break;
    }
  } else {
    est.method = CoeffMethod::random_sampling;
  }
  for (int i = 0; i < n_samples; ++i) {
    KeyedRng rng{seed, 0x5EEDu, static_cast<std::uint64_t>(i)};
    absorb(random_floored_policy(m, alpha, rng));
  }
  if (est.policies_examined == 0)
    throw std::invalid_argument(
        "estimate_coefficients: no policies examined; pass n_samples > 0");
  for (int s = 0; s < m.n_states; ++s)
    if (rho_min(s) > 0.0)
      est.c_alpha = std::max(est.c_alpha, rho_max(s) / rho_min(s));
  return est;
}

struct EnvelopeRow {
  int k = 0;
  double gap = 0.0;
  double bound = 0.0;
  double margin = 0.0;  ///< bound - gap; negative means the bound is broken
};

/// Envelope check result.  advisory_ok compares gaps against the
/// theoretical curve built from *estimated* coefficients and is advisory;
/// hard_ok is the rate-shape assertion that acceptance gates on.
struct EnvelopeReport {
  std::vector<EnvelopeRow> rows;
  bool advisory_ok = true;
  bool hard_ok = true;
  double fitted_slope = 0.0;  ///< linear report only
  double slope_limit = 0.0;   ///< linear report only
  std::string note;
};

inline const char* kLowerBoundNote =
    "b_alpha/c_alpha are sampled lower bounds; the advisory envelope can be "
    "exceeded without contradicting the guarantee";

/// Constant-step envelope: advisory bound
///   gap_k <= (D_rho(ref, pi_0)/eta + c_alpha gap_0) / (k+1),
/// hard assertion gap_k (k+1) <= shape_factor * [gap_{k0} (k0+1)] for all
/// k >= shape_base (empirical O(1/k) shape).
inline EnvelopeReport check_sublinear_envelope(const PmaTrace& trace,
                                               const CoefficientEstimate& est,
                                               double eta, int shape_base = 5,
                                               double shape_factor = 2.0) {
  if (!trace.has_reference)
    throw std::invalid_argument(
        "check_sublinear_envelope: trace has no reference policy");
  EnvelopeReport rep;
  rep.note = kLowerBoundNote;
  const double d0 = trace.iterates.front().divergence_to_ref;
  const double gap0 = trace.iterates.front().gap;
  const double numer = d0 / eta + est.c_alpha * std::max(gap0, 0.0);
  const int kmax = static_cast<int>(trace.iterates.size()) - 1;
  const int base = std::min(shape_base, kmax);
  const double shape_budget =
      shape_factor * trace.iterates[base].gap * (base + 1);
  for (const auto& it : trace.iterates) {
    EnvelopeRow row;
    row.k = it.k;
    row.gap = it.gap;
    row.bound = numer / (it.k + 1);
    row.margin = row.bound - row.gap;
    if (row.margin < -1e-9) rep.advisory_ok = false;
    if (it.k >= base && it.gap * (it.k + 1) > shape_budget) rep.hard_ok = false;
    rep.rows.push_back(row);
  }
  return rep;
}

/// Geometric envelope for adaptive steps: advisory bound
///   gap_k <= (1 - 1/c_alpha)^k (D_rho(ref, pi_0)/(eta0 (c_alpha - 1)) + gap_0),
/// hard assertion: least-squares slope of log gap_k (over iterates with
/// gap > 1e-12) is at most log(1 - 1/c_alpha) + slope_tol.
inline EnvelopeReport check_linear_envelope(const PmaTrace& trace,
                                            const CoefficientEstimate& est,
                                            double eta0,
                                            double slope_tol = 0.05) {
  if (!trace.has_reference)
    throw std::invalid_argument(
        "check_linear_envelope: trace has no reference policy");
  if (!(est.c_alpha > 1.0))
    throw std::invalid_argument(
        "check_linear_envelope: needs c_alpha > 1 (estimate saw one policy?)");
  EnvelopeReport rep;
  rep.note = kLowerBoundNote;
  const double rate = 1.0 - 1.0 / est.c_alpha;
  const double d0 = trace.iterates.front().divergence_to_ref;
  const double gap0 = trace.iterates.front().gap;
  const double numer = d0 / (eta0 * (est.c_alpha - 1.0)) + std::max(gap0, 0.0);
  double factor = 1.0;
  std::vector<double> xs, ys;
  for (const auto& it : trace.iterates) {
    EnvelopeRow row;
    row.k = it.k;
    row.gap = it.gap;
    row.bound = numer * factor;
    row.margin = row.bound - row.gap;
    if (row.margin < -1e-9) rep.advisory_ok = false;
    rep.rows.push_back(row);
    factor *= rate;
    if (it.gap > 1e-12) {
      xs.push_back(it.k);
      ys.push_back(std::log(it.gap));
    }
  }
  rep.slope_limit = std::log(rate) + slope_tol;
  if (xs.size() < 2) {
    // converged below the gap floor immediately: faster than any slope
    rep.fitted_slope = -std::numeric_limits<double>::infinity();
    rep.hard_ok = true;
    return rep;
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  rep.fitted_slope = sxy / sxx;
  rep.hard_ok = rep.fitted_slope <= rep.slope_limit;
  return rep;
}

/// Floor size that makes the best clipped policy eps-optimal in a weakly
/// communicating MDP: alpha = eps / (2 (|A| + 1) ||Q*||_inf).  Rejected
/// when the resulting alpha is not strictly inside (0, 1/|A|).
inline double select_alpha_weakly_communicating(double eps, int n_actions,
                                                double q_star_norm) {
  if (n_actions < 2)
    throw InfeasibleConfigError(
        "select_alpha_weakly_communicating: need at least two actions");
  if (!(q_star_norm > 0.0))
    throw InfeasibleConfigError(
        "select_alpha_weakly_communicating: ||Q*||_inf must be positive");
  if (!(eps > 0.0))
    throw InfeasibleConfigError(
        "select_alpha_weakly_communicating: eps must be positive");
  const double alpha = eps / (2.0 * (n_actions + 1) * q_star_norm);
  if (!(alpha < 1.0 / n_actions))
    throw InfeasibleConfigError(
        "select_alpha_weakly_communicating: alpha = " + std::to_string(alpha) +
        " is not feasible (needs alpha < 1/|A|)");
  if (!(eps < 1.0))
    throw InfeasibleConfigError(
        "select_alpha_weakly_communicating: eps must lie in (0, 1)");
  return alpha;
}

/// Result of exact multichain policy iteration over deterministic
/// policies: the optimal gain vector and a policy attaining it.
struct PolicyIterationResult {
  std::vector<int> actions;
  Policy policy;  ///< deterministic table (one unit entry per row)
  Vector j_star;
  Vector v;
  int iterations = 0;
};

/// Howard-style multichain policy iteration: improve the gain first, then
/// the bias over gain-maximizing actions, switching only on strict
/// improvement beyond tol so the iteration terminates.
inline PolicyIterationResult policy_iteration(const Mdp& m,
                                              double tol = 1e-9) {
  require_valid(m);
  PolicyIterationResult res;
  res.actions.assign(m.n_states, 0);
  for (int s = 0; s < m.n_states; ++s)
    m.reward.row(s).maxCoeff(&res.actions[s]);
  for (int round = 0; round < 10000; ++round) {
    Policy det;
    det.table = Matrix::Zero(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) det.table(s, res.actions[s]) = 1.0;
    const ValueBundle b = evaluate_on_own_chain(m, det);
    bool switched = false;
    for (int s = 0; s < m.n_states; ++s) {
      double best_k = b.k(s, res.actions[s]);
      for (int a = 0; a < m.n_actions; ++a) best_k = std::max(best_k, b.k(s, a));
      if (best_k > b.k(s, res.actions[s]) + tol) {
        for (int a = 0; a < m.n_actions; ++a)
          if (b.k(s, a) >= best_k - tol * 0.5) {
            res.actions[s] = a;
            break;
          }
        switched = true;
        continue;
      }
      // bias improvement among gain-maximizing actions
      const double cur_bias =
          m.reward(s, res.actions[s]) + m.kernel[res.actions[s]].row(s).dot(b.v);
      double best_bias = cur_bias;
      int best_a = res.actions[s];
      for (int a = 0; a < m.n_actions; ++a) {
        if (b.k(s, a) < best_k - tol) continue;
        const double bias = m.reward(s, a) + m.kernel[a].row(s).dot(b.v);
        if (bias > best_bias + tol && bias > best_bias) {
          best_bias = bias;
          best_a = a;
        }
      }
      if (best_a != res.actions[s]) {
        res.actions[s] = best_a;
        switched = true;
      }
    }
    if (!switched) {
      res.policy = det;
      res.j_star = b.j;
      res.v = b.v;
      res.iterations = round + 1;
      return res;
    }
  }
  throw std::runtime_error("policy_iteration: did not settle in 10000 rounds");
}

/// Best-known policy in Pi_alpha, used as the reference in gap reports:
/// the winner (by exact gain from mu) among clipped policy-iteration
/// optima and several long adaptive mirror-ascent runs from random
/// starting points.
struct ReferenceSearchResult {
  Policy policy;
  double j_mu = 0.0;
  std::string source;
};

inline ReferenceSearchResult find_reference_policy(
    const Mdp& m, const Vector& mu, double alpha, DivergenceKind kind,
    int base_iters, std::uint64_t seed, int n_starts = 10) {
  const Classification c = classify(m);
  ReferenceSearchResult best;
  bool have = false;
  const auto consider = [&](const Policy& p, const std::string& src) {
    const double j = mu.dot(evaluate(m, p, c).j);
    if (!have || j > best.j_mu + 1e-15) {
      best = {p, j, src};
      have = true;
    }
  };
  const PolicyIterationResult pi_star = policy_iteration(m);
  consider(clipped_deterministic(m, pi_star.actions, alpha),
           "clipped policy-iteration optimum");
  StepSchedule sched{ScheduleKind::adaptive, 1.0, 2.0};
  const int horizon = std::max(10, 10 * base_iters);
  for (int i = 0; i < n_starts; ++i) {
    KeyedRng rng{seed, 0x4EF5u, static_cast<std::uint64_t>(i)};
    const Policy start = random_floored_policy(m, alpha, rng);
    const PmaTrace t = run_pma(m, mu, alpha, sched, kind, horizon, start);
    consider(t.iterates.back().policy,
             "mirror-ascent run " + std::to_string(i));
  }
  return best;
}

}  // namespace multichain
