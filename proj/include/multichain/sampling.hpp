#pragma once

// Generative-model sampling: truncated-rollout critic, structure discovery
// from a single trajectory, and the sampled variant of mirror ascent.
//
// All draws are counter-based (see rng.hpp): a trajectory is a pure
// function of (seed, stream, s0, a0, trajectory index), so runs replay bit
// for bit under a fixed seed regardless of call order.  The model's sample
// counter advances by exactly one per next-state draw.
//
// The critic estimates K(s0,a0) by averaged truncated reward sums and
// Q(s0,a0) by averaged double partial sums of centered rewards
//   Q_hat_j = (1/(H'+1)) sum_{h<=H'} sum_{i<=h} (r(s_i,a_i) - K_hat(s_i,a_i)),
// then splices G_hat = Q_hat on recurrent rows and K_hat on transient
// rows.  Truncation biases K_hat by at most 2(||V|| + R)/(H+1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multichain/chain.hpp"
#include "multichain/mdp.hpp"
#include "multichain/pma.hpp"
#include "multichain/rng.hpp"
#include "multichain/values.hpp"

namespace multichain {

/// Sampling access to an MDP.  `samples` counts next-state draws issued
/// through this model; identical seeds and call sequences replay draws.
struct GenerativeModel {
  Mdp mdp;
  std::uint64_t seed = 0;
  long long samples = 0;
};

/// Rollout budgets: n trajectories of horizon h for the K stage, n2 of
/// horizon h2 for the Q stage.  All four must be positive.
struct CriticConfig {
  int n = 1;
  int h = 1;
  int n2 = 1;
  int h2 = 1;

  void validate() const {
    if (n <= 0 || h <= 0 || n2 <= 0 || h2 <= 0)
      throw InfeasibleConfigError(
          "CriticConfig: n, h, n2, h2 must all be positive");
  }
};

/// Critic output.  samples_used counts every state-action pair visited,
/// initial pairs included: |S||A| (n (h+1) + n2 (h2+1)).
struct GEstimate {
  Matrix g_hat;
  Matrix k_hat;
  Matrix q_hat;
  long long samples_used = 0;
};

namespace detail {

/// Key streams separating independent consumers of one seed.
enum Stream : std::uint64_t {
  kStreamCriticK = 1,
  kStreamCriticQ = 2,
  kStreamClassify = 3,
};

}  // namespace detail

/// Samples the trajectory (s_0,a_0..s_h,a_h) started from the forced pair
/// (s0, a0), following p afterwards.  Advances gm.samples by `horizon`.
/// The draws are keyed by (seed, stream, s0, a0, traj, step), so distinct
/// trajectory indices give independent replayable trajectories.
inline std::vector<std::pair<int, int>> rollout(GenerativeModel& gm,
                                                const Policy& p, int s0,
                                                int a0, int horizon,
                                                long long traj = 0,
                                                std::uint64_t stream = 0) {
  require_policy_shape(gm.mdp, p, "rollout");
  if (s0 < 0 || s0 >= gm.mdp.n_states || a0 < 0 || a0 >= gm.mdp.n_actions)
    throw std::invalid_argument("rollout: (s0, a0) out of range");
  if (horizon < 0) throw std::invalid_argument("rollout: negative horizon");
  std::vector<std::pair<int, int>> traj_out;
  traj_out.reserve(horizon + 1);
  traj_out.emplace_back(s0, a0);
  int s = s0, a = a0;
  std::vector<double> row(std::max(gm.mdp.n_states, gm.mdp.n_actions));
  for (int step = 1; step <= horizon; ++step) {
    const std::uint64_t base =
        mix_key({gm.seed, stream, static_cast<std::uint64_t>(s0),
                 static_cast<std::uint64_t>(a0),
                 static_cast<std::uint64_t>(traj),
                 static_cast<std::uint64_t>(step)});
    for (int y = 0; y < gm.mdp.n_states; ++y) row[y] = gm.mdp.kernel[a](s, y);
    s = sample_categorical(row.data(), gm.mdp.n_states,
                           u01_from_bits(splitmix64(base ^ 0x1u)));
    ++gm.samples;
    const double ua = u01_from_bits(splitmix64(base ^ 0x2u));
    for (int y = 0; y < gm.mdp.n_actions; ++y) row[y] = p.table(s, y);
    a = sample_categorical(row.data(), gm.mdp.n_actions, ua);
    traj_out.emplace_back(s, a);
  }
  return traj_out;
}

/// Truncated-rollout critic (round selects a fresh key stream so repeated
/// calls inside an optimization loop draw independent trajectories).
inline GEstimate critic(GenerativeModel& gm, const Policy& p,
                        const CriticConfig& cfg, const Classification& c,
                        long long round = 0) {
  cfg.validate();
  require_policy_shape(gm.mdp, p, "critic");
  const Mdp& m = gm.mdp;
  GEstimate est;
  est.k_hat = Matrix::Zero(m.n_states, m.n_actions);
  est.q_hat = Matrix::Zero(m.n_states, m.n_actions);
  for (int s0 = 0; s0 < m.n_states; ++s0)
    for (int a0 = 0; a0 < m.n_actions; ++a0) {
      double acc = 0.0;
      for (int j = 0; j < cfg.n; ++j) {
        const auto traj =
            rollout(gm, p, s0, a0, cfg.h,
                    j + round * static_cast<long long>(cfg.n),
                    detail::kStreamCriticK);
        double sum = 0.0;
        for (const auto& [s, a] : traj) sum += m.reward(s, a);
        acc += sum / (cfg.h + 1);
      }
      est.k_hat(s0, a0) = acc / cfg.n;
    }
  for (int s0 = 0; s0 < m.n_states; ++s0)
    for (int a0 = 0; a0 < m.n_actions; ++a0) {
      double acc = 0.0;
      for (int j = 0; j < cfg.n2; ++j) {
        const auto traj =
            rollout(gm, p, s0, a0, cfg.h2,
                    j + round * static_cast<long long>(cfg.n2),
                    detail::kStreamCriticQ);
        // sum_{h<=H'} sum_{i<=h} x_i = sum_i (H'+1-i) x_i
        double sum = 0.0;
        for (int i = 0; i <= cfg.h2; ++i) {
          const auto& [s, a] = traj[i];
          sum += (cfg.h2 + 1 - i) * (m.reward(s, a) - est.k_hat(s, a));
        }
        acc += sum / (cfg.h2 + 1);
      }
      est.q_hat(s0, a0) = acc / cfg.n2;
    }
  est.g_hat.resize(m.n_states, m.n_actions);
  for (int s = 0; s < m.n_states; ++s)
    est.g_hat.row(s) =
        c.is_recurrent(s) ? est.q_hat.row(s) : est.k_hat.row(s);
  est.samples_used = static_cast<long long>(m.n_states) * m.n_actions *
                     (static_cast<long long>(cfg.n) * (cfg.h + 1) +
                      static_cast<long long>(cfg.n2) * (cfg.h2 + 1));
  return est;
}

struct InconsistentClassificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Window sizes for classify_by_sampling at confidence 1 - delta:
/// m1 = ceil(t_half log(2/delta)) burn-in steps (at least one; a chain
/// with no transient states still needs a window start), then an
/// m2 = ceil(e t_cov log(2/delta)) step observation window.
struct SamplingWindows {
  long long m1 = 1;
  long long m2 = 1;
};

inline SamplingWindows suggest_windows(const ChainConstants& k, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("suggest_windows: delta must lie in (0, 1)");
  const double log_term = std::log(2.0 / delta);
  SamplingWindows w;
  w.m1 = std::max<long long>(
      1, static_cast<long long>(std::ceil(k.t_half * log_term)));
  w.m2 = std::max<long long>(
      1, static_cast<long long>(
             std::ceil(std::exp(1.0) * k.t_cov * log_term)));
  return w;
}

/// Discovers the chain structure from rollouts alone: for each probe
/// state, one trajectory is rolled for m1 burn-in steps plus an m2-step
/// window; the set of states seen in the window is declared a recurrent
/// class, and the probe is recurrent iff it belongs to that set.  Two
/// windows that overlap without being equal mean some window failed to
/// capture a whole class; that raises InconsistentClassificationError and
/// callers retry with larger windows.  Every state must end up classified,
/// so by default every state is probed.
inline Classification classify_by_sampling(GenerativeModel& gm,
                                           const Policy& p, long long m1,
                                           long long m2,
                                           std::vector<int> probes = {}) {
  require_policy_shape(gm.mdp, p, "classify_by_sampling");
  if (m1 < 0 || m2 < 1)
    throw std::invalid_argument(
        "classify_by_sampling: need m1 >= 0 and m2 >= 1");
  const int n = gm.mdp.n_states;
  if (probes.empty())
    for (int s = 0; s < n; ++s) probes.push_back(s);
  std::vector<std::set<int>> classes;
  std::vector<int> declared_transient;
  for (size_t idx = 0; idx < probes.size(); ++idx) {
    const int s0 = probes[idx];
    if (s0 < 0 || s0 >= n)
      throw std::invalid_argument("classify_by_sampling: probe out of range");
    bool known_recurrent = false;
    for (const auto& cls : classes) known_recurrent |= cls.count(s0) > 0;
    if (known_recurrent) continue;
    const double u0 = u01_from_bits(mix_key(
        {gm.seed, detail::kStreamClassify, 0xA0u,
         static_cast<std::uint64_t>(s0), static_cast<std::uint64_t>(idx)}));
    std::vector<double> prow(gm.mdp.n_actions);
    for (int a = 0; a < gm.mdp.n_actions; ++a) prow[a] = p.table(s0, a);
    const int a0 = sample_categorical(prow.data(), gm.mdp.n_actions, u0);
    const auto traj = rollout(gm, p, s0, a0,
                              static_cast<int>(m1 + m2 - 1),
                              static_cast<long long>(idx),
                              detail::kStreamClassify);
    std::set<int> window;
    for (long long t = m1; t < m1 + m2; ++t)
      window.insert(traj[static_cast<size_t>(t)].first);
    bool matched = false;
    for (const auto& cls : classes) {
      std::vector<int> common;
      std::set_intersection(cls.begin(), cls.end(), window.begin(),
                            window.end(), std::back_inserter(common));
      if (common.empty()) continue;
      if (cls == window) {
        matched = true;
        break;
      }
      throw InconsistentClassificationError(
          "classify_by_sampling: window from probe " + std::to_string(s0) +
          " overlaps a previously discovered class without matching it; "
          "retry with larger windows");
    }
    if (!matched) classes.push_back(window);
    if (window.count(s0) == 0) declared_transient.push_back(s0);
  }
  for (int s : declared_transient)
    for (const auto& cls : classes)
      if (cls.count(s))
        throw InconsistentClassificationError(
            "classify_by_sampling: state " + std::to_string(s) +
            " was declared transient but appears in a discovered class; "
            "retry with larger windows");
  Classification c;
  c.label.assign(n, -1);
  std::vector<std::vector<int>> sorted_classes;
  for (const auto& cls : classes)
    sorted_classes.emplace_back(cls.begin(), cls.end());
  std::sort(sorted_classes.begin(), sorted_classes.end());
  c.recurrent_classes = std::move(sorted_classes);
  for (int i = 0; i < c.num_classes(); ++i)
    for (int s : c.recurrent_classes[i]) c.label[s] = i;
  std::set<int> seen(probes.begin(), probes.end());
  for (int s = 0; s < n; ++s) {
    if (c.label[s] >= 0) continue;
    if (!seen.count(s))
      throw std::invalid_argument(
          "classify_by_sampling: state " + std::to_string(s) +
          " was neither probed nor discovered; probe it explicitly");
    c.transient.push_back(s);
  }
  return c;
}

/// Critic budgets sufficient for ||G_hat - G||_inf <= eps with probability
/// 1 - delta, from the concentration analysis (union bound over pairs).
/// These are worst-case prescriptions and grow like eps^-5; callers
/// normally pass explicit budgets instead.
inline CriticConfig suggest_critic_budgets(double eps, double delta,
                                           const Mdp& m, double v_norm,
                                           double t_tar) {
  if (!(eps > 0.0) || !(delta > 0.0) || !(delta < 1.0))
    throw InfeasibleConfigError(
        "suggest_critic_budgets: need eps > 0 and delta in (0, 1)");
  const double r = m.reward_bound;
  const double pairs = static_cast<double>(m.n_states) * m.n_actions;
  const double log_term = std::log(2.0 * pairs / delta);
  CriticConfig cfg;
  const double h2 = 3.0 * (2.0 * t_tar + 1.0) * std::max(v_norm, eps) / eps;
  cfg.h2 = static_cast<int>(std::ceil(std::max(1.0, h2)));
  const double eps_q = eps / 3.0;
  cfg.n2 = static_cast<int>(std::ceil(
      2.0 * r * r * (cfg.h2 + 2.0) * (cfg.h2 + 2.0) / (eps_q * eps_q) *
      log_term));
  const double eps_k = 2.0 * eps / (3.0 * (cfg.h2 + 2.0));
  cfg.h = static_cast<int>(std::ceil(4.0 * (v_norm + r) / eps_k));
  cfg.n = static_cast<int>(
      std::ceil(8.0 * r * r / (eps_k * eps_k) * log_term));
  return cfg;
}

struct SpmaOptions {
  bool use_exact_gradient = false;  ///< diagnostic: bypass the critic
  bool record_eps_hat = true;       ///< store ||G_hat - G||_inf per round
};

/// Sampled mirror ascent: run_pma with the exact table G replaced by the
/// critic estimate (fresh key stream per round).  The trace's j_mu, gap
/// and divergence columns are exact diagnostics; eps_hat on row k is the
/// gradient error of the round that produced iterate k+1, and samples_cum
/// on row k counts the draws consumed to reach iterate k.
inline PmaTrace run_spma(GenerativeModel& gm, const Vector& mu, double alpha,
                         const StepSchedule& schedule, DivergenceKind kind,
                         int iters, const Policy& pi0,
                         const CriticConfig& cfg,
                         const ReferenceInfo* ref = nullptr,
                         const SpmaOptions& options = {}) {
  const Mdp& m = gm.mdp;
  require_valid(m);
  detail::require_distribution(mu, m.n_states, "run_spma");
  detail::require_alpha_open(alpha, m.n_actions, "run_spma");
  schedule.validate();
  cfg.validate();
  require_policy_shape(m, pi0, "run_spma");
  detail::require_in_floor(pi0, alpha, "run_spma");
  if (iters < 0) throw InfeasibleConfigError("run_spma: iters must be >= 0");

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
  long long samples_cum = 0;
  for (int k = 0; k <= iters; ++k) {
    const ValueBundle b = evaluate(m, cur, c);
    PmaIterate it;
    it.k = k;
    it.j_mu = mu.dot(b.j);
    it.eta = eta;
    it.policy = cur;
    it.samples_cum = samples_cum;
    if (ref) {
      it.gap = ref->j_mu - it.j_mu;
      it.divergence_to_ref = detail::weighted_divergence(
          kind, ref->rho, ref->policy.table, cur.table);
    }
    if (k < iters) {
      Matrix g_used;
      if (options.use_exact_gradient) {
        g_used = b.g;
        it.eps_hat = 0.0;
      } else {
        const GEstimate ge = critic(gm, cur, cfg, c, k);
        g_used = ge.g_hat;
        samples_cum += ge.samples_used;
        if (options.record_eps_hat)
          it.eps_hat = inf_norm(Matrix(ge.g_hat - b.g));
      }
      Policy next;
      next.table.resize(m.n_states, m.n_actions);
      next.floor = alpha;
      for (int s = 0; s < m.n_states; ++s)
        next.table.row(s) =
            mirror_step(cur.table.row(s).transpose(),
                        g_used.row(s).transpose(), eta, kind, alpha)
                .p.transpose();
      it.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      trace.iterates.push_back(std::move(it));
      cur = std::move(next);
      eta = schedule.next_eta(eta);
    } else {
      it.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      trace.iterates.push_back(std::move(it));
    }
  }
  return trace;
}

}  // namespace multichain
