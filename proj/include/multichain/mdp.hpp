#pragma once

// Core tabular MDP types.
//
// A finite MDP is stored densely: one |S| x |S| transition matrix per
// action plus an |S| x |A| reward table bounded by reward_bound.  A policy
// is a row-stochastic |S| x |A| table; inducing it against an MDP yields
// the Markov chain pair (P_pi, r_pi) together with the selection operator
// Theta_pi that maps state-action tables to state quantities.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "multichain/linalg.hpp"

namespace multichain {

/// Uniform tolerance for stochasticity checks (row sums, nonnegativity).
inline constexpr double kProbTol = 1e-12;

struct Mdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<Matrix> kernel;  ///< kernel[a](s, s') = P(s' | s, a)
  Matrix reward;               ///< reward(s, a) in [-reward_bound, reward_bound]
  double reward_bound = 1.0;
};

/// Randomized stationary policy.  `floor` records the probability floor
/// alpha when the policy is known to live in the clipped simplex; it is
/// metadata, not an enforced constraint.
struct Policy {
  Matrix table;  ///< table(s, a) = pi(a | s)
  double floor = 0.0;
};

/// Direction in the tangent space of the policy polytope: each row sums
/// to zero, so pi + t u keeps rows summing to one.
struct TangentDirection {
  Matrix u;
};

/// Markov chain induced by a policy, plus the selection operator.
struct InducedChain {
  Matrix p_pi;      ///< |S| x |S|, p_pi = sum_a diag(pi(a|.)) kernel[a]
  Vector r_pi;      ///< |S|, r_pi(s) = sum_a pi(a|s) r(s, a)
  Matrix theta_pi;  ///< |S| x |S||A|, theta_pi(s, s*|A|+a) = pi(a|s)
};

/// One invariant violation found by validate_mdp, located at (s, a).
/// a is -1 for per-state problems that are not tied to an action.
struct MdpViolation {
  int s = -1;
  int a = -1;
  std::string message;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Checks stochasticity of every kernel row (within kProbTol), entry
/// ranges, reward bounds, and dimension consistency.  Returns one entry
/// per violation with its coordinates; the MDP is never repaired or
/// renormalized here.  An empty result means the MDP is valid.
inline std::vector<MdpViolation> validate_mdp(const Mdp& m) {
  std::vector<MdpViolation> out;
  if (m.n_states <= 0 || m.n_actions <= 0) {
    out.push_back({-1, -1, "n_states and n_actions must be positive"});
    return out;
  }
  if (m.reward_bound <= 0.0)
    out.push_back({-1, -1, "reward_bound must be positive, got " +
                               detail::fmt(m.reward_bound)});
  if (static_cast<int>(m.kernel.size()) != m.n_actions)
    out.push_back({-1, -1, "kernel holds " + std::to_string(m.kernel.size()) +
                               " action matrices, expected " +
                               std::to_string(m.n_actions)});
  if (m.reward.rows() != m.n_states || m.reward.cols() != m.n_actions)
    out.push_back({-1, -1, "reward table is " + std::to_string(m.reward.rows()) +
                               "x" + std::to_string(m.reward.cols()) +
                               ", expected " + std::to_string(m.n_states) + "x" +
                               std::to_string(m.n_actions)});
  if (!out.empty()) return out;  // shapes wrong: entry checks would misindex

  for (int a = 0; a < m.n_actions; ++a) {
    const Matrix& pa = m.kernel[a];
    if (pa.rows() != m.n_states || pa.cols() != m.n_states) {
      out.push_back({-1, a, "kernel[" + std::to_string(a) + "] is " +
                                std::to_string(pa.rows()) + "x" +
                                std::to_string(pa.cols())});
      continue;
    }
    for (int s = 0; s < m.n_states; ++s) {
      double row_sum = 0.0;
      for (int t = 0; t < m.n_states; ++t) {
        const double p = pa(s, t);
        if (p < -kProbTol || p > 1.0 + kProbTol)
          out.push_back({s, a, "kernel entry P(" + std::to_string(t) + "|" +
                                   std::to_string(s) + "," + std::to_string(a) +
                                   ") = " + detail::fmt(p) + " outside [0,1]"});
        row_sum += p;
      }
      if (std::abs(row_sum - 1.0) > kProbTol)
        out.push_back({s, a, "kernel row (s=" + std::to_string(s) + ", a=" +
                                 std::to_string(a) + ") sums to " +
                                 detail::fmt(row_sum)});
    }
  }
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a)
      if (std::abs(m.reward(s, a)) > m.reward_bound + kProbTol)
        out.push_back({s, a, "reward r(" + std::to_string(s) + "," +
                                 std::to_string(a) + ") = " +
                                 detail::fmt(m.reward(s, a)) +
                                 " exceeds bound " +
                                 detail::fmt(m.reward_bound)});
  return out;
}

/// Throws ValidationError with the first few violations if the MDP is
/// invalid; convenience wrapper used at API boundaries.
inline void require_valid(const Mdp& m) {
  const auto v = validate_mdp(m);
  if (v.empty()) return;
  std::string msg = "invalid MDP:";
  int shown = 0;
  for (const auto& x : v) {
    msg += "\n  " + x.message;
    if (++shown == 8) {
      msg += "\n  ... (" + std::to_string(v.size() - 8) + " more)";
      break;
    }
  }
  throw ValidationError(msg);
}

inline void require_policy_shape(const Mdp& m, const Policy& p,
                                 const char* who) {
  if (p.table.rows() != m.n_states || p.table.cols() != m.n_actions)
    throw std::invalid_argument(std::string(who) + ": policy table is " +
                                std::to_string(p.table.rows()) + "x" +
                                std::to_string(p.table.cols()) + ", expected " +
                                std::to_string(m.n_states) + "x" +
                                std::to_string(m.n_actions));
  for (int s = 0; s < m.n_states; ++s) {
    double row = p.table.row(s).sum();
    if (std::abs(row - 1.0) > kProbTol)
      throw std::invalid_argument(std::string(who) + ": policy row s=" +
                                  std::to_string(s) + " sums to " +
                                  detail::fmt(row));
    for (int a = 0; a < m.n_actions; ++a)
      if (p.table(s, a) < -kProbTol)
        throw std::invalid_argument(std::string(who) + ": policy entry pi(" +
                                    std::to_string(a) + "|" +
                                    std::to_string(s) + ") is negative");
  }
}

/// True when every policy entry is strictly positive (the policy lies in
/// the interior of the polytope, where the chain structure is maximal).
inline bool is_interior(const Policy& p) {
  return p.table.size() > 0 && p.table.minCoeff() > 0.0;
}

inline void require_interior(const Policy& p, const char* who) {
  if (!is_interior(p))
    throw std::invalid_argument(std::string(who) +
                                ": policy must have strictly positive entries");
}

/// Builds (P_pi, r_pi, Theta_pi).  Theta_pi's column block for state s is
/// the policy row pi(.|s) placed at columns [s|A|, (s+1)|A|).
inline InducedChain induce_chain(const Mdp& m, const Policy& p) {
  require_policy_shape(m, p, "induce_chain");
  InducedChain c;
  c.p_pi = Matrix::Zero(m.n_states, m.n_states);
  for (int a = 0; a < m.n_actions; ++a)
    c.p_pi += p.table.col(a).asDiagonal() * m.kernel[a];
  c.r_pi = (p.table.cwiseProduct(m.reward)).rowwise().sum();
  c.theta_pi = Matrix::Zero(m.n_states, m.n_states * m.n_actions);
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a)
      c.theta_pi(s, s * m.n_actions + a) = p.table(s, a);
  return c;
}

/// Kernel flattened to an |S||A| x |S| matrix with row index s*|A|+a,
/// so that theta_pi * flat_kernel(m) = p_pi.
inline Matrix flat_kernel(const Mdp& m) {
  Matrix f(m.n_states * m.n_actions, m.n_states);
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a)
      f.row(s * m.n_actions + a) = m.kernel[a].row(s);
  return f;
}

/// Reward flattened to an |S||A| vector matching flat_kernel's row order.
inline Vector flat_reward(const Mdp& m) {
  Vector f(m.n_states * m.n_actions);
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a)
      f(s * m.n_actions + a) = m.reward(s, a);
  return f;
}

inline void require_tangent(const TangentDirection& d, const char* who) {
  for (int s = 0; s < d.u.rows(); ++s)
    if (std::abs(d.u.row(s).sum()) > kProbTol)
      throw std::invalid_argument(std::string(who) + ": direction row s=" +
                                  std::to_string(s) + " sums to " +
                                  detail::fmt(d.u.row(s).sum()));
}

/// Returns pi + t u.  Rows keep summing to one by the tangent property;
/// the move is rejected (naming the coordinate) if any entry would leave
/// the open interval (0, 1), since that crosses the polytope boundary.
inline Policy perturb_policy(const Policy& p, const TangentDirection& d,
                             double t) {
  if (d.u.rows() != p.table.rows() || d.u.cols() != p.table.cols())
    throw std::invalid_argument("perturb_policy: direction shape mismatch");
  require_tangent(d, "perturb_policy");
  Policy out;
  out.table = p.table + t * d.u;
  out.floor = 0.0;
  for (int s = 0; s < out.table.rows(); ++s)
    for (int a = 0; a < out.table.cols(); ++a) {
      const double v = out.table(s, a);
      if (v <= 0.0 || v >= 1.0)
        throw std::invalid_argument(
            "perturb_policy: entry pi(" + std::to_string(a) + "|" +
            std::to_string(s) + ") = " + detail::fmt(v) +
            " leaves the open interval (0,1)");
    }
  return out;
}

inline Policy uniform_policy(const Mdp& m) {
  Policy p;
  p.table = Matrix::Constant(m.n_states, m.n_actions, 1.0 / m.n_actions);
  p.floor = 1.0 / m.n_actions;
  return p;
}

/// Deterministic policy clipped into the alpha-floored simplex: the chosen
/// action gets 1-(|A|-1)alpha, every other action gets alpha.
inline Policy clipped_deterministic(const Mdp& m, const std::vector<int>& act,
                                    double alpha) {
  Policy p;
  p.table = Matrix::Constant(m.n_states, m.n_actions, alpha);
  for (int s = 0; s < m.n_states; ++s)
    p.table(s, act[s]) = 1.0 - (m.n_actions - 1) * alpha;
  p.floor = alpha;
  return p;
}

}  // namespace multichain
