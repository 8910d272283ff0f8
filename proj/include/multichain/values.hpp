#pragma once

// Average-reward value functions and the exact policy gradient.
//
// For a policy pi with induced chain (P, r) and Cesaro limit P_star, the
// gain and bias are
//     J = P_star r,        V = (I - P + P_star)^{-1} (I - P_star) r,
// giving the Bellman identities P J = J and r + P V = J + V together with
// the normalization P_star V = 0.  The state-action tables are
//     K(s,a) = P_a(s,.) J,    Q(s,a) = r(s,a) + P_a(s,.) V - K(s,a),
// and the advantage-like table used by mirror ascent selects Q on
// recurrent states and K on transient ones.  The gradient of the average
// reward from mu in the direct parameterization weights that table by the
// matching visitation measure: d on recurrent states, delta on transient.

#include <cmath>
#include <stdexcept>
#include <string>

#include "multichain/chain.hpp"
#include "multichain/linalg.hpp"
#include "multichain/mdp.hpp"

namespace multichain {

/// Exact value tables of one policy.  j and v are state vectors; k, q and
/// g are |S| x |A| tables with g(s,.) = q(s,.) on recurrent states and
/// k(s,.) on transient states.
struct ValueBundle {
  Vector j;
  Vector v;
  Matrix k;
  Matrix q;
  Matrix g;
};

/// Gradient of mu -> mu . J^pi in the direct parameterization, as an
/// |S| x |A| table over policy entries.  mu_full_support records whether
/// mu touched every state; with partial support the table is still the
/// gradient, but stationarity checks against it only see supported rows.
struct GradientTable {
  Matrix grad;
  bool mu_full_support = true;
};

/// Both sides of the gain difference identity, plus the split of the
/// right-hand side into its recurrent and transient sums.
struct PdlResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double recurrent_term = 0.0;
  double transient_term = 0.0;
};

namespace detail {

inline ValueBundle evaluate_parts(const Mdp& m, const Matrix& p_pi,
                                  const Vector& r_pi,
                                  const Classification& c) {
  const int n = m.n_states;
  const CanonicalForm f = canonical_decompose_chain(p_pi, c);
  const Matrix p_star = cesaro_limit_chain(f, c, n);
  ValueBundle b;
  b.j = p_star * r_pi;
  b.v = solve_checked(Matrix::Identity(n, n) - p_pi + p_star,
                      (Matrix::Identity(n, n) - p_star) * r_pi,
                      "bias system (I - P + P_star)");
  b.k.resize(n, m.n_actions);
  b.q.resize(n, m.n_actions);
  for (int a = 0; a < m.n_actions; ++a) {
    b.k.col(a) = m.kernel[a] * b.j;
    b.q.col(a) = m.reward.col(a) + m.kernel[a] * b.v - b.k.col(a);
  }
  b.g.resize(n, m.n_actions);
  for (int s = 0; s < n; ++s)
    b.g.row(s) = c.is_recurrent(s) ? b.q.row(s) : b.k.row(s);
  return b;
}

}  // namespace detail

/// Exact evaluation of a strictly positive policy under the shared
/// interior classification.
inline ValueBundle evaluate(const Mdp& m, const Policy& p,
                            const Classification& c) {
  require_policy_shape(m, p, "evaluate");
  require_interior(p, "evaluate");
  const InducedChain ch = induce_chain(m, p);
  return detail::evaluate_parts(m, ch.p_pi, ch.r_pi, c);
}

/// Exact evaluation of an arbitrary policy (boundary policies included)
/// against the classification of its own induced chain.  Used wherever a
/// deterministic policy must be valued, e.g. inside policy iteration.
inline ValueBundle evaluate_on_own_chain(const Mdp& m, const Policy& p) {
  require_policy_shape(m, p, "evaluate_on_own_chain");
  const InducedChain ch = induce_chain(m, p);
  return detail::evaluate_parts(m, ch.p_pi, ch.r_pi, classify_chain(ch.p_pi));
}

inline void require_full_support(const Vector& mu, const char* who) {
  for (int s = 0; s < mu.size(); ++s)
    if (mu(s) <= 0.0)
      throw std::invalid_argument(std::string(who) + ": mu(" +
                                  std::to_string(s) +
                                  ") is not strictly positive; a full-support "
                                  "initial distribution is required");
}

/// Gain difference identity between two strictly positive policies:
///   mu . (J^p - J^p2)  =  sum_{s recurrent} d^p(s) <(p - p2)(.|s), Q^p2(s,.)>
///                       + sum_{s transient} delta^p(s) <(p - p2)(.|s), K^p2(s,.)>
/// The first policy contributes its visitation measures, the second its
/// value tables.  Requires full-support mu.
inline PdlResult performance_difference(const Mdp& m, const Policy& p,
                                        const Policy& p2, const Vector& mu,
                                        const Classification& c) {
  detail::require_distribution(mu, m.n_states, "performance_difference");
  require_full_support(mu, "performance_difference");
  const ValueBundle b1 = evaluate(m, p, c);
  const ValueBundle b2 = evaluate(m, p2, c);
  const VisitationBundle vis = visitation(m, p, c, mu);
  PdlResult out;
  out.lhs = mu.dot(b1.j - b2.j);
  const Matrix diff = p.table - p2.table;
  for (int s = 0; s < m.n_states; ++s) {
    const double inner = diff.row(s).dot(c.is_recurrent(s) ? b2.q.row(s)
                                                           : b2.k.row(s));
    if (c.is_recurrent(s))
      out.recurrent_term += vis.d(s) * inner;
    else
      out.transient_term += vis.delta(s) * inner;
  }
  out.rhs = out.recurrent_term + out.transient_term;
  return out;
}

/// Exact gradient table: grad(s,a) = d(s) Q(s,a) on recurrent states and
/// delta(s) K(s,a) on transient states.  Rows with zero visitation vanish.
inline GradientTable policy_gradient(const Mdp& m, const Policy& p,
                                     const Vector& mu,
                                     const Classification& c) {
  detail::require_distribution(mu, m.n_states, "policy_gradient");
  const ValueBundle b = evaluate(m, p, c);
  const VisitationBundle vis = visitation(m, p, c, mu);
  GradientTable t;
  t.mu_full_support = mu.minCoeff() > 0.0;
  t.grad.resize(m.n_states, m.n_actions);
  for (int s = 0; s < m.n_states; ++s)
    t.grad.row(s) = c.is_recurrent(s) ? vis.d(s) * b.q.row(s)
                                      : vis.delta(s) * b.k.row(s);
  return t;
}

/// Central difference of mu . J along a tangent direction:
/// (J(p + h u) - J(p - h u)) / 2h.  Both endpoints must stay strictly
/// inside the polytope, so the classification c applies to them too.
inline double finite_diff_directional(const Mdp& m, const Policy& p,
                                      const Vector& mu,
                                      const TangentDirection& u,
                                      const Classification& c,
                                      double h = 1e-5) {
  if (h <= 0.0)
    throw std::invalid_argument("finite_diff_directional: h must be positive");
  const Policy hi = perturb_policy(p, u, h);
  const Policy lo = perturb_policy(p, u, -h);
  const double jhi = mu.dot(evaluate(m, hi, c).j);
  const double jlo = mu.dot(evaluate(m, lo, c).j);
  return (jhi - jlo) / (2.0 * h);
}

}  // namespace multichain
