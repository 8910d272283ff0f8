#pragma once

// Chain-structure analysis for finite Markov chains and MDPs.
//
// For interior (strictly positive) policies every induced chain shares one
// support graph: the union over actions of the one-step transition graph.
// Its closed strongly connected components are the recurrent classes
// R_1..R_m, everything else is transient, and each class is closed under
// every individual action.  Reordering states as (R_1, .., R_m, T) puts
// the chain in canonical block form, from which the Cesaro limit P_star,
// the recurrent and transient visitation measures, and the mixing-type
// constants (target time, transient half-life, cover time) are computed
// exactly by linear solves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "multichain/linalg.hpp"
#include "multichain/mdp.hpp"
#include "multichain/rng.hpp"

namespace multichain {

/// Partition of states into recurrent classes and a transient set.
/// Classes are ordered by smallest member; label(s) gives the class index
/// of s, or -1 when s is transient.
struct Classification {
  std::vector<std::vector<int>> recurrent_classes;
  std::vector<int> transient;
  std::vector<int> label;

  int num_classes() const { return static_cast<int>(recurrent_classes.size()); }
  bool is_recurrent(int s) const { return label[s] >= 0; }

  bool same_structure(const Classification& o) const {
    return recurrent_classes == o.recurrent_classes && transient == o.transient;
  }
};

/// Canonical block decomposition of a chain under a classification.
/// Blocks are indexed by the classification's class order; states inside
/// a block keep their classification-order (ascending) arrangement.
struct CanonicalForm {
  std::vector<Matrix> r_blocks;    ///< per class: within-class transitions
  std::vector<Matrix> s_blocks;    ///< per class: |T| x |R_i|, transient -> class
  Matrix t_block;                  ///< |T| x |T| transient -> transient
  std::vector<Vector> stationary;  ///< per class: stationary distribution g_i
  std::vector<int> perm;           ///< canonical position -> original state
};

/// Visitation measures of a policy from an initial distribution mu:
/// d is the recurrent (Cesaro) occupancy mu^T P_star, delta the expected
/// transient visit counts mu^T (I - T_bar)^{-1}, and rho splices them
/// (d on recurrent states, delta on transient states).
struct VisitationBundle {
  Vector d;
  Vector delta;
  Vector rho;
};

/// Mixing-type constants of an induced chain.  t_tar is the stationary
/// expected hitting time of a g-random target (per class and max), t_half
/// the first power at which the transient block's row-sum norm halves
/// (0 when there are no transient states), t_cov the worst-start expected
/// cover time (per class and max).  Cover times for classes larger than
/// kCovExactLimit states are Monte-Carlo estimates with a standard error.
struct ChainConstants {
  std::vector<double> t_tar_class;
  double t_tar = 0.0;
  double t_half = 0.0;
  std::vector<double> t_cov_class;
  double t_cov = 0.0;
  bool cov_exact = true;
  double cov_std_error = 0.0;
};

inline constexpr int kCovExactLimit = 12;

namespace detail {

/// Boolean reachability closure (paths of length >= 0) by Warshall.
inline std::vector<std::vector<bool>> reach_closure(
    const std::vector<std::vector<bool>>& edge) {
  const int n = static_cast<int>(edge.size());
  auto reach = edge;
  for (int i = 0; i < n; ++i) reach[i][i] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (int j = 0; j < n; ++j)
        if (reach[k][j]) reach[i][j] = true;
    }
  return reach;
}

/// Classifies from an explicit support graph: recurrent classes are the
/// closed strongly connected components.
inline Classification classify_graph(const std::vector<std::vector<bool>>& edge) {
  const int n = static_cast<int>(edge.size());
  const auto reach = reach_closure(edge);
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    for (int t = s; t < n; ++t)
      if (comp[t] < 0 && reach[s][t] && reach[t][s]) {
        comp[t] = id;
        comps[id].push_back(t);
      }
  }
  Classification c;
  c.label.assign(n, -1);
  for (const auto& members : comps) {
    bool closed = true;
    for (int s : members) {
      for (int t = 0; t < n && closed; ++t)
        if (edge[s][t] && comp[t] != comp[s]) closed = false;
      if (!closed) break;
    }
    if (closed) c.recurrent_classes.push_back(members);
  }
  // components were discovered in order of smallest member, so the class
  // list is already sorted by smallest member; members are ascending.
  for (int i = 0; i < c.num_classes(); ++i)
    for (int s : c.recurrent_classes[i]) c.label[s] = i;
  for (int s = 0; s < n; ++s)
    if (c.label[s] < 0) c.transient.push_back(s);
  return c;
}

}  // namespace detail

/// Classifies a single Markov chain by the support of its kernel.
inline Classification classify_chain(const Matrix& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      if (p(s, t) > 0.0) edge[s][t] = true;
  return detail::classify_graph(edge);
}

/// Classifies the MDP's uniform-support graph: edge s -> s' when some
/// action moves s to s' with positive probability.  This is the common
/// chain structure of every strictly positive policy.
inline Classification classify(const Mdp& m) {
  std::vector<std::vector<bool>> edge(m.n_states,
                                      std::vector<bool>(m.n_states, false));
  for (int a = 0; a < m.n_actions; ++a)
    for (int s = 0; s < m.n_states; ++s)
      for (int t = 0; t < m.n_states; ++t)
        if (m.kernel[a](s, t) > 0.0) edge[s][t] = true;
  return detail::classify_graph(edge);
}

namespace detail {

/// Stationary distribution of an irreducible stochastic block, via the
/// standard trick of replacing one balance equation with normalization.
inline Vector stationary_of_block(const Matrix& r, const std::string& context) {
  const int n = static_cast<int>(r.rows());
  Matrix a = r.transpose() - Matrix::Identity(n, n);
  a.row(0) = Eigen::RowVectorXd::Ones(n);
  Vector b = Vector::Zero(n);
  b(0) = 1.0;
  Vector g = solve_checked(a, b, context);
  if (g.minCoeff() <= 0.0)
    throw std::invalid_argument(context +
                                ": nonpositive stationary mass; the block is "
                                "not an irreducible recurrent class");
  return g;
}

}  // namespace detail

/// Decomposes a chain into canonical blocks under a classification that
/// must describe this chain.  Closedness of each declared class is checked
/// (row mass escaping a class means the classification is stale).
inline CanonicalForm canonical_decompose_chain(const Matrix& p,
                                               const Classification& c) {
  CanonicalForm f;
  const auto& tr = c.transient;
  const int nt = static_cast<int>(tr.size());
  for (int i = 0; i < c.num_classes(); ++i) {
    const auto& cls = c.recurrent_classes[i];
    const int ni = static_cast<int>(cls.size());
    Matrix r(ni, ni);
    for (int x = 0; x < ni; ++x) {
      for (int y = 0; y < ni; ++y) r(x, y) = p(cls[x], cls[y]);
      const double inside = r.row(x).sum();
      if (std::abs(inside - 1.0) > 1e-9)
        throw std::invalid_argument(
            "canonical_decompose: class " + std::to_string(i) +
            " is not closed at state " + std::to_string(cls[x]) +
            " (stale classification for this chain)");
    }
    f.r_blocks.push_back(r);
    f.stationary.push_back(detail::stationary_of_block(
        r, "stationary distribution of class " + std::to_string(i)));
    Matrix sblk(nt, ni);
    for (int x = 0; x < nt; ++x)
      for (int y = 0; y < ni; ++y) sblk(x, y) = p(tr[x], cls[y]);
    f.s_blocks.push_back(sblk);
  }
  f.t_block.resize(nt, nt);
  for (int x = 0; x < nt; ++x)
    for (int y = 0; y < nt; ++y) f.t_block(x, y) = p(tr[x], tr[y]);
  for (const auto& cls : c.recurrent_classes)
    f.perm.insert(f.perm.end(), cls.begin(), cls.end());
  f.perm.insert(f.perm.end(), tr.begin(), tr.end());
  return f;
}

/// MDP-level wrapper; requires a strictly positive policy so that the
/// MDP-level classification is the chain's classification.
inline CanonicalForm canonical_decompose(const Mdp& m, const Policy& p,
                                         const Classification& c) {
  require_policy_shape(m, p, "canonical_decompose");
  require_interior(p, "canonical_decompose");
  return canonical_decompose_chain(induce_chain(m, p).p_pi, c);
}

/// Cesaro limit P_star assembled from canonical blocks, in the original
/// state indexing.  Recurrent rows repeat their class's stationary
/// distribution; transient rows mix the stationary distributions with the
/// absorption probabilities (I - T)^{-1} S_i 1; transient columns are zero.
inline Matrix cesaro_limit_chain(const CanonicalForm& f,
                                 const Classification& c, int n) {
  Matrix p_star = Matrix::Zero(n, n);
  const auto& tr = c.transient;
  const int nt = static_cast<int>(tr.size());
  for (int i = 0; i < c.num_classes(); ++i) {
    const auto& cls = c.recurrent_classes[i];
    const Vector& g = f.stationary[i];
    for (int x = 0; x < static_cast<int>(cls.size()); ++x)
      for (int y = 0; y < static_cast<int>(cls.size()); ++y)
        p_star(cls[x], cls[y]) = g(y);
    if (nt > 0) {
      const Matrix absorb = solve_checked(
          Matrix::Identity(nt, nt) - f.t_block, f.s_blocks[i],
          "transient fundamental system (I - T) for class " +
              std::to_string(i));
      const Vector into_class = absorb.rowwise().sum();
      for (int x = 0; x < nt; ++x)
        for (int y = 0; y < static_cast<int>(cls.size()); ++y)
          p_star(tr[x], cls[y]) = into_class(x) * g(y);
    }
  }
  return p_star;
}

inline Matrix cesaro_limit(const Mdp& m, const Policy& p,
                           const Classification& c) {
  return cesaro_limit_chain(canonical_decompose(m, p, c), c, m.n_states);
}

namespace detail {

inline void require_distribution(const Vector& mu, int n, const char* who) {
  if (mu.size() != n)
    throw std::invalid_argument(std::string(who) + ": mu has length " +
                                std::to_string(mu.size()) + ", expected " +
                                std::to_string(n));
  if (mu.minCoeff() < -kProbTol)
    throw std::invalid_argument(std::string(who) + ": mu has a negative entry");
  if (std::abs(mu.sum() - 1.0) > 1e-10)
    throw std::invalid_argument(std::string(who) + ": mu sums to " +
                                fmt(mu.sum()));
}

/// Transient part of the chain embedded at full size: rows and columns
/// outside T are zero.
inline Matrix embedded_transient(const Matrix& p, const Classification& c) {
  const int n = static_cast<int>(p.rows());
  Matrix tbar = Matrix::Zero(n, n);
  for (int x : c.transient)
    for (int y : c.transient) tbar(x, y) = p(x, y);
  return tbar;
}

}  // namespace detail

inline VisitationBundle visitation_chain(const Matrix& p,
                                         const Classification& c,
                                         const Vector& mu) {
  const int n = static_cast<int>(p.rows());
  detail::require_distribution(mu, n, "visitation");
  const CanonicalForm f = canonical_decompose_chain(p, c);
  VisitationBundle v;
  v.d = cesaro_limit_chain(f, c, n).transpose() * mu;
  const Matrix tbar = detail::embedded_transient(p, c);
  v.delta = solve_checked((Matrix::Identity(n, n) - tbar).transpose(), mu,
                          "transient visitation system (I - T_bar)^T");
  v.rho = Vector::Zero(n);
  for (int s = 0; s < n; ++s) v.rho(s) = c.is_recurrent(s) ? v.d(s) : v.delta(s);
  return v;
}

/// Recurrent measure d = mu^T P_star, transient measure
/// delta = mu^T (I - T_bar)^{-1}, and their splice rho.
inline VisitationBundle visitation(const Mdp& m, const Policy& p,
                                   const Classification& c, const Vector& mu) {
  require_policy_shape(m, p, "visitation");
  require_interior(p, "visitation");
  return visitation_chain(induce_chain(m, p).p_pi, c, mu);
}

namespace detail {

/// Expected hitting times H(s, j) = E[first visit of j | start s] inside an
/// irreducible block, one linear solve per target (delete the target's row
/// and column, solve (I - R_minor) h = 1).
inline Matrix hitting_times(const Matrix& r, const std::string& context) {
  const int n = static_cast<int>(r.rows());
  Matrix h = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (n == 1) break;
    Matrix minor(n - 1, n - 1);
    std::vector<int> keep;
    for (int x = 0; x < n; ++x)
      if (x != j) keep.push_back(x);
    for (int x = 0; x < n - 1; ++x)
      for (int y = 0; y < n - 1; ++y) minor(x, y) = r(keep[x], keep[y]);
    const Vector sol =
        solve_checked(Matrix::Identity(n - 1, n - 1) - minor,
                      Vector::Ones(n - 1), context + " (hitting times)");
    for (int x = 0; x < n - 1; ++x) h(keep[x], j) = sol(x);
  }
  return h;
}

/// Exact expected cover time of an irreducible block from each start, by
/// dynamic programming over visited subsets (decreasing cardinality).
/// Cover time counts positions: a single-state class is covered at t = 1.
inline Vector cover_times_exact(const Matrix& r, const std::string& context) {
  const int n = static_cast<int>(r.rows());
  const std::uint32_t full = (1u << n) - 1u;
  // steps[mask] holds E[transitions until visited set = full | current s,
  // visited = mask] for each s in mask, packed by ascending s.
  std::vector<std::vector<double>> steps(1u << n);
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask <= full; ++mask) masks.push_back(mask);
  std::sort(masks.begin(), masks.end(),
            [](std::uint32_t a, std::uint32_t b) {
              const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
              return pa != pb ? pa > pb : a < b;
            });
  for (std::uint32_t mask : masks) {
    std::vector<int> members;
    for (int s = 0; s < n; ++s)
      if (mask & (1u << s)) members.push_back(s);
    const int k = static_cast<int>(members.size());
    if (mask == full) {
      steps[mask].assign(k, 0.0);
      continue;
    }
    Matrix a = Matrix::Identity(k, k);
    Vector b = Vector::Ones(k);
    for (int x = 0; x < k; ++x)
      for (int u = 0; u < n; ++u) {
        const double p = r(members[x], u);
        if (p == 0.0) continue;
        if (mask & (1u << u)) {
          int pos = 0;
          while (members[pos] != u) ++pos;
          a(x, pos) -= p;
        } else {
          const std::uint32_t grown = mask | (1u << u);
          int pos = 0;
          for (int w = 0; w < u; ++w)
            if (grown & (1u << w)) ++pos;
          b(x) += p * steps[grown][pos];
        }
      }
    const Vector sol = solve_checked(a, b, context + " (cover times)");
    steps[mask].assign(sol.data(), sol.data() + k);
  }
  Vector cover(n);
  for (int s = 0; s < n; ++s) cover(s) = 1.0 + steps[1u << s][0];
  return cover;
}

/// Monte-Carlo cover time: episodes are split evenly across start states,
/// the worst start's mean is reported with its standard error.
struct McCover {
  double value = 0.0;
  double std_error = 0.0;
};

inline McCover cover_times_mc(const Matrix& r, int class_index,
                              long long budget, std::uint64_t seed) {
  const int n = static_cast<int>(r.rows());
  const long long per_start = std::max<long long>(1, budget / n);
  McCover best;
  std::vector<double> row(n);
  for (int start = 0; start < n; ++start) {
    double sum = 0.0, sum_sq = 0.0;
    for (long long ep = 0; ep < per_start; ++ep) {
      KeyedRng rng{seed, 0xC0FEu, static_cast<std::uint64_t>(class_index),
                   static_cast<std::uint64_t>(start),
                   static_cast<std::uint64_t>(ep)};
      std::uint32_t visited = 1u << start;
      const std::uint32_t full = (1u << n) - 1u;
      int s = start;
      long long t = 1;
      while (visited != full) {
        for (int y = 0; y < n; ++y) row[y] = r(s, y);
        s = sample_categorical(row.data(), n, rng.next_u01());
        visited |= 1u << s;
        ++t;
      }
      sum += static_cast<double>(t);
      sum_sq += static_cast<double>(t) * static_cast<double>(t);
    }
    const double mean = sum / per_start;
    const double var =
        std::max(0.0, sum_sq / per_start - mean * mean) / per_start;
    if (mean > best.value) best = {mean, std::sqrt(var)};
  }
  return best;
}

}  // namespace detail

inline ChainConstants chain_constants_chain(const Matrix& p,
                                            const Classification& c,
                                            long long mc_budget,
                                            std::uint64_t seed) {
  const CanonicalForm f = canonical_decompose_chain(p, c);
  ChainConstants k;
  for (int i = 0; i < c.num_classes(); ++i) {
    const Matrix& r = f.r_blocks[i];
    const Matrix h = detail::hitting_times(
        r, "target time of class " + std::to_string(i));
    // random-target identity: sum_j g(j) H(s, j) does not depend on s,
    // so row 0 suffices.
    const double t_tar = f.stationary[i].dot(h.row(0).transpose());
    k.t_tar_class.push_back(t_tar);
    if (static_cast<int>(r.rows()) <= kCovExactLimit) {
      const Vector cov = detail::cover_times_exact(
          r, "cover time of class " + std::to_string(i));
      k.t_cov_class.push_back(cov.maxCoeff());
    } else {
      if (mc_budget <= 0)
        throw std::invalid_argument(
            "chain_constants: class " + std::to_string(i) + " has " +
            std::to_string(r.rows()) +
            " states; exact cover time needs <= " +
            std::to_string(kCovExactLimit) +
            " states, pass a positive mc_budget");
      const auto mc = detail::cover_times_mc(r, i, mc_budget, seed);
      k.t_cov_class.push_back(mc.value);
      k.cov_exact = false;
      k.cov_std_error = std::max(k.cov_std_error, mc.std_error);
    }
  }
  k.t_tar = *std::max_element(k.t_tar_class.begin(), k.t_tar_class.end());
  k.t_cov = *std::max_element(k.t_cov_class.begin(), k.t_cov_class.end());
  const int nt = static_cast<int>(c.transient.size());
  if (nt > 0) {
    Matrix power = f.t_block;
    long long t = 1;
    while (inf_norm(power) > 0.5) {
      power = power * f.t_block;
      if (++t > 1000000)
        throw std::runtime_error(
            "chain_constants: transient half-life exceeds 1e6 steps");
    }
    k.t_half = static_cast<double>(t);
  }
  return k;
}

/// Target time, transient half-life, and cover time of the induced chain.
/// Classes above kCovExactLimit states use Monte Carlo with mc_budget
/// episodes split across starts (seeded deterministically).
inline ChainConstants chain_constants(const Mdp& m, const Policy& p,
                                      const Classification& c,
                                      long long mc_budget = 0,
                                      std::uint64_t seed = 0) {
  require_policy_shape(m, p, "chain_constants");
  require_interior(p, "chain_constants");
  return chain_constants_chain(induce_chain(m, p).p_pi, c, mc_budget, seed);
}

}  // namespace multichain
