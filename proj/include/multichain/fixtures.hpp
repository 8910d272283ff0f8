#pragma once

// Fixture generators.  Each generator returns the MDP together with the
// chain structure it planted, so tests can check that classification
// recovers it.  All randomness is keyed by the seed (see rng.hpp).
//
// twochain            three states: 0 chooses between two absorbing states,
//                     action 0 leads to the rewarding one.
// random_multichain   planted recurrent classes closed under every action
//                     (strictly positive inside), transient states that
//                     leak into the classes under every action.
// weakly_comm         one communicating core closed under every action
//                     plus fringe states that always leak into the core.
// ergodic_ring        every action shifts around a ring and mixes with a
//                     uniform restart, so any policy is ergodic.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "multichain/chain.hpp"
#include "multichain/mdp.hpp"
#include "multichain/rng.hpp"

namespace multichain {

struct Fixture {
  std::string name;
  Mdp mdp;
  Classification planted;
};

inline Mdp make_twochain() {
  Mdp m;
  m.n_states = 3;
  m.n_actions = 2;
  m.reward_bound = 1.0;
  m.kernel.assign(2, Matrix::Zero(3, 3));
  m.kernel[0](0, 1) = 1.0;  // action 0 from the fork: to the rewarding state
  m.kernel[1](0, 2) = 1.0;  // action 1 from the fork: to the dry state
  for (int a = 0; a < 2; ++a) {
    m.kernel[a](1, 1) = 1.0;
    m.kernel[a](2, 2) = 1.0;
  }
  m.reward = Matrix::Zero(3, 2);
  m.reward.row(1).setConstant(1.0);
  return m;
}

inline Fixture twochain_fixture() {
  Fixture f;
  f.name = "twochain";
  f.mdp = make_twochain();
  f.planted.recurrent_classes = {{1}, {2}};
  f.planted.transient = {0};
  f.planted.label = {-1, 0, 1};
  return f;
}

namespace detail {

inline Vector random_positive_row(int d, KeyedRng& rng, double base = 0.1) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = base + rng.next_u01();
  return v / v.sum();
}

inline Matrix random_reward(int n_states, int n_actions, double bound,
                            KeyedRng& rng) {
  Matrix r(n_states, n_actions);
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a)
      r(s, a) = rng.next_in(-bound, bound);
  return r;
}

inline Classification planted_from_classes(
    int n, std::vector<std::vector<int>> classes) {
  for (auto& cls : classes) std::sort(cls.begin(), cls.end());
  std::sort(classes.begin(), classes.end());
  Classification c;
  c.recurrent_classes = std::move(classes);
  c.label.assign(n, -1);
  for (int i = 0; i < c.num_classes(); ++i)
    for (int s : c.recurrent_classes[i]) c.label[s] = i;
  for (int s = 0; s < n; ++s)
    if (c.label[s] < 0) c.transient.push_back(s);
  return c;
}

}  // namespace detail

struct RandomMultichainParams {
  std::vector<int> class_sizes = {2, 2};
  int n_transient = 2;
  int n_actions = 2;
  double reward_bound = 1.0;
};

/// Multichain MDP with the given planted structure under shuffled state
/// labels.  Within a class every action spreads positive mass over the
/// whole class; every transient state, under every action, leaks into at
/// least one class, so no subset of transient states is closed.
inline Fixture make_random_multichain(const RandomMultichainParams& p,
                                      std::uint64_t seed) {
  if (p.class_sizes.empty() || p.n_actions < 2)
    throw std::invalid_argument(
        "make_random_multichain: need classes and at least two actions");
  const int n_rec = std::accumulate(p.class_sizes.begin(), p.class_sizes.end(), 0);
  const int n = n_rec + p.n_transient;
  KeyedRng rng{seed, 0xF15Eu};
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(ids[i], ids[rng.next_below(i + 1)]);
  std::vector<std::vector<int>> classes;
  int offset = 0;
  for (int size : p.class_sizes) {
    classes.emplace_back(ids.begin() + offset, ids.begin() + offset + size);
    offset += size;
  }
  const std::vector<int> transient(ids.begin() + offset, ids.end());

  Fixture f;
  f.name = "random_multichain";
  f.mdp.n_states = n;
  f.mdp.n_actions = p.n_actions;
  f.mdp.reward_bound = p.reward_bound;
  f.mdp.kernel.assign(p.n_actions, Matrix::Zero(n, n));
  for (int a = 0; a < p.n_actions; ++a) {
    for (const auto& cls : classes) {
      const int k = static_cast<int>(cls.size());
      for (int x = 0; x < k; ++x) {
        const Vector row = detail::random_positive_row(k, rng);
        for (int y = 0; y < k; ++y) f.mdp.kernel[a](cls[x], cls[y]) = row(y);
      }
    }
    for (int t : transient) {
      Vector w = Vector::Zero(n);
      const auto& anchor_class = classes[rng.next_below(
          static_cast<int>(classes.size()))];
      w(anchor_class[rng.next_below(static_cast<int>(anchor_class.size()))]) =
          0.3 + rng.next_u01();
      for (int y : transient)
        if (rng.next_u01() < 0.5) w(y) += rng.next_u01();
      for (const auto& cls : classes)
        for (int y : cls)
          if (rng.next_u01() < 0.3) w(y) += rng.next_u01();
      const Vector row = w / w.sum();
      for (int y = 0; y < n; ++y) f.mdp.kernel[a](t, y) = row(y);
    }
  }
  f.mdp.reward = detail::random_reward(n, p.n_actions, p.reward_bound, rng);
  f.planted = detail::planted_from_classes(n, classes);
  return f;
}

/// Weakly communicating MDP: a single core class closed under every
/// action plus fringe states whose every action leaks into the core.
inline Fixture make_weakly_comm(int n_core, int n_fringe, int n_actions,
                                std::uint64_t seed, double reward_bound = 1.0) {
  if (n_core < 1 || n_fringe < 0 || n_actions < 2)
    throw std::invalid_argument("make_weakly_comm: bad shape");
  const int n = n_core + n_fringe;
  KeyedRng rng{seed, 0x17EAu};
  Fixture f;
  f.name = "weakly_comm";
  f.mdp.n_states = n;
  f.mdp.n_actions = n_actions;
  f.mdp.reward_bound = reward_bound;
  f.mdp.kernel.assign(n_actions, Matrix::Zero(n, n));
  for (int a = 0; a < n_actions; ++a) {
    for (int s = 0; s < n_core; ++s) {
      const Vector row = detail::random_positive_row(n_core, rng, 0.05);
      for (int y = 0; y < n_core; ++y) f.mdp.kernel[a](s, y) = row(y);
    }
    for (int s = n_core; s < n; ++s) {
      Vector w = Vector::Zero(n);
      for (int y = 0; y < n_core; ++y) w(y) = 0.05 + rng.next_u01();
      for (int y = n_core; y < n; ++y)
        if (rng.next_u01() < 0.5) w(y) += rng.next_u01();
      const Vector row = w / w.sum();
      for (int y = 0; y < n; ++y) f.mdp.kernel[a](s, y) = row(y);
    }
  }
  f.mdp.reward = detail::random_reward(n, n_actions, reward_bound, rng);
  std::vector<int> core(n_core);
  std::iota(core.begin(), core.end(), 0);
  f.planted = detail::planted_from_classes(n, {core});
  return f;
}

/// Ergodic ring: action a advances a+1 positions with probability
/// 1 - noise and restarts uniformly with probability noise.
inline Fixture make_ergodic_ring(int n, double noise, int n_actions,
                                 std::uint64_t seed,
                                 double reward_bound = 1.0) {
  if (n < 2 || n_actions < 2 || !(noise > 0.0) || !(noise < 1.0))
    throw std::invalid_argument("make_ergodic_ring: bad shape");
  KeyedRng rng{seed, 0x419Cu};
  Fixture f;
  f.name = "ergodic_ring";
  f.mdp.n_states = n;
  f.mdp.n_actions = n_actions;
  f.mdp.reward_bound = reward_bound;
  f.mdp.kernel.assign(n_actions,
                      Matrix::Constant(n, n, noise / n));
  for (int a = 0; a < n_actions; ++a)
    for (int s = 0; s < n; ++s)
      f.mdp.kernel[a](s, (s + a + 1) % n) += 1.0 - noise;
  f.mdp.reward = detail::random_reward(n, n_actions, reward_bound, rng);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  f.planted = detail::planted_from_classes(n, {all});
  return f;
}

/// Random interior policy (every entry strictly positive).
inline Policy random_interior_policy(const Mdp& m, KeyedRng& rng) {
  Policy p;
  p.table.resize(m.n_states, m.n_actions);
  for (int s = 0; s < m.n_states; ++s)
    p.table.row(s) =
        detail::random_positive_row(m.n_actions, rng, 0.05).transpose();
  return p;
}

/// Random full-support initial distribution.
inline Vector random_full_support_mu(int n, KeyedRng& rng) {
  return detail::random_positive_row(n, rng, 0.1);
}

/// Random tangent direction with unit infinity norm.
inline TangentDirection random_tangent(int n_states, int n_actions,
                                       KeyedRng& rng) {
  TangentDirection d;
  d.u.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      d.u(s, a) = rng.next_in(-1.0, 1.0);
      sum += d.u(s, a);
    }
    for (int a = 0; a < n_actions; ++a) d.u(s, a) -= sum / n_actions;
  }
  const double norm = d.u.cwiseAbs().maxCoeff();
  if (norm > 0.0) d.u /= norm;
  return d;
}

/// Pseudo-random multichain shapes for property sweeps: 1-3 classes of
/// 1-4 states, 0-4 transient states, 2-4 actions, at most 10 states.
inline Fixture random_multichain_sample(std::uint64_t seed) {
  KeyedRng rng{seed, 0x5A3Du};
  RandomMultichainParams p;
  p.class_sizes.clear();
  const int n_classes = 1 + rng.next_below(3);
  int total = 0;
  for (int i = 0; i < n_classes; ++i) {
    const int size = 1 + rng.next_below(3);
    p.class_sizes.push_back(size);
    total += size;
  }
  p.n_transient = rng.next_below(std::min(5, 11 - total));
  p.n_actions = 2 + rng.next_below(3);
  return make_random_multichain(p, splitmix64(seed));
}

/// The named fixtures shipped with the command-line tool and exercised by
/// the acceptance suite.
inline std::vector<Fixture> standard_fixtures(std::uint64_t seed = 7) {
  std::vector<Fixture> fs;
  fs.push_back(twochain_fixture());
  fs.push_back(make_random_multichain({{2, 2}, 2, 2, 1.0}, seed));
  fs.push_back(make_weakly_comm(4, 2, 2, seed + 1));
  fs.push_back(make_ergodic_ring(6, 0.2, 2, seed + 2));
  return fs;
}

}  // namespace multichain
