#pragma once

// Bregman machinery on the alpha-floored probability simplex
//   M_alpha = { p : p_i >= alpha, sum_i p_i = 1 },   0 <= alpha <= 1/d.
//
// Two divergences are supported: squared Euclidean distance and KL.  Both
// projections onto M_alpha are exact finite procedures: the Euclidean one
// is the classic sort-and-threshold water-filling after shifting out the
// floor, the KL one a median-pivot search for the set of coordinates that
// stick to the floor, with the surviving coordinates rescaled by a common
// factor.  Every iterate of mirror ascent in this library passes through
// one of these projections, so both are tested against a KKT oracle.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "multichain/linalg.hpp"

namespace multichain {

enum class DivergenceKind { euclidean, kl };

/// Point of the alpha-floored simplex together with its floor.
struct FlooredSimplexPoint {
  Vector p;
  double alpha = 0.0;
};

inline constexpr double kFloorFeasTol = 1e-12;

/// Checks membership of a point in M_alpha within kFloorFeasTol.
inline bool in_floored_simplex(const Vector& p, double alpha,
                               double tol = kFloorFeasTol) {
  if (p.size() == 0) return false;
  if (std::abs(p.sum() - 1.0) > tol) return false;
  return p.minCoeff() >= alpha - tol;
}

namespace detail {

inline void require_floor(double alpha, int d, const char* who) {
  if (d <= 0) throw std::invalid_argument(std::string(who) + ": empty vector");
  if (alpha < 0.0)
    throw std::invalid_argument(std::string(who) + ": alpha must be >= 0");
  if (alpha * d > 1.0 + kFloorFeasTol)
    throw std::invalid_argument(std::string(who) + ": alpha = " +
                                std::to_string(alpha) + " infeasible for d = " +
                                std::to_string(d) + " (needs alpha <= 1/d)");
}

}  // namespace detail

/// D(p, p2): squared Euclidean 0.5 ||p - p2||^2 or KL sum p log(p/p2) with
/// the 0 log 0 = 0 convention.  KL rejects a zero in p2 wherever p has
/// mass, since the divergence is infinite there.
inline double divergence(DivergenceKind kind, const Vector& p,
                         const Vector& p2) {
  if (p.size() != p2.size())
    throw std::invalid_argument("divergence: length mismatch");
  if (kind == DivergenceKind::euclidean) return 0.5 * (p - p2).squaredNorm();
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) == 0.0) continue;
    if (p2(i) <= 0.0)
      throw std::invalid_argument(
          "divergence: kl undefined, p2(" + std::to_string(i) +
          ") = 0 where p has mass");
    acc += p(i) * std::log(p(i) / p2(i));
  }
  return acc;
}

/// Euclidean projection of q onto M_alpha.  Shifting y = p - alpha reduces
/// to projecting onto the simplex of mass 1 - d alpha, solved by the
/// sorted threshold rule; ties in the sort are broken by index so the
/// procedure is deterministic.  The above-floor masses are rescaled to sum
/// to the budget exactly, so the output row sum holds to final-rounding
/// precision even when the entries of q are large (big mirror steps feed
/// eta * g straight in here).
inline FlooredSimplexPoint euclid_project_floor(const Vector& q,
                                                double alpha) {
  const int d = static_cast<int>(q.size());
  detail::require_floor(alpha, d, "euclid_project_floor");
  if (alpha * d >= 1.0 - kFloorFeasTol)
    return {Vector::Constant(d, alpha), alpha};  // singleton feasible set

  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return q(a) != q(b) ? q(a) > q(b) : a < b;
  });
  const double budget = 1.0 - d * alpha;
  double prefix = 0.0, lambda = 0.0;
  for (int j = 1; j <= d; ++j) {
    prefix += q(order[j - 1]);
    const double cand = (budget - prefix) / j;
    // lambda keeps the threshold from the largest j whose pivot survives
    if (q(order[j - 1]) + cand > 0.0) lambda = cand;
  }
  Vector v(d);
  double vsum = 0.0;
  for (int i = 0; i < d; ++i) {
    v(i) = std::max(q(i) + lambda, 0.0);
    vsum += v(i);
  }
  FlooredSimplexPoint out{Vector(d), alpha};
  if (vsum <= 0.0) {
    out.p.setConstant(alpha + budget / d);
    return out;
  }
  const double scale = budget / vsum;  // 1 up to the cancellation noise in v
  for (int i = 0; i < d; ++i) out.p(i) = alpha + v(i) * scale;
  return out;
}

/// KL projection of a positive weight vector w (summing to one) onto
/// M_alpha: the projection is p_i = max(alpha, m0 w_i) where m0 rescales
/// the unclipped coordinates so total mass is one.  The clip set is found
/// by a median-pivot search that halves the undecided set each round, so
/// the loop runs at most ceil(log2 d) + 2 times.
inline FlooredSimplexPoint kl_project_floor(const Vector& w, double alpha) {
  const int d = static_cast<int>(w.size());
  detail::require_floor(alpha, d, "kl_project_floor");
  for (int i = 0; i < d; ++i)
    if (w(i) <= 0.0)
      throw std::invalid_argument("kl_project_floor: w(" + std::to_string(i) +
                                  ") is not strictly positive");
  if (std::abs(w.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("kl_project_floor: w sums to " +
                                std::to_string(w.sum()) + ", expected 1");
  if (alpha * d >= 1.0 - kFloorFeasTol)
    return {Vector::Constant(d, alpha), alpha};

  std::vector<int> undecided(d);
  for (int i = 0; i < d; ++i) undecided[i] = i;
  std::vector<bool> clipped(d, false);
  double clip_count = 0.0, clip_mass = 0.0;
  const int max_rounds =
      static_cast<int>(std::ceil(std::log2(std::max(2, d)))) + 2;
  int rounds = 0;
  while (!undecided.empty()) {
    if (++rounds > max_rounds)
      throw std::logic_error(
          "kl_project_floor: median search exceeded its round bound");
    std::vector<double> vals(undecided.size());
    for (size_t i = 0; i < undecided.size(); ++i) vals[i] = w(undecided[i]);
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    const double omega = vals[vals.size() / 2];
    std::vector<int> low, high;
    double low_count = 0.0, low_mass = 0.0, mid_count = 0.0, mid_mass = 0.0;
    for (int i : undecided) {
      if (w(i) < omega) {
        low.push_back(i);
        low_count += 1.0;
        low_mass += w(i);
      } else if (w(i) > omega) {
        high.push_back(i);
      } else {
        mid_count += 1.0;
        mid_mass += w(i);
      }
    }
    // scale factor under the hypothesis that exactly C and low clip
    const double m0 = (1.0 - (clip_count + low_count) * alpha) /
                      (1.0 - (clip_mass + low_mass));
    if (omega * m0 < alpha) {
      // the median itself would sink below the floor: low and mid clip
      for (int i : undecided)
        if (w(i) <= omega) clipped[i] = true;
      clip_count += low_count + mid_count;
      clip_mass += low_mass + mid_mass;
      undecided = std::move(high);
    } else {
      // the median survives, so only entries below it can still clip
      undecided = std::move(low);
    }
  }
  const double m0 = (1.0 - clip_count * alpha) / (1.0 - clip_mass);
  FlooredSimplexPoint out{Vector(d), alpha};
  for (int i = 0; i < d; ++i)
    out.p(i) = clipped[i] ? alpha : std::max(alpha, m0 * w(i));
  return out;
}

/// One mirror-ascent step on a single simplex row:
///   argmax_{p in M_alpha}  eta <g, p> - D(p, current)
/// which reduces to euclid_project_floor(current + eta g) for the
/// Euclidean divergence and to the KL projection of the exponentiated
/// reweighting current_i exp(eta g_i) / Z for KL.  The exponentials are
/// shifted by the row maximum so large steps saturate instead of
/// overflowing.
inline FlooredSimplexPoint mirror_step(const Vector& current,
                                       const Vector& g, double eta,
                                       DivergenceKind kind, double alpha) {
  if (current.size() != g.size())
    throw std::invalid_argument("mirror_step: length mismatch");
  if (eta < 0.0)
    throw std::invalid_argument("mirror_step: eta must be nonnegative");
  if (!in_floored_simplex(current, alpha))
    throw std::invalid_argument("mirror_step: current row is outside M_alpha");
  if (kind == DivergenceKind::euclidean)
    return euclid_project_floor(current + eta * g, alpha);
  for (int i = 0; i < current.size(); ++i)
    if (current(i) <= 0.0)
      throw std::invalid_argument(
          "mirror_step: kl step needs a strictly positive current row");
  const double shift = (eta * g).maxCoeff();
  // exponents are clamped at -700 so saturated coordinates underflow to a
  // strictly positive sliver instead of exact zero; they clip to the floor
  // in the projection either way, and the row maximum is always at 0
  Vector w =
      current.array() * (eta * g.array() - shift).max(-700.0).exp();
  const double z = w.sum();
  if (z <= 0.0 || !std::isfinite(z))
    throw std::runtime_error("mirror_step: degenerate reweighting");
  w /= z;
  return kl_project_floor(w, alpha);
}

}  // namespace multichain
