#pragma once

// Dense linear-algebra helpers shared by the chain and value routines.
// All solves go through a partial-pivoting LU factorization and fail
// loudly (naming the system being solved) when a pivot falls below the
// singularity tolerance; nothing in this library regularizes silently.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace multichain {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPivotTol = 1e-12;

struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& context)
      : std::runtime_error("singular linear system: " + context) {}
};

/// Solves A X = B by partial-pivoting LU, raising SingularSystemError
/// tagged with `context` if any pivot magnitude is below kPivotTol.
inline Matrix solve_checked(const Matrix& a, const Matrix& b,
                            const std::string& context) {
  Eigen::PartialPivLU<Matrix> lu(a);
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (a.rows() > 0 && pivots.minCoeff() < kPivotTol)
    throw SingularSystemError(context);
  return lu.solve(b);
}

/// Max absolute row sum (the operator infinity norm).
inline double inf_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// l1 distance between two rows viewed as measures.
inline double l1_dist(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().sum();
}

}  // namespace multichain
