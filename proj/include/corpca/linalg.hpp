#pragma once

#include <Eigen/Dense>

namespace corpca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition A = U diag(S) V^T.
///
/// U is n x r and V is c x r with orthonormal columns, S is nonincreasing and
/// nonnegative. r may be smaller than min(n, c) when trailing zero directions
/// have been dropped (see compact()).
struct ThinSvd {
  Matrix U;
  Vector S;
  Matrix V;

  Eigen::Index rank() const { return S.size(); }
  Eigen::Index rows() const { return U.rows(); }
  Eigen::Index cols() const { return V.rows(); }

  Matrix reconstruct() const;
  double nuclear_norm() const { return S.sum(); }
};

/// Full-accuracy thin SVD with r = min(n, c). Column signs are fixed so that
/// the largest-magnitude entry of every U column is nonnegative.
/// Throws InvalidInput on empty or non-finite input.
ThinSvd thin_svd(const Matrix& A);

/// SVD of [B v] from the SVD of B, computing only a (r+1) x (r+1) dense SVD.
///
/// If the component of v orthogonal to span(U) is below
/// 1e-10 * max(1, |v|), the new direction is dropped and the rank is kept.
ThinSvd inc_svd(const ThinSvd& prior, const Eigen::Ref<const Vector>& v);

/// Singular value thresholding U diag(max(S - tau, 0)) V^T.
Matrix svt(const Matrix& A, double tau);

/// Shrinks the singular values by tau and drops the directions that vanish.
ThinSvd shrink(const ThinSvd& svd, double tau);

/// Drops trailing singular directions with S_i <= rel_tol * S_0 (or S_i == 0).
ThinSvd compact(const ThinSvd& svd, double rel_tol = 1e-13);

/// max |Q^T Q - I|.
double orthonormality_error(const Matrix& Q);

/// Forces the largest-magnitude entry of every U column nonnegative,
/// flipping the matching V column.
void normalize_signs(ThinSvd& svd);

/// Largest singular value by power iteration on A A^T (or A^T A).
double spectral_norm(const Matrix& A, int max_iter = 1000, double rel_tol = 1e-12);

}  // namespace corpca
