#include "corpca/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "corpca/error.hpp"

namespace corpca {

Matrix ThinSvd::reconstruct() const { return U * S.asDiagonal() * V.transpose(); }

void normalize_signs(ThinSvd& svd) {
  for (Eigen::Index k = 0; k < svd.U.cols(); ++k) {
    Eigen::Index arg = 0;
    svd.U.col(k).cwiseAbs().maxCoeff(&arg);
    if (svd.U(arg, k) < 0.0) {
      svd.U.col(k) = -svd.U.col(k);
      svd.V.col(k) = -svd.V.col(k);
    }
  }
}

ThinSvd thin_svd(const Matrix& A) {
  if (A.rows() < 1 || A.cols() < 1) throw InvalidInput("thin_svd: empty matrix");
  if (!A.allFinite()) throw InvalidInput("thin_svd: non-finite entries");

  ThinSvd out;
  if (std::min(A.rows(), A.cols()) <= 32) {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = ThinSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  } else {
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = ThinSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  normalize_signs(out);
  return out;
}

ThinSvd inc_svd(const ThinSvd& prior, const Eigen::Ref<const Vector>& v) {
  const Eigen::Index n = prior.U.rows();
  const Eigen::Index r = prior.S.size();
  const Eigen::Index c = prior.V.rows();
  if (v.size() != n) throw InvalidInput("inc_svd: vector length does not match U rows");
  if (prior.U.cols() != r || prior.V.cols() != r) throw InvalidInput("inc_svd: inconsistent factor shapes");
  if (!v.allFinite()) throw InvalidInput("inc_svd: non-finite vector");

  // Two Gram-Schmidt passes keep delta orthogonal to U in floating point.
  Vector e = prior.U.transpose() * v;
  Vector delta = v - prior.U * e;
  const Vector e2 = prior.U.transpose() * delta;
  delta -= prior.U * e2;
  e += e2;
  const double delta_norm = delta.norm();
  const bool deficient = delta_norm <= 1e-10 * std::max(1.0, v.norm());

  Matrix core = Matrix::Zero(r + 1, r + 1);
  core.topLeftCorner(r, r) = prior.S.asDiagonal();
  core.topRightCorner(r, 1) = e;
  if (!deficient) core(r, r) = delta_norm;

  Eigen::JacobiSVD<Matrix> small(core, Eigen::ComputeFullU | Eigen::ComputeFullV);

  Matrix basis(n, r + 1);
  basis.leftCols(r) = prior.U;
  if (deficient)
    basis.col(r).setZero();
  else
    basis.col(r) = delta / delta_norm;

  Matrix right = Matrix::Zero(c + 1, r + 1);
  right.topLeftCorner(c, r) = prior.V;
  right(c, r) = 1.0;

  const Eigen::Index keep = deficient ? r : r + 1;
  ThinSvd out;
  out.U = basis * small.matrixU().leftCols(keep);
  out.S = small.singularValues().head(keep);
  out.V = right * small.matrixV().leftCols(keep);
  normalize_signs(out);
  return out;
}

ThinSvd shrink(const ThinSvd& svd, double tau) {
  if (!(tau >= 0.0)) throw InvalidInput("shrink: negative threshold");
  Eigen::Index keep = 0;
  while (keep < svd.S.size() && svd.S(keep) > tau) ++keep;
  ThinSvd out;
  out.U = svd.U.leftCols(keep);
  out.S = (svd.S.head(keep).array() - tau).matrix();
  out.V = svd.V.leftCols(keep);
  return out;
}

ThinSvd compact(const ThinSvd& svd, double rel_tol) {
  Eigen::Index keep = 0;
  const double floor = svd.S.size() > 0 ? rel_tol * svd.S(0) : 0.0;
  while (keep < svd.S.size() && svd.S(keep) > floor && svd.S(keep) > 0.0) ++keep;
  return ThinSvd{svd.U.leftCols(keep), svd.S.head(keep), svd.V.leftCols(keep)};
}

Matrix svt(const Matrix& A, double tau) {
  if (!(tau >= 0.0)) throw InvalidInput("svt: negative threshold");
  return shrink(thin_svd(A), tau).reconstruct();
}

double orthonormality_error(const Matrix& Q) {
  if (Q.cols() == 0) return 0.0;
  return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& A, int max_iter, double rel_tol) {
  if (A.size() == 0) return 0.0;
  const bool wide = A.rows() <= A.cols();
  const Eigen::Index k = wide ? A.rows() : A.cols();
  // Deterministic, generic start vector.
  Vector x(k);
  for (Eigen::Index i = 0; i < k; ++i) x(i) = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
  x.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = wide ? Vector(A * (A.transpose() * x)) : Vector(A.transpose() * (A * x));
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    x = y / next;
    const bool done = std::abs(next - sigma2) <= rel_tol * next;
    sigma2 = next;
    if (done) break;
  }
  return std::sqrt(sigma2);
}

}  // namespace corpca
