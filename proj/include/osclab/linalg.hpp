#pragma once

#include <Eigen/Dense>

#include <vector>

namespace osclab {

/// Small dense matrix, n <= 3, stack allocated.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

/// H:K = tr(H^T K).
inline double contract(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

inline Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Orthonormal basis of Sym(n) under the Frobenius product: e_ii, then
/// (e_ij + e_ji)/sqrt(2) for i < j. Size n(n+1)/2.
std::vector<Matrix> symmetric_basis(int n);

/// Ascending eigenvalues of a symmetric matrix.
Vector symmetric_eigenvalues(const Matrix& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

/// Rotation factor R of F = R U with U symmetric positive definite,
/// obtained from the eigen-decomposition of F^T F. When det F < 0 the
/// axis of the smallest singular value is flipped so R lies in SO(n):
/// the result is then the rotation closest to F in Frobenius norm.
/// Throws NumericalError if F is singular.
Matrix closest_rotation(const Matrix& f);

}  // namespace osclab
