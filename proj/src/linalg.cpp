#include "osclab/linalg.hpp"

#include "osclab/error.hpp"

#include <cmath>

namespace osclab {

std::vector<Matrix> symmetric_basis(int n) {
  std::vector<Matrix> basis;
  for (int i = 0; i < n; ++i) {
    Matrix e = Matrix::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = r;
      e(j, i) = r;
      basis.push_back(e);
    }
  return basis;
}

Vector symmetric_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& a) { return symmetric_eigenvalues(a)(0); }

Matrix closest_rotation(const Matrix& f) {
  const int n = static_cast<int>(f.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.transpose() * f);
  const Vector lambda = es.eigenvalues();
  const Matrix v = es.eigenvectors();
  if (!(lambda(0) > 1e-24 * std::max(lambda(n - 1), 1e-300))) throw NumericalError("matrix is singular, no polar factor");
  // columns u_i = F v_i / s_i; s_0 is the smallest singular value
  Matrix u(n, n);
  for (int i = 0; i < n; ++i) u.col(i) = f * v.col(i) / std::sqrt(lambda(i));
  if (f.determinant() < 0.0) u.col(0) = -u.col(0);
  return u * v.transpose();
}

}  // namespace osclab
