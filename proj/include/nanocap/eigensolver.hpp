// Dense real-symmetric eigendecomposition.

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace nanocap {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column k belongs to values[k]
};

class EigensolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full eigendecomposition of a symmetric matrix; only the lower triangle is read.
inline SymmetricEigen eigh(const Eigen::MatrixXd& matrix) {
  if (matrix.cols() != matrix.rows()) throw std::invalid_argument("eigh: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw EigensolverError("symmetric eigensolver did not converge (n = " + std::to_string(matrix.rows()) + ")");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& matrix) {
  if (matrix.cols() != matrix.rows()) throw std::invalid_argument("eigvalsh: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw EigensolverError("symmetric eigensolver did not converge (n = " + std::to_string(matrix.rows()) + ")");
  return solver.eigenvalues();
}

}  // namespace nanocap
