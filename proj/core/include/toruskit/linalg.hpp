#pragma once

// Thin wrappers over LAPACK for the dense factorizations that dominate the
// pipeline cost: tall least-squares solves and Hessenberg eigenvalues.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace toruskit::linalg {

struct LeastSquaresResult {
  Eigen::MatrixXd solution;   // N x nrhs
  Eigen::VectorXd r_diag;     // |diagonal| of the triangular factor
  double residual_norm = 0.0; // Frobenius norm of A*X - B
};

/// Solve min ||A X - B||_F for tall A (rows >= cols) by Householder QR.
/// Also reports the magnitudes of the triangular-factor diagonal so callers
/// can detect rank deficiency.
LeastSquaresResult least_squares(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct MinimumNormResult {
  Eigen::MatrixXd solution;  // N x nrhs
  Eigen::Index rank = 0;     // numerical rank at the given rcond
};

/// Minimum-norm least-squares solve by column-pivoted QR with rank
/// truncation: singular directions below rcond (relative) are dropped, so
/// numerically dependent columns share their coefficient instead of
/// producing large cancelling pairs.
MinimumNormResult least_squares_minimum_norm(const Eigen::MatrixXd& A,
                                             const Eigen::MatrixXd& B,
                                             double rcond);

/// Eigenvalues of an upper Hessenberg matrix (e.g. companion or colleague
/// forms), with diagonal balancing.
std::vector<std::complex<double>> hessenberg_eigenvalues(const Eigen::MatrixXd& H);

/// Limit the number of threads used by the underlying BLAS. Used by the
/// batch driver so worker-level parallelism is not oversubscribed.
void set_blas_threads(int n);

}  // namespace toruskit::linalg
