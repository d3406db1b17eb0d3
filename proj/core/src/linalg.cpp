#include "toruskit/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>

extern "C" void openblas_set_num_threads(int);

namespace toruskit::linalg {

LeastSquaresResult least_squares(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const lapack_int m = static_cast<lapack_int>(A.rows());
  const lapack_int n = static_cast<lapack_int>(A.cols());
  const lapack_int nrhs = static_cast<lapack_int>(B.cols());
  if (A.rows() < A.cols())
    throw std::invalid_argument("least_squares: system must be overdetermined");
  if (B.rows() != A.rows())
    throw std::invalid_argument("least_squares: row mismatch");

  Eigen::MatrixXd Awork = A;
  Eigen::MatrixXd Bwork = B;
  lapack_int info = LAPACKE_dgels(LAPACK_COL_MAJOR, 'N', m, n, nrhs,
                                  Awork.data(), m, Bwork.data(), m);
  if (info != 0) throw std::runtime_error("least_squares: dgels failed");

  LeastSquaresResult res;
  res.solution = Bwork.topRows(n);
  res.r_diag = Awork.diagonal().head(n).cwiseAbs();
  // dgels leaves the residual components in the trailing rows of B.
  res.residual_norm = Bwork.bottomRows(m - n).norm();
  return res;
}

MinimumNormResult least_squares_minimum_norm(const Eigen::MatrixXd& A,
                                             const Eigen::MatrixXd& B,
                                             double rcond) {
  const lapack_int m = static_cast<lapack_int>(A.rows());
  const lapack_int n = static_cast<lapack_int>(A.cols());
  const lapack_int nrhs = static_cast<lapack_int>(B.cols());
  if (A.rows() < A.cols())
    throw std::invalid_argument("least_squares_minimum_norm: system must be overdetermined");
  if (B.rows() != A.rows())
    throw std::invalid_argument("least_squares_minimum_norm: row mismatch");

  Eigen::MatrixXd Awork = A;
  Eigen::MatrixXd Bwork = B;
  std::vector<lapack_int> jpvt(static_cast<size_t>(n), 0);
  lapack_int rank = 0;
  lapack_int info =
      LAPACKE_dgelsy(LAPACK_COL_MAJOR, m, n, nrhs, Awork.data(), m,
                     Bwork.data(), m, jpvt.data(), rcond, &rank);
  if (info != 0) throw std::runtime_error("least_squares_minimum_norm: dgelsy failed");

  MinimumNormResult res;
  res.solution = Bwork.topRows(n);
  res.rank = static_cast<Eigen::Index>(rank);
  return res;
}

std::vector<std::complex<double>> hessenberg_eigenvalues(const Eigen::MatrixXd& Hin) {
  const lapack_int n = static_cast<lapack_int>(Hin.rows());
  if (Hin.cols() != Hin.rows())
    throw std::invalid_argument("hessenberg_eigenvalues: matrix must be square");
  if (n == 0) return {};

  Eigen::MatrixXd H = Hin;
  // Diagonal balancing only ('S'); permutations would break the Hessenberg
  // pattern dhseqr requires.
  std::vector<double> scale(n);
  lapack_int ilo = 1, ihi = n;
  lapack_int info = LAPACKE_dgebal(LAPACK_COL_MAJOR, 'S', n, H.data(), n,
                                   &ilo, &ihi, scale.data());
  if (info != 0) throw std::runtime_error("hessenberg_eigenvalues: dgebal failed");

  std::vector<double> wr(n), wi(n);
  info = LAPACKE_dhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, 1, n, H.data(), n,
                        wr.data(), wi.data(), nullptr, 1);
  if (info < 0) throw std::runtime_error("hessenberg_eigenvalues: dhseqr failed");
  // info > 0 means some eigenvalues did not converge; the converged ones are
  // in entries info..n-1.
  std::vector<std::complex<double>> eig;
  eig.reserve(n);
  for (lapack_int i = (info > 0 ? info : 0); i < n; ++i)
    eig.emplace_back(wr[i], wi[i]);
  return eig;
}

void set_blas_threads(int n) { openblas_set_num_threads(std::max(1, n)); }

}  // namespace toruskit::linalg
