#pragma once

// Fourier parameterization of a torus from a trajectory and rotation vector:
// weighted/unweighted least squares, Birkhoff projection baseline, validation
// error, and QR-updated adaptive resolution descent.

#include <Eigen/Dense>
#include <vector>

#include "toruskit/dynamics.hpp"
#include "toruskit/torus.hpp"

namespace toruskit::fit {

using dynamics::ObservableSeries;
using torus::FourierTorus;
using torus::ResolutionBox;

/// Solve min_X ||A X - B||_W over the mode box, with A columns
/// Lambda_k = (lambda_k^0, ..., lambda_k^{T-1}), lambda_k = e^{2 pi i omega.k}
/// (island: e^{2 pi i (n + omega.k)/p}). Fitted in real cos/sin conjugate
/// classes so conjugate symmetry is exact. Weights are the Birkhoff bump
/// (weighted) or uniform 1/T. Uses the first T rows (default: all).
/// Throws on resonant boxes (two mode frequencies within 1e-13 mod 1) and
/// when the mode count exceeds the training length.
FourierTorus fourier_least_squares(const ObservableSeries& series,
                                   const Eigen::VectorXd& omega,
                                   const ResolutionBox& box, bool weighted,
                                   Eigen::Index T = -1);

/// Birkhoff projection baseline h_k = sum_t c_t lambda_k^{-t} h(F^t x):
/// the A*WB term of the normal equations without the normal-matrix
/// correction.
FourierTorus projection_coefficients(const ObservableSeries& series,
                                     const Eigen::VectorXd& omega,
                                     const ResolutionBox& box, bool weighted,
                                     Eigen::Index T = -1);

/// Relative l2 mismatch between the torus prediction h(t omega / p) and rows
/// t_start..t_start+M-1 of the series (phase anchored at the series start,
/// theta(0) = 0). Throws if the held-out rows vanish identically.
double validation_error(const FourierTorus& torus, const ObservableSeries& series,
                        Eigen::Index t_start, Eigen::Index M);

/// Thin QR factorization of the training design matrix, extended column
/// block by column block during the adaptive descent.
struct QRState {
  Eigen::MatrixXd A;    // T x M design (kept for refactorization)
  Eigen::MatrixXd Q;    // T x M
  Eigen::MatrixXd R;    // M x M upper triangular
  Eigen::MatrixXd QtB;  // M x D
  Eigen::Index cols() const { return R.cols(); }
};

/// Append new design columns via the block update R12 = Q^T A_new,
/// QR(A_new - Q R12); refactorizes from scratch if the appended block loses
/// orthogonality beyond 1e-8.
void extend_qr(QRState& state, const Eigen::MatrixXd& new_cols,
               const Eigen::MatrixXd& B);

struct AdaptiveResult {
  FourierTorus torus;
  std::vector<std::pair<Eigen::VectorXi, double>> path;  // (K, validation resid)
  bool kmax_warning = false;   // resolution bound halted the descent
};

/// Greedy resolution descent: split the series at floor((1-gamma) N), start
/// at K = 0, extend along the coordinate direction with the smallest
/// validation residual while any candidate stays below eta times the best
/// residual so far and the mode count stays within K_max; returns the torus
/// refit (unweighted) at the best visited box. Island chains fix the
/// rational extent p and increment only K.
AdaptiveResult adaptive_parameterize(const ObservableSeries& series,
                                     const Eigen::VectorXd& omega,
                                     double gamma = 0.05, double eta = 10.0,
                                     Eigen::Index K_max = 2000, int p = 1);

}  // namespace toruskit::fit
