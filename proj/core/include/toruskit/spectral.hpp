#pragma once

// Weighted Birkhoff averaging and the Birkhoff reduced-rank-extrapolation
// (RRE) filter: trajectory classification, frequency extraction, and
// amplitude projection.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "toruskit/dynamics.hpp"

namespace toruskit::spectral {

using dynamics::ObservableSeries;
using Eigen::VectorXd;

/// Smooth bump weights w_t ~ exp(-1/(x(1-x))) at x = (t+1)/(T+1),
/// normalized to sum to one.
VectorXd birkhoff_weights(Eigen::Index T);

/// sum_t w_t h(F^t x); uniform weights 1/T when `weighted` is false.
VectorXd weighted_birkhoff_average(const ObservableSeries& series, bool weighted);

/// Relative weighted Birkhoff average residual between the two halves of the
/// series. Requires even length; throws if the first-half average vanishes.
double wba_residual(const ObservableSeries& series);

/// Palindromic sum-to-one filter c of length 2J+1 with its consistency
/// residual R_RRE.
struct RREFilter {
  VectorXd c;            // c_{-J}..c_J
  Eigen::Index J = 0;
  double residual = 0.0; // R_RRE
  bool rank_warning = false;
};

/// Solve the constrained least-squares problem for the RRE filter on the
/// first T+2J+1 rows of the series. The palindromic and sum-to-one
/// constraints are eliminated exactly through a constant-mode-free discrete
/// cosine basis, and the reduced system is solved by Householder QR.
RREFilter solve_rre_filter(const ObservableSeries& series, Eigen::Index J,
                           Eigen::Index T);

/// Frequencies of the filter's unit-circle roots, as representatives in
/// (0, 1/2]. The degree-2J palindromic root problem is reduced to a J x J
/// colleague eigenproblem through y = (z + 1/z)/2; a full 2J x 2J companion
/// solve is used as fallback if the reduction looks ill-conditioned.
std::vector<double> extract_frequencies(const RREFilter& filter,
                                        double circle_tol = 1e-4);

struct SpectrumEntry {
  double omega = 0.0;      // frequency in (0, 1/2]
  Eigen::VectorXcd amp;    // amplitude H of the e^{+2 pi i omega t} mode
  double mag = 0.0;        // ||H||
};

/// Frequency content of a series: the mean (zero-frequency) amplitude plus
/// conjugate-pair entries sorted by descending magnitude.
struct FrequencySpectrum {
  VectorXd mean;
  std::vector<SpectrumEntry> entries;
  bool conditioning_warning = false;

  Eigen::Index size() const { return static_cast<Eigen::Index>(entries.size()); }
};

/// Least-squares fit of the series onto the modes e^{2 pi i omega_j t}
/// (fitted in real cos/sin pairs so conjugate symmetry is exact).
FrequencySpectrum project_spectrum(const ObservableSeries& series,
                                   const std::vector<double>& frequencies);

}  // namespace toruskit::spectral
