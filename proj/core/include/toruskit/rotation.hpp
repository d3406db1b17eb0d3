#pragma once

// Bayesian MAP inference of a valid rotation vector and wavenumber labeling
// from the measured frequency spectrum, including island-period detection.

#include <Eigen/Dense>
#include <vector>

#include "toruskit/spectral.hpp"

namespace toruskit::rotation {

using spectral::FrequencySpectrum;

/// Hyperparameters of the smooth-torus prior sigma(k) = C exp(-r ||k||) and
/// the frequency measurement model.
struct SpectralPrior {
  double C = 1.0;
  double r = 1.0;
  double sigma_omega = 1e-10;
  int D = 1;  // observable dimension
};

/// Label of one spectrum entry: wavenumber k (and discrete island index n;
/// n = 0 in the plain torus case).
struct ModeLabel {
  int n = 0;
  Eigen::VectorXi k;

  bool same_mode(const ModeLabel& other, int period) const;
};

/// Injective assignment j -> (n_j, k_j) for the first J_0 spectrum entries.
struct WavenumberLabeling {
  std::vector<ModeLabel> labels;
};

struct RotationEstimate {
  Eigen::VectorXd omega;          // entries in [0, 1)
  WavenumberLabeling labeling;
  double log_posterior = 0.0;     // L_MAP
  Eigen::MatrixXi source_rows;    // d x d rows k_{j_1}..k_{j_d}
  long long det = 0;              // +1 or -1
  int period = 1;                 // island period p
  std::vector<Eigen::Index> source_indices;  // chosen spectrum entries
};

/// Fit (C, r) of the analytic-decay prior by linear regression of log H_j^2
/// against the surrogate wavenumber ((j-1)/V_d)^{1/d}, over the first
/// max(2, floor(J*/3)) entries. r is clamped to >= 1e-3.
std::pair<double, double> fit_spectral_prior(const std::vector<double>& magnitudes,
                                             int d, int D);

/// Smallest p in [1, p_max] such that some frequency is within eps_isl of a
/// nontrivial rational n/p; returns 1 when none match.
int detect_island_period(const std::vector<double>& frequencies, int p_max = 10,
                         double eps_isl = 1e-8);

/// Greedily label the first J_0 spectrum entries on the grid ||k||_inf <= P
/// (island case: [p] x grid), maximizing the per-entry posterior weight
/// alpha_j * Prob(Omega_j | omega, k) while keeping labels injective.
/// Returns the labeling and the accumulated log posterior.
std::pair<WavenumberLabeling, double> greedy_label(
    const Eigen::VectorXd& omega, const FrequencySpectrum& spectrum,
    const SpectralPrior& prior, int P, Eigen::Index J_0, int p);

/// Enumerate all d-subsets of the first J_0 frequencies as rotation-vector
/// candidates (island case: rescaled by p), label each greedily, and return
/// the highest-posterior candidate whose chosen label rows form a
/// unimodular matrix. Throws std::runtime_error if no candidate is valid.
RotationEstimate estimate_rotation_vector(const FrequencySpectrum& spectrum,
                                          int d, Eigen::Index J_0,
                                          const SpectralPrior& prior, int P,
                                          int p, double eps_map = 1e-3);

/// Default wavenumber grid bound P = ceil(10 * J_0^{1/d}).
int default_grid_bound(Eigen::Index J_0, int d);

/// Log of the regularized lower incomplete gamma function P(a, x).
double log_reg_lower_gamma(double a, double x);

}  // namespace toruskit::rotation
