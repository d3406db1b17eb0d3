#pragma once

// Fourier representation of an invariant torus (or island chain): mode box
// indexing, synthesis, and JSON (de)serialization.

#include <Eigen/Dense>
#include <complex>
#include <json.hpp>
#include <string>
#include <vector>

namespace toruskit::torus {

/// Rectangular mode box -K <= k <= K; island chains carry the fixed rational
/// extent p as an extra discrete index n in [0, p).
struct ResolutionBox {
  Eigen::VectorXi K;
  int p = 1;

  Eigen::Index dim() const { return K.size(); }
  Eigen::Index mode_count() const;
};

/// Parameterization h(theta) = sum_{n,k} h_{nk} e^{2 pi i (n theta0' + k.theta)}
/// with conjugate symmetry h_{-n,-k} = conj(h_{nk}); theta0' is the extended
/// island angle (absent, i.e. n = 0 only, when p = 1).
struct FourierTorus {
  Eigen::VectorXd omega;
  ResolutionBox box;
  int D = 0;
  std::vector<Eigen::VectorXcd> coeffs;  // indexed by mode_index
  double R_h = std::numeric_limits<double>::quiet_NaN();
  bool ill_conditioned = false;
};

/// Row-major linear index of mode (n, k) in the box (n outermost).
Eigen::Index mode_index(const ResolutionBox& box, int n, const Eigen::VectorXi& k);

/// Inverse of mode_index.
std::pair<int, Eigen::VectorXi> mode_at(const ResolutionBox& box, Eigen::Index idx);

/// Linear index of the conjugate mode (-n mod p, -k).
Eigen::Index conjugate_index(const ResolutionBox& box, Eigen::Index idx);

/// Temporal frequency of mode (n, k) along the trajectory: frac((n + omega.k)/p).
double mode_frequency(const Eigen::VectorXd& omega, int n, const Eigen::VectorXi& k,
                      int p);

/// Synthesis sum at (theta0', theta). Throws if the imaginary residue exceeds
/// 1e-8 times the value norm (conjugate-symmetry violation).
Eigen::VectorXd evaluate_torus(const FourierTorus& torus,
                               const Eigen::VectorXd& theta,
                               double extended_angle = 0.0);

/// Self-describing JSON document: d, D, p, omega, K, residuals, and the
/// coefficient array (real/imaginary interleaved, row-major over the box).
nlohmann::json torus_to_json(const FourierTorus& torus);
FourierTorus torus_from_json(const nlohmann::json& j);

}  // namespace toruskit::torus
