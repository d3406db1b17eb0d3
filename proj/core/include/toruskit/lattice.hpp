#pragma once

// Homology canonicalization: Korkine-Zolotarev reduction of the averaged
// metric of the embedded torus, selecting short, near-orthogonal generators
// and a canonical representative of the rotation vector.

#include <Eigen/Dense>

#include "toruskit/rotation.hpp"

namespace toruskit::lattice {

using rotation::WavenumberLabeling;
using spectral::FrequencySpectrum;

struct AveragedMetric {
  Eigen::MatrixXd G;
  bool rank_warning = false;  // rank(G) < d: no measured motion in some direction
};

struct UnimodularTransform {
  Eigen::MatrixXi A;
};

/// Exact integer determinant (fraction-free elimination).
long long integer_determinant(const Eigen::MatrixXi& m);

/// Exact inverse of a unimodular integer matrix (adjugate over det = +-1).
Eigen::MatrixXi unimodular_inverse(const Eigen::MatrixXi& A);

/// G = sum_j mag_j^2 k_j k_j^T over labeled spectrum entries. In the island
/// case entries sharing a wavenumber across discrete indices n accumulate
/// into the same k k^T term, which the plain sum already does.
AveragedMetric averaged_metric(const FrequencySpectrum& spectrum,
                               const WavenumberLabeling& labeling, int p);

/// Nonzero integer k minimizing ||B k|| by exact enumeration (LLL
/// preprocessing bounds the search radius). Ties are broken lexicographically
/// after normalizing the first nonzero entry to be positive.
Eigen::VectorXi shortest_lattice_vector(const Eigen::MatrixXd& B,
                                        long long node_budget = 10'000'000);

/// Unimodular A such that the columns of B A^{-1} form a KZ-reduced basis of
/// the lattice with Gram matrix G = B^T B: each Gram-Schmidt vector is a
/// shortest vector of the corresponding projected lattice and all
/// Gram-Schmidt coefficients satisfy |mu| <= 1/2. The reduced generators are
/// sign-normalized (first nonzero entry positive) and kept in reduction stage
/// order (shortest vector first) so the output is reproducible.
UnimodularTransform kz_reduce(const AveragedMetric& metric,
                              long long node_budget = 10'000'000);

/// omega' = A omega mod 1, then rows of A are negated where needed so every
/// entry of omega' lies in [0, 1/2].
std::pair<UnimodularTransform, Eigen::VectorXd> canonicalize_rotation(
    const UnimodularTransform& A, const Eigen::VectorXd& omega);

}  // namespace toruskit::lattice
