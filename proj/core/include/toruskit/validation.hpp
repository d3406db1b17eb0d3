#pragma once

// A-posteriori torus quality metrics independent of the fitting data: the
// KAM conjugacy residual on a uniform grid and the resonance order of the
// rotation vector.

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "toruskit/dynamics.hpp"
#include "toruskit/torus.hpp"

namespace toruskit::validation {

using dynamics::MapConfig;
using torus::FourierTorus;

/// Uniform periodic-trapezoid grid on T^d (endpoint excluded).
struct KamGrid {
  int points_per_dim = 25;
};

/// R_KAM = ||h.F.S - h.S.tau_omega||_{L2} / ||h.S||_{L2}, both norms
/// discretized on the grid. `step` acts on embedded observable vectors
/// (pullback, map application, and re-observation composed by the caller).
/// Island chains take the maximum over the p tori, with the map advancing
/// the extended angle by 1/p.
double kam_residual(const FourierTorus& torus,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& step,
                    const KamGrid& grid = {});

/// Convenience wrapper pulling embedded points back to states for the
/// built-in maps (identity observable for the three-body maps, analytic
/// embedding inverse for the coupled standard map). Throws if a point
/// cannot be pulled back.
double kam_residual(const FourierTorus& torus, const MapConfig& map,
                    const KamGrid& grid = {});

/// min ||k||_1 over nonzero integer k with ||omega.k||_T <= delta, searched
/// over ||k||_1 <= k_budget; nullopt when no resonance is found.
std::optional<int> resonance_order(const Eigen::VectorXd& omega,
                                   double delta = 1e-4, int k_budget = 50);

}  // namespace toruskit::validation
