#pragma once

// Benchmark symplectic maps (coupled standard map, planar/spatial elliptic
// restricted three-body problem), observable embeddings, and trajectory
// generation.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace toruskit::dynamics {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Phase-space point of a symplectic map: angle-like coordinates q and
/// momenta p of equal length n.
struct PhaseState {
  VectorXd q;
  VectorXd p;

  PhaseState() = default;
  PhaseState(VectorXd q_, VectorXd p_) : q(std::move(q_)), p(std::move(p_)) {
    if (q.size() != p.size())
      throw std::invalid_argument("PhaseState: q and p must have equal length");
  }
  Eigen::Index dim() const { return q.size(); }
};

enum class MapKind { coupled_standard_map, er3bp_planar, er3bp_spatial };

struct MapConfig {
  MapKind kind = MapKind::coupled_standard_map;
  Eigen::Matrix2d K_sm = Eigen::Matrix2d::Zero();  // standard-map forcing
  double mu = 0.0;                                 // ER3BP mass ratio
  double eps = 0.0;                                // primary orbit eccentricity
  int substeps = 1000;                             // integrator steps per period
  double observable_radius = 0.5;                  // embedding offset R
  double singularity_floor = 1e-6;                 // minimum allowed rho_1, rho_2

  void validate() const;
  /// Observable dimension D for this map's default observable.
  int observable_dim() const;
  /// Phase-space half-dimension n.
  int state_dim() const;
};

/// One iterate of the T^2 x R^2 coupled standard map:
///   y' = y + (1/2pi) K_sm sin(2pi x),  x' = x + y'.
/// Angles are kept unwrapped; the embedding is periodic in x.
PhaseState step_coupled_standard_map(const PhaseState& state,
                                     const Eigen::Matrix2d& K_sm);

/// Cylindrical embedding of the standard-map state into R^4:
///   ((y_1+R)cos 2pi x_1, (y_1+R)sin 2pi x_1, (y_2+R)cos 2pi x_2, (y_2+R)sin 2pi x_2).
Eigen::Vector4d embed_standard_map(const PhaseState& state, double R);

/// Inverse of embed_standard_map. Throws if a radius y_i + R is <= 0.
PhaseState unembed_standard_map(const Eigen::Vector4d& h, double R);

/// Pulsating-synodic ER3BP Hamiltonian H(xi, p, f). Works for planar (n=2)
/// and spatial (n=3) states.
double er3bp_hamiltonian(const PhaseState& state, double mu, double eps, double f);

/// Advance an ER3BP state by one full period of the primaries (f: 0 -> 2pi)
/// with a 3-stage Gauss-Legendre implicit Runge-Kutta integrator using
/// config.substeps fixed steps.
///
/// Throws std::runtime_error if the trajectory approaches a primary
/// (rho < config.singularity_floor) or the implicit stage iteration fails.
PhaseState er3bp_period_map(const PhaseState& state, const MapConfig& config);

/// Convert pulsating-rotating-frame velocities to canonical momenta,
/// p = xi_dot + (-eta, xi, 0).
VectorXd er3bp_momenta_from_velocity(const VectorXd& xi, const VectorXd& xi_dot);
/// Inverse conversion, xi_dot = p - (-eta, xi, 0).
VectorXd er3bp_velocity_from_momenta(const VectorXd& xi, const VectorXd& p);

/// One application of the configured map.
PhaseState apply_map(const PhaseState& state, const MapConfig& config);

/// Default observable of the configured map: identity (q, p) for the ER3BP,
/// the cylindrical embedding for the standard map.
VectorXd observe(const PhaseState& state, const MapConfig& config);

/// T_total x D record of h(F^t(x)) along one trajectory; the sole dynamical
/// input to the torus pipeline.
struct ObservableSeries {
  MatrixXd data;        // row t holds h(F^t(x))
  PhaseState origin;    // initial state (empty for external series)
  std::string source;   // map tag or "external"

  Eigen::Index length() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

/// Rows 0..N-1 hold the observable of F^t(x0).
ObservableSeries generate_series(const MapConfig& config, const PhaseState& x0,
                                 Eigen::Index N);

}  // namespace toruskit::dynamics
