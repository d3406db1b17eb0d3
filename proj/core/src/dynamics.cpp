#include "toruskit/dynamics.hpp"

#include <cmath>

namespace toruskit::dynamics {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void MapConfig::validate() const {
  if (substeps < 1) throw std::invalid_argument("MapConfig: substeps must be >= 1");
  if (mu < 0.0 || mu >= 1.0) throw std::invalid_argument("MapConfig: mu must be in [0,1)");
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("MapConfig: eps must be in [0,1)");
}

int MapConfig::state_dim() const {
  switch (kind) {
    case MapKind::coupled_standard_map: return 2;
    case MapKind::er3bp_planar: return 2;
    case MapKind::er3bp_spatial: return 3;
  }
  return 0;
}

int MapConfig::observable_dim() const {
  return kind == MapKind::coupled_standard_map ? 4 : 2 * state_dim();
}

PhaseState step_coupled_standard_map(const PhaseState& state,
                                     const Eigen::Matrix2d& K_sm) {
  if (state.dim() != 2)
    throw std::invalid_argument("step_coupled_standard_map: state must have n=2");
  Eigen::Vector2d s(std::sin(kTwoPi * state.q[0]), std::sin(kTwoPi * state.q[1]));
  Eigen::Vector2d y_next = state.p.head<2>() + (K_sm * s) / kTwoPi;
  Eigen::Vector2d x_next = state.q.head<2>() + y_next;
  return PhaseState(x_next, y_next);
}

Eigen::Vector4d embed_standard_map(const PhaseState& state, double R) {
  if (state.dim() != 2)
    throw std::invalid_argument("embed_standard_map: state must have n=2");
  Eigen::Vector4d h;
  for (int i = 0; i < 2; ++i) {
    const double rad = state.p[i] + R;
    h[2 * i] = rad * std::cos(kTwoPi * state.q[i]);
    h[2 * i + 1] = rad * std::sin(kTwoPi * state.q[i]);
  }
  return h;
}

PhaseState unembed_standard_map(const Eigen::Vector4d& h, double R) {
  VectorXd q(2), p(2);
  for (int i = 0; i < 2; ++i) {
    const double rad = std::hypot(h[2 * i], h[2 * i + 1]);
    if (rad <= 0.0)
      throw std::runtime_error("unembed_standard_map: zero radius, state not recoverable");
    q[i] = std::atan2(h[2 * i + 1], h[2 * i]) / kTwoPi;
    if (q[i] < 0.0) q[i] += 1.0;
    p[i] = rad - R;
  }
  return PhaseState(q, p);
}

namespace {

// ER3BP potential phi(xi, f) and its gradient; n = 2 or 3.
double er3bp_phi(const VectorXd& xi, double mu, double eps, double f,
                 double* rho1_out = nullptr, double* rho2_out = nullptr) {
  // Larger primary (mass 1 - mu) at xi = -mu, smaller (mass mu) at xi = 1 - mu.
  const double zeta = xi.size() > 2 ? xi[2] : 0.0;
  const double r1sq = (xi[0] + mu) * (xi[0] + mu) + xi[1] * xi[1] + zeta * zeta;
  const double r2sq = (xi[0] - (1.0 - mu)) * (xi[0] - (1.0 - mu)) + xi[1] * xi[1] + zeta * zeta;
  const double rho1 = std::sqrt(r1sq), rho2 = std::sqrt(r2sq);
  if (rho1_out) *rho1_out = rho1;
  if (rho2_out) *rho2_out = rho2;
  const double pulsation = 1.0 / (1.0 + eps * std::cos(f));
  double v = 0.5 * ((1.0 - mu) * r1sq + mu * r2sq);
  if (1.0 - mu > 0.0) v += (1.0 - mu) / rho1;  // a massless body exerts no pull
  if (mu > 0.0) v += mu / rho2;
  return pulsation * v;
}

VectorXd er3bp_phi_grad(const VectorXd& xi, double mu, double eps, double f,
                        double floor_rho) {
  const int n = static_cast<int>(xi.size());
  const double zeta = n > 2 ? xi[2] : 0.0;
  VectorXd d1(n), d2(n);
  d1[0] = xi[0] + mu;
  d2[0] = xi[0] - (1.0 - mu);
  d1[1] = d2[1] = xi[1];
  if (n > 2) d1[2] = d2[2] = zeta;
  const double rho1 = d1.norm(), rho2 = d2.norm();
  if ((1.0 - mu > 0.0 && rho1 < floor_rho) || (mu > 0.0 && rho2 < floor_rho))
    throw std::runtime_error("er3bp: trajectory hit a primary singularity");
  const double pulsation = 1.0 / (1.0 + eps * std::cos(f));
  VectorXd g = VectorXd::Zero(n);
  if (1.0 - mu > 0.0) g += (1.0 - mu) * (d1 - d1 / (rho1 * rho1 * rho1));
  if (mu > 0.0) g += mu * (d2 - d2 / (rho2 * rho2 * rho2));
  return pulsation * g;
}

// Hamiltonian vector field in the pulsating synodic frame:
//   xi_dot = dH/dp,  p_dot = -dH/dxi,
// with H = 1/2(|xi|^2 + |p|^2) + eta p_xi - xi p_eta - phi(xi, f).
void er3bp_rhs(const VectorXd& xi, const VectorXd& p, double mu, double eps,
               double f, double floor_rho, VectorXd& xi_dot, VectorXd& p_dot) {
  const int n = static_cast<int>(xi.size());
  xi_dot = p;
  xi_dot[0] += xi[1];
  xi_dot[1] -= xi[0];
  VectorXd grad = er3bp_phi_grad(xi, mu, eps, f, floor_rho);
  p_dot = grad - xi;
  p_dot[0] += p[1];
  p_dot[1] -= p[0];
  (void)n;
}

}  // namespace

double er3bp_hamiltonian(const PhaseState& state, double mu, double eps, double f) {
  double kin = 0.5 * (state.q.squaredNorm() + state.p.squaredNorm());
  double cor = state.q[1] * state.p[0] - state.q[0] * state.p[1];
  return kin + cor - er3bp_phi(state.q, mu, eps, f);
}

PhaseState er3bp_period_map(const PhaseState& state, const MapConfig& config) {
  config.validate();
  const int n = static_cast<int>(state.dim());
  if (n != config.state_dim())
    throw std::invalid_argument("er3bp_period_map: state dimension does not match config");

  // 3-stage Gauss-Legendre coefficients (order 6, symplectic).
  const double s15 = std::sqrt(15.0);
  const double a[3][3] = {
      {5.0 / 36.0, 2.0 / 9.0 - s15 / 15.0, 5.0 / 36.0 - s15 / 30.0},
      {5.0 / 36.0 + s15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - s15 / 24.0},
      {5.0 / 36.0 + s15 / 30.0, 2.0 / 9.0 + s15 / 15.0, 5.0 / 36.0}};
  const double b[3] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};
  const double c[3] = {0.5 - s15 / 10.0, 0.5, 0.5 + s15 / 10.0};

  const double h = kTwoPi / config.substeps;
  constexpr double kStageTol = 1e-13;
  constexpr int kMaxIter = 50;

  VectorXd xi = state.q, p = state.p;
  VectorXd kxi[3], kp[3], sxi[3], sp[3];
  for (int i = 0; i < 3; ++i) {
    kxi[i].setZero(n);
    kp[i].setZero(n);
  }

  for (int step = 0; step < config.substeps; ++step) {
    const double f0 = h * step;
    // Warm start from the explicit vector field at the step start.
    VectorXd fx, fp;
    er3bp_rhs(xi, p, config.mu, config.eps, f0, config.singularity_floor, fx, fp);
    for (int i = 0; i < 3; ++i) {
      kxi[i] = fx;
      kp[i] = fp;
    }

    bool converged = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      double delta = 0.0;
      for (int i = 0; i < 3; ++i) {
        sxi[i] = xi;
        sp[i] = p;
        for (int j = 0; j < 3; ++j) {
          sxi[i] += h * a[i][j] * kxi[j];
          sp[i] += h * a[i][j] * kp[j];
        }
      }
      for (int i = 0; i < 3; ++i) {
        er3bp_rhs(sxi[i], sp[i], config.mu, config.eps, f0 + c[i] * h,
                  config.singularity_floor, fx, fp);
        delta = std::max(delta, (fx - kxi[i]).lpNorm<Eigen::Infinity>());
        delta = std::max(delta, (fp - kp[i]).lpNorm<Eigen::Infinity>());
        kxi[i] = fx;
        kp[i] = fp;
      }
      if (delta < kStageTol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw std::runtime_error("er3bp_period_map: implicit stage iteration failed to converge");

    for (int i = 0; i < 3; ++i) {
      xi += h * b[i] * kxi[i];
      p += h * b[i] * kp[i];
    }
  }
  return PhaseState(xi, p);
}

VectorXd er3bp_momenta_from_velocity(const VectorXd& xi, const VectorXd& xi_dot) {
  VectorXd p = xi_dot;
  p[0] -= xi[1];
  p[1] += xi[0];
  return p;
}

VectorXd er3bp_velocity_from_momenta(const VectorXd& xi, const VectorXd& p) {
  VectorXd v = p;
  v[0] += xi[1];
  v[1] -= xi[0];
  return v;
}

PhaseState apply_map(const PhaseState& state, const MapConfig& config) {
  if (config.kind == MapKind::coupled_standard_map)
    return step_coupled_standard_map(state, config.K_sm);
  return er3bp_period_map(state, config);
}

VectorXd observe(const PhaseState& state, const MapConfig& config) {
  if (config.kind == MapKind::coupled_standard_map)
    return embed_standard_map(state, config.observable_radius);
  VectorXd h(2 * state.dim());
  h << state.q, state.p;
  return h;
}

ObservableSeries generate_series(const MapConfig& config, const PhaseState& x0,
                                 Eigen::Index N) {
  if (N < 1) throw std::invalid_argument("generate_series: N must be >= 1");
  config.validate();
  ObservableSeries series;
  series.origin = x0;
  series.source = config.kind == MapKind::coupled_standard_map ? "coupled_standard_map"
                  : config.kind == MapKind::er3bp_planar       ? "er3bp_planar"
                                                               : "er3bp_spatial";
  series.data.resize(N, config.observable_dim());
  PhaseState state = x0;
  for (Eigen::Index t = 0; t < N; ++t) {
    series.data.row(t) = observe(state, config).transpose();
    if (t + 1 < N) state = apply_map(state, config);
  }
  return series;
}

}  // namespace toruskit::dynamics
