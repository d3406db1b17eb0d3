#include "toruskit/validation.hpp"

#include <cmath>
#include <stdexcept>

namespace toruskit::validation {

namespace {

// Visit every point of the uniform grid on T^d.
template <typename Fn>
void for_each_grid_point(int d, int n, Fn&& fn) {
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(d);
  Eigen::VectorXd theta(d);
  while (true) {
    for (int i = 0; i < d; ++i)
      theta[i] = static_cast<double>(idx[i]) / static_cast<double>(n);
    fn(theta);
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
    if (i == d) return;
  }
}

}  // namespace

double kam_residual(const FourierTorus& torus,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& step,
                    const KamGrid& grid) {
  if (grid.points_per_dim < 2)
    throw std::invalid_argument("kam_residual: grid needs at least 2 points per dim");
  const int d = static_cast<int>(torus.omega.size());
  const int p = torus.box.p;
  const Eigen::VectorXd shift = torus.omega / static_cast<double>(p);

  double worst = 0.0;
  for (int j = 0; j < p; ++j) {
    const double angle = static_cast<double>(j) / static_cast<double>(p);
    const double next_angle = static_cast<double>(j + 1) / static_cast<double>(p);
    double num = 0.0, den = 0.0;
    for_each_grid_point(d, grid.points_per_dim, [&](const Eigen::VectorXd& theta) {
      const Eigen::VectorXd here = torus::evaluate_torus(torus, theta, angle);
      const Eigen::VectorXd mapped = step(here);
      const Eigen::VectorXd rotated =
          torus::evaluate_torus(torus, theta + shift, next_angle);
      num += (mapped - rotated).squaredNorm();
      den += here.squaredNorm();
    });
    if (den == 0.0) throw std::runtime_error("kam_residual: torus is identically zero");
    worst = std::max(worst, std::sqrt(num / den));
  }
  return worst;
}

double kam_residual(const FourierTorus& torus, const MapConfig& map,
                    const KamGrid& grid) {
  auto step = [&map](const Eigen::VectorXd& h) -> Eigen::VectorXd {
    dynamics::PhaseState state;
    if (map.kind == dynamics::MapKind::coupled_standard_map) {
      state = dynamics::unembed_standard_map(Eigen::Vector4d(h),
                                             map.observable_radius);
    } else {
      const Eigen::Index n = h.size() / 2;
      state = dynamics::PhaseState(h.head(n), h.tail(n));
    }
    return dynamics::observe(dynamics::apply_map(state, map), map);
  };
  return kam_residual(torus, step, grid);
}

namespace {

double torus_norm(double x) {
  x = x - std::floor(x);
  return std::min(x, 1.0 - x);
}

// Enumerate k with |k|_1 = m (free signs on nonzero entries); returns true
// once fn returns true.
bool enumerate_l1_shell(Eigen::VectorXd::Index d, int m, Eigen::VectorXi& k,
                        Eigen::Index pos, int remaining,
                        const std::function<bool(const Eigen::VectorXi&)>& fn) {
  if (pos == d - 1) {
    for (int s = -1; s <= 1; s += 2) {
      k[pos] = s * remaining;
      if (fn(k)) return true;
      if (remaining == 0) break;
    }
    return false;
  }
  for (int a = 0; a <= remaining; ++a) {
    for (int s = -1; s <= 1; s += 2) {
      k[pos] = s * a;
      if (enumerate_l1_shell(d, m, k, pos + 1, remaining - a, fn)) return true;
      if (a == 0) break;
    }
  }
  return false;
}

}  // namespace

std::optional<int> resonance_order(const Eigen::VectorXd& omega, double delta,
                                   int k_budget) {
  if (delta <= 0.0) throw std::invalid_argument("resonance_order: delta must be > 0");
  if (k_budget < 1)
    throw std::invalid_argument("resonance_order: k_budget must be >= 1");
  const Eigen::Index d = omega.size();
  Eigen::VectorXi k(d);
  for (int m = 1; m <= k_budget; ++m) {
    const bool hit = enumerate_l1_shell(
        d, m, k, 0, m, [&](const Eigen::VectorXi& kk) {
          return torus_norm(omega.dot(kk.cast<double>())) <= delta;
        });
    if (hit) return m;
  }
  return std::nullopt;
}

}  // namespace toruskit::validation
