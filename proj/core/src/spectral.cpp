#include "toruskit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toruskit/linalg.hpp"

namespace toruskit::spectral {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double bump(double x) { return std::exp(-1.0 / (x * (1.0 - x))); }
}  // namespace

VectorXd birkhoff_weights(Eigen::Index T) {
  if (T < 1) throw std::invalid_argument("birkhoff_weights: T must be >= 1");
  VectorXd w(T);
  for (Eigen::Index t = 0; t < T; ++t)
    w[t] = bump(static_cast<double>(t + 1) / static_cast<double>(T + 1));
  return w / w.sum();
}

VectorXd weighted_birkhoff_average(const ObservableSeries& series, bool weighted) {
  const Eigen::Index T = series.length();
  if (T < 1) throw std::invalid_argument("weighted_birkhoff_average: empty series");
  if (!weighted) return series.data.colwise().mean();
  return series.data.transpose() * birkhoff_weights(T);
}

double wba_residual(const ObservableSeries& series) {
  const Eigen::Index N = series.length();
  if (N < 2 || N % 2 != 0)
    throw std::invalid_argument("wba_residual: series length must be even and >= 2");
  const Eigen::Index half = N / 2;
  const VectorXd w = birkhoff_weights(half);
  VectorXd first = series.data.topRows(half).transpose() * w;
  VectorXd second = series.data.bottomRows(half).transpose() * w;
  const double denom = first.norm();
  if (denom == 0.0)
    throw std::runtime_error("wba_residual: first-half average is zero");
  return (second - first).norm() / denom;
}

RREFilter solve_rre_filter(const ObservableSeries& series, Eigen::Index J,
                           Eigen::Index T) {
  const Eigen::Index N = series.length();
  const Eigen::Index D = series.dim();
  if (J < 1 || T < 1) throw std::invalid_argument("solve_rre_filter: J, T must be >= 1");
  if (N < T + 2 * J + 1)
    throw std::invalid_argument("solve_rre_filter: series shorter than T + 2J + 1");
  if (D * T < J)
    throw std::invalid_argument("solve_rre_filter: need D*T >= J");

  const Eigen::Index n_u = T + 2 * J;  // number of difference vectors
  const Eigen::Index m = 2 * J + 1;    // filter length

  Eigen::MatrixXd u = series.data.middleRows(1, n_u) - series.data.topRows(n_u);

  const VectorXd w = birkhoff_weights(n_u);
  double c_rre = 0.0;
  for (Eigen::Index t = 0; t < n_u; ++t) c_rre += w[t] * u.row(t).squaredNorm();

  RREFilter filter;
  filter.J = J;
  if (c_rre <= 0.0) {
    // Fixed point: all differences vanish; the homogeneous minimum-norm
    // solution is the uniform filter.
    filter.c = VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    filter.residual = 0.0;
    return filter;
  }

  // Constant-mode-free DCT basis: (q_k)_j = sqrt(2/m) cos(2 pi k j / m),
  // j = -J..J, k = 1..J. Substituting c = 1/m + Q c' eliminates both
  // constraints exactly.
  Eigen::MatrixXd Q(m, J);
  const double scale = std::sqrt(2.0 / static_cast<double>(m));
  for (Eigen::Index k = 1; k <= J; ++k)
    for (Eigen::Index j = -J; j <= J; ++j)
      Q(j + J, k - 1) =
          scale * std::cos(kTwoPi * static_cast<double>(k) * static_cast<double>(j) /
                           static_cast<double>(m));

  // rhs_t = (1/m) sum_j u_{t+j}; the inner sum telescopes to
  // h(F^{t+m}) - h(F^t).
  Eigen::MatrixXd UQ(T * D, J);
  Eigen::MatrixXd rhs(T * D, 1);
  const double inv_m = 1.0 / static_cast<double>(m);
  // Build U (rows = D per time index) in row blocks to bound peak memory.
  const Eigen::Index block = std::max<Eigen::Index>(1, (1 << 21) / std::max<Eigen::Index>(m, 1));
  Eigen::MatrixXd Ublk;
  for (Eigen::Index t0 = 0; t0 < T; t0 += block) {
    const Eigen::Index nb = std::min(block, T - t0);
    Ublk.resize(nb * D, m);
    for (Eigen::Index t = 0; t < nb; ++t)
      for (Eigen::Index j = 0; j < m; ++j)
        Ublk.col(j).segment(t * D, D) = u.row(t0 + t + j).transpose();
    UQ.middleRows(t0 * D, nb * D).noalias() = Ublk * Q;
    for (Eigen::Index t = 0; t < nb; ++t)
      rhs.col(0).segment((t0 + t) * D, D) =
          inv_m * (series.data.row(t0 + t + m) - series.data.row(t0 + t)).transpose();
  }
  u.resize(0, 0);

  auto lsq = linalg::least_squares(UQ, -rhs);
  filter.c = VectorXd::Constant(m, inv_m) + Q * lsq.solution.col(0);
  filter.residual = lsq.residual_norm / std::sqrt(static_cast<double>(T) * c_rre);
  const double dmax = lsq.r_diag.maxCoeff();
  filter.rank_warning = lsq.r_diag.minCoeff() < 1e-14 * dmax;
  return filter;
}

namespace {

// Clenshaw evaluation of a Chebyshev expansion sum a_k T_k(y).
double chebyshev_eval(const std::vector<double>& a, double y) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index k = static_cast<Eigen::Index>(a.size()) - 1; k >= 1; --k) {
    const double b0 = 2.0 * y * b1 - b2 + a[static_cast<size_t>(k)];
    b2 = b1;
    b1 = b0;
  }
  return y * b1 - b2 + a[0];
}

void push_frequency(std::vector<double>& out, double omega) {
  // Map to the representative in (0, 1/2]; merge near-duplicates.
  omega = omega - std::floor(omega);
  if (omega > 0.5) omega = 1.0 - omega;
  if (omega < 1e-12) return;
  for (double o : out)
    if (std::abs(o - omega) < 1e-12) return;
  out.push_back(omega);
}

}  // namespace

std::vector<double> extract_frequencies(const RREFilter& filter, double circle_tol) {
  const Eigen::Index J = filter.J;
  const VectorXd& c = filter.c;
  const double cmax = c.cwiseAbs().maxCoeff();
  const double cJ = c[2 * J];
  if (std::abs(cJ) < 1e-14 * cmax)
    throw std::runtime_error("extract_frequencies: leading filter coefficient vanishes");

  // Chebyshev form of the palindromic symbol: sum c_j z^j = q(y) with
  // y = (z + 1/z)/2 and q(y) = c_0 + 2 sum_{k>=1} c_k T_k(y).
  std::vector<double> a(static_cast<size_t>(J) + 1);
  a[0] = c[J];
  for (Eigen::Index k = 1; k <= J; ++k) a[static_cast<size_t>(k)] = 2.0 * c[J + k];

  // Colleague (comrade) matrix in upper Hessenberg form.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J, J);
  if (J == 1) {
    M(0, 0) = -a[0] / a[1];
  } else {
    M(1, 0) = 1.0;
    for (Eigen::Index j = 1; j + 1 < J; ++j) {
      M(j - 1, j) = 0.5;
      M(j + 1, j) = 0.5;
    }
    M(J - 2, J - 1) = 0.5;
    const double lead = 2.0 * a[static_cast<size_t>(J)];
    for (Eigen::Index k = 0; k < J; ++k) M(k, J - 1) -= a[static_cast<size_t>(k)] / lead;
  }

  auto roots = linalg::hessenberg_eigenvalues(M);

  std::vector<double> freqs;
  double worst_rel_residual = 0.0;
  double coeff_scale = 0.0;
  for (double ak : a) coeff_scale += std::abs(ak);
  for (const auto& y : roots) {
    if (std::abs(y.imag()) > circle_tol) continue;
    if (std::abs(y.real()) > 1.0 + circle_tol) continue;
    const double yr = std::clamp(y.real(), -1.0, 1.0);
    worst_rel_residual =
        std::max(worst_rel_residual, std::abs(chebyshev_eval(a, yr)) / coeff_scale);
    push_frequency(freqs, std::acos(yr) / kTwoPi);
  }

  if (worst_rel_residual > 1e-6) {
    // Palindromic reduction ill-conditioned; fall back to the full companion
    // matrix of the degree-2J polynomial.
    const Eigen::Index n = 2 * J;
    Eigen::MatrixXd Cm = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j + 1 < n; ++j) Cm(j + 1, j) = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) Cm(k, n - 1) = -c[k] / cJ;
    auto zroots = linalg::hessenberg_eigenvalues(Cm);
    freqs.clear();
    for (const auto& z : zroots) {
      if (std::abs(std::abs(z) - 1.0) > circle_tol) continue;
      push_frequency(freqs, std::arg(z) / kTwoPi);
    }
  }

  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

FrequencySpectrum project_spectrum(const ObservableSeries& series,
                                   const std::vector<double>& frequencies) {
  const Eigen::Index N = series.length();
  const Eigen::Index D = series.dim();
  const Eigen::Index F = static_cast<Eigen::Index>(frequencies.size());
  if (2 * F + 1 > N)
    throw std::invalid_argument("project_spectrum: more modes than samples");

  FrequencySpectrum spec;
  std::vector<double> sorted = frequencies;
  std::sort(sorted.begin(), sorted.end());
  for (Eigen::Index i = 0; i + 1 < F; ++i) {
    if (sorted[static_cast<size_t>(i + 1)] - sorted[static_cast<size_t>(i)] < 1e-12)
      spec.conditioning_warning = true;
  }

  // Real cos/sin basis so conjugate symmetry H_{-j} = conj(H_j) is exact.
  Eigen::MatrixXd A(N, 2 * F + 1);
  A.col(0).setOnes();
  for (Eigen::Index j = 0; j < F; ++j) {
    const double om = frequencies[static_cast<size_t>(j)];
    for (Eigen::Index t = 0; t < N; ++t) {
      const double ph = kTwoPi * om * static_cast<double>(t);
      A(t, 1 + 2 * j) = std::cos(ph);
      A(t, 2 + 2 * j) = std::sin(ph);
    }
  }
  // Rank-revealing minimum-norm solve: frequencies too close to resolve over
  // N samples give numerically dependent columns, and an unpivoted QR would
  // assign them huge cancelling coefficients that masquerade as real
  // spectral mass. Truncating at rcond makes such pairs share their (true,
  // typically tiny) amplitude instead.
  auto lsq = linalg::least_squares_minimum_norm(A, series.data, 1e-8);
  if (lsq.rank < 2 * F + 1) spec.conditioning_warning = true;

  spec.mean = lsq.solution.row(0).transpose();
  spec.entries.reserve(static_cast<size_t>(F));
  for (Eigen::Index j = 0; j < F; ++j) {
    SpectrumEntry e;
    e.omega = frequencies[static_cast<size_t>(j)];
    Eigen::VectorXd ca = lsq.solution.row(1 + 2 * j).transpose();
    Eigen::VectorXd cb = lsq.solution.row(2 + 2 * j).transpose();
    // a cos + b sin = H e^{+i phi} + conj(H) e^{-i phi} with H = (a - i b)/2.
    e.amp = (0.5 * ca).cast<std::complex<double>>() -
            std::complex<double>(0, 0.5) * cb.cast<std::complex<double>>();
    e.mag = e.amp.norm();
    spec.entries.push_back(std::move(e));
  }
  std::stable_sort(spec.entries.begin(), spec.entries.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) {
                     return a.mag > b.mag;
                   });
  return spec;
}

}  // namespace toruskit::spectral
