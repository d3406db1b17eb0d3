#include "toruskit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toruskit/linalg.hpp"
#include "toruskit/spectral.hpp"

namespace toruskit::fit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kResonanceTol = 1e-13;

struct ModeClass {
  Eigen::Index index;  // representative mode index in the box
  double freq;         // temporal frequency of the representative
  bool pair;           // false for self-conjugate modes
};

// Conjugate-class representatives of the box, in ascending mode index.
std::vector<ModeClass> conjugate_classes(const ResolutionBox& box,
                                         const Eigen::VectorXd& omega) {
  std::vector<ModeClass> classes;
  const Eigen::Index M = box.mode_count();
  classes.reserve(static_cast<size_t>(M));
  for (Eigen::Index m = 0; m < M; ++m) {
    const Eigen::Index conj = torus::conjugate_index(box, m);
    if (conj < m) continue;
    auto [n, k] = torus::mode_at(box, m);
    classes.push_back({m, torus::mode_frequency(omega, n, k, box.p), conj != m});
  }
  return classes;
}

// All mode frequencies of the box; throws if two collide mod 1 (circularly).
std::vector<double> checked_frequencies(const ResolutionBox& box,
                                        const Eigen::VectorXd& omega) {
  const Eigen::Index M = box.mode_count();
  std::vector<double> freqs;
  freqs.reserve(static_cast<size_t>(M));
  for (Eigen::Index m = 0; m < M; ++m) {
    auto [n, k] = torus::mode_at(box, m);
    freqs.push_back(torus::mode_frequency(omega, n, k, box.p));
  }
  std::vector<double> sorted = freqs;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i + 1] - sorted[i] < kResonanceTol)
      throw std::runtime_error("fourier fit: resonant mode box (degenerate columns)");
  if (sorted.size() > 1 && 1.0 - sorted.back() + sorted.front() < kResonanceTol)
    throw std::runtime_error("fourier fit: resonant mode box (degenerate columns)");
  return freqs;
}

// cos/sin design columns for the given classes over absolute times
// t0..t0+rows-1, rows scaled by `row_scale` (empty = unscaled).
Eigen::MatrixXd build_columns(const std::vector<ModeClass>& classes,
                              Eigen::Index t0, Eigen::Index rows,
                              const Eigen::VectorXd& row_scale) {
  Eigen::Index ncols = 0;
  for (const auto& c : classes) ncols += c.pair ? 2 : 1;
  Eigen::MatrixXd A(rows, ncols);
  Eigen::Index col = 0;
  for (const auto& c : classes) {
    for (Eigen::Index t = 0; t < rows; ++t) {
      const double ph = kTwoPi * c.freq * static_cast<double>(t0 + t);
      A(t, col) = std::cos(ph);
      if (c.pair) A(t, col + 1) = std::sin(ph);
    }
    col += c.pair ? 2 : 1;
  }
  if (row_scale.size() > 0)
    A.array().colwise() *= row_scale.array();
  return A;
}

Eigen::VectorXd fit_weights(Eigen::Index T, bool weighted) {
  if (weighted) return spectral::birkhoff_weights(T);
  return Eigen::VectorXd::Constant(T, 1.0 / static_cast<double>(T));
}

// Scatter real cos/sin solution rows into complex box coefficients.
void assemble_coefficients(FourierTorus& torus, const std::vector<ModeClass>& classes,
                           const Eigen::MatrixXd& X) {
  const Eigen::Index M = torus.box.mode_count();
  torus.coeffs.assign(static_cast<size_t>(M), Eigen::VectorXcd::Zero(torus.D));
  Eigen::Index row = 0;
  for (const auto& c : classes) {
    const Eigen::VectorXd a = X.row(row).transpose();
    if (!c.pair) {
      torus.coeffs[static_cast<size_t>(c.index)] = a.cast<std::complex<double>>();
      row += 1;
      continue;
    }
    const Eigen::VectorXd b = X.row(row + 1).transpose();
    // a cos + b sin = H e^{+i phase} + conj(H) e^{-i phase}, H = (a - i b)/2
    Eigen::VectorXcd H = (0.5 * a).cast<std::complex<double>>() -
                         std::complex<double>(0, 0.5) * b.cast<std::complex<double>>();
    torus.coeffs[static_cast<size_t>(torus::conjugate_index(torus.box, c.index))] =
        H.conjugate();
    torus.coeffs[static_cast<size_t>(c.index)] = std::move(H);
    row += 2;
  }
}

}  // namespace

FourierTorus fourier_least_squares(const ObservableSeries& series,
                                   const Eigen::VectorXd& omega,
                                   const ResolutionBox& box, bool weighted,
                                   Eigen::Index T) {
  if (T < 0) T = series.length();
  if (T > series.length())
    throw std::invalid_argument("fourier_least_squares: T exceeds series length");
  const Eigen::Index M = box.mode_count();
  if (M > T)
    throw std::invalid_argument("fourier_least_squares: more modes than samples");
  checked_frequencies(box, omega);

  const auto classes = conjugate_classes(box, omega);
  const Eigen::VectorXd sw = fit_weights(T, weighted).cwiseSqrt();
  Eigen::MatrixXd A = build_columns(classes, 0, T, sw);
  Eigen::MatrixXd B = series.data.topRows(T);
  B.array().colwise() *= sw.array();

  auto lsq = linalg::least_squares(A, B);

  FourierTorus torus;
  torus.omega = omega;
  torus.box = box;
  torus.D = static_cast<int>(series.dim());
  const double rmin = lsq.r_diag.minCoeff();
  torus.ill_conditioned = rmin <= 0.0 || lsq.r_diag.maxCoeff() / rmin > 1e12;
  assemble_coefficients(torus, classes, lsq.solution);
  return torus;
}

FourierTorus projection_coefficients(const ObservableSeries& series,
                                     const Eigen::VectorXd& omega,
                                     const ResolutionBox& box, bool weighted,
                                     Eigen::Index T) {
  if (T < 0) T = series.length();
  if (T > series.length())
    throw std::invalid_argument("projection_coefficients: T exceeds series length");
  const Eigen::VectorXd w = fit_weights(T, weighted);
  const Eigen::Index M = box.mode_count();

  FourierTorus torus;
  torus.omega = omega;
  torus.box = box;
  torus.D = static_cast<int>(series.dim());
  torus.coeffs.resize(static_cast<size_t>(M));
  for (Eigen::Index m = 0; m < M; ++m) {
    auto [n, k] = torus::mode_at(box, m);
    const double freq = torus::mode_frequency(omega, n, k, box.p);
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(torus.D);
    for (Eigen::Index t = 0; t < T; ++t) {
      const double ph = -kTwoPi * freq * static_cast<double>(t);
      h += (w[t] * std::complex<double>(std::cos(ph), std::sin(ph))) *
           series.data.row(t).transpose().cast<std::complex<double>>();
    }
    torus.coeffs[static_cast<size_t>(m)] = std::move(h);
  }
  return torus;
}

double validation_error(const FourierTorus& torus, const ObservableSeries& series,
                        Eigen::Index t_start, Eigen::Index M) {
  if (t_start < 0 || t_start + M > series.length() || M < 1)
    throw std::invalid_argument("validation_error: row range out of bounds");
  const double p = static_cast<double>(torus.box.p);
  double num = 0.0, den = 0.0;
  for (Eigen::Index t = t_start; t < t_start + M; ++t) {
    const Eigen::VectorXd theta = torus.omega * (static_cast<double>(t) / p);
    const Eigen::VectorXd pred =
        torus::evaluate_torus(torus, theta, static_cast<double>(t) / p);
    num += (pred - series.data.row(t).transpose()).squaredNorm();
    den += series.data.row(t).squaredNorm();
  }
  if (den == 0.0)
    throw std::runtime_error("validation_error: held-out rows are identically zero");
  return std::sqrt(num / den);
}

void extend_qr(QRState& state, const Eigen::MatrixXd& new_cols,
               const Eigen::MatrixXd& B) {
  const Eigen::Index T = new_cols.rows();
  const Eigen::Index M = state.cols();
  const Eigen::Index j = new_cols.cols();
  if (M > 0 && state.Q.rows() != T)
    throw std::invalid_argument("extend_qr: row count mismatch");

  Eigen::MatrixXd R12(M, j);
  Eigen::MatrixXd perp = new_cols;
  if (M > 0) {
    R12.noalias() = state.Q.transpose() * new_cols;
    perp.noalias() -= state.Q * R12;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(perp);
  Eigen::MatrixXd Q2 = qr.householderQ() * Eigen::MatrixXd::Identity(T, j);
  Eigen::MatrixXd R22 =
      qr.matrixQR().topRows(j).triangularView<Eigen::Upper>();

  // Orthogonality drift of the appended block against the existing factor.
  double drift = (Q2.transpose() * Q2 - Eigen::MatrixXd::Identity(j, j))
                     .cwiseAbs()
                     .maxCoeff();
  if (M > 0)
    drift = std::max(drift,
                     (state.Q.transpose() * Q2).cwiseAbs().maxCoeff());

  Eigen::MatrixXd Anew(T, M + j);
  if (M > 0) Anew.leftCols(M) = state.A;
  Anew.rightCols(j) = new_cols;
  state.A = std::move(Anew);

  if (drift > 1e-8) {
    // Loss of orthogonality: refactorize the full design matrix.
    Eigen::HouseholderQR<Eigen::MatrixXd> full(state.A);
    state.Q = full.householderQ() * Eigen::MatrixXd::Identity(T, M + j);
    state.R = full.matrixQR().topRows(M + j).triangularView<Eigen::Upper>();
    state.QtB.noalias() = state.Q.transpose() * B;
    return;
  }

  Eigen::MatrixXd Qnew(T, M + j);
  if (M > 0) Qnew.leftCols(M) = state.Q;
  Qnew.rightCols(j) = Q2;
  state.Q = std::move(Qnew);

  Eigen::MatrixXd Rnew = Eigen::MatrixXd::Zero(M + j, M + j);
  if (M > 0) {
    Rnew.topLeftCorner(M, M) = state.R;
    Rnew.topRightCorner(M, j) = R12;
  }
  Rnew.bottomRightCorner(j, j) = R22;
  state.R = std::move(Rnew);

  Eigen::MatrixXd QtBnew(M + j, B.cols());
  if (M > 0) QtBnew.topRows(M) = state.QtB;
  QtBnew.bottomRows(j).noalias() = Q2.transpose() * B;
  state.QtB = std::move(QtBnew);
}

namespace {

// Representative classes among the modes entering box K + e_dir relative to
// box K (those with |k_dir| = K_dir + 1).
std::vector<ModeClass> entering_classes(const ResolutionBox& grown,
                                        const Eigen::VectorXd& omega,
                                        Eigen::Index dir) {
  std::vector<ModeClass> classes;
  for (const auto& c : conjugate_classes(grown, omega)) {
    auto [n, k] = torus::mode_at(grown, c.index);
    (void)n;
    if (std::abs(k[dir]) == grown.K[dir]) classes.push_back(c);
  }
  return classes;
}

// Throws when any frequency in `incoming` collides (circularly, mod 1) with
// `existing` (sorted) or within itself.
void check_new_frequencies(const std::vector<double>& existing,
                           std::vector<double> incoming) {
  std::sort(incoming.begin(), incoming.end());
  for (size_t i = 0; i + 1 < incoming.size(); ++i)
    if (incoming[i + 1] - incoming[i] < kResonanceTol)
      throw std::runtime_error("adaptive fit: resonant mode box (degenerate columns)");
  auto near = [&](double f) {
    auto it = std::lower_bound(existing.begin(), existing.end(), f - kResonanceTol);
    if (it != existing.end() && *it < f + kResonanceTol) return true;
    // circular wrap
    if (f < kResonanceTol && !existing.empty() && existing.back() > 1.0 - kResonanceTol)
      return true;
    if (f > 1.0 - kResonanceTol && !existing.empty() &&
        existing.front() < kResonanceTol)
      return true;
    return false;
  };
  for (double f : incoming)
    if (near(f))
      throw std::runtime_error("adaptive fit: resonant mode box (degenerate columns)");
}

double qr_validation_residual(const QRState& st, const Eigen::MatrixXd& V,
                              const Eigen::MatrixXd& Bval, double bval_norm) {
  const Eigen::MatrixXd X =
      st.R.triangularView<Eigen::Upper>().solve(st.QtB);
  return (V * X - Bval).norm() / bval_norm;
}

}  // namespace

AdaptiveResult adaptive_parameterize(const ObservableSeries& series,
                                     const Eigen::VectorXd& omega,
                                     double gamma, double eta,
                                     Eigen::Index K_max, int p) {
  if (gamma <= 0.0 || gamma >= 1.0)
    throw std::invalid_argument("adaptive_parameterize: gamma must be in (0,1)");
  if (eta < 1.0) throw std::invalid_argument("adaptive_parameterize: eta must be >= 1");
  const Eigen::Index N = series.length();
  const int d = static_cast<int>(omega.size());
  const Eigen::Index Ttrain =
      static_cast<Eigen::Index>(std::floor((1.0 - gamma) * static_cast<double>(N)));
  const Eigen::Index Mval = N - Ttrain;
  if (Ttrain < p || Mval < 1)
    throw std::invalid_argument("adaptive_parameterize: series too short");

  const Eigen::MatrixXd B = series.data.topRows(Ttrain);
  const Eigen::MatrixXd Bval = series.data.bottomRows(Mval);
  const double bval_norm = Bval.norm();
  if (bval_norm == 0.0)
    throw std::runtime_error("adaptive_parameterize: held-out rows are zero");

  ResolutionBox box;
  box.K = Eigen::VectorXi::Zero(d);
  box.p = p;

  QRState st;
  Eigen::MatrixXd V(Mval, 0);
  std::vector<double> freqs;  // sorted frequencies of all current modes

  auto add_classes = [&](QRState& target, Eigen::MatrixXd& Vtarget,
                         const std::vector<ModeClass>& classes) {
    extend_qr(target, build_columns(classes, 0, Ttrain, Eigen::VectorXd()), B);
    const Eigen::MatrixXd vb =
        build_columns(classes, Ttrain, Mval, Eigen::VectorXd());
    Eigen::MatrixXd Vnew(Mval, Vtarget.cols() + vb.cols());
    Vnew.leftCols(Vtarget.cols()) = Vtarget;
    Vnew.rightCols(vb.cols()) = vb;
    Vtarget = std::move(Vnew);
  };

  {
    const auto base = conjugate_classes(box, omega);
    std::vector<double> incoming;
    for (const auto& c : base) {
      incoming.push_back(c.freq);
      if (c.pair)
        incoming.push_back(torus::mode_frequency(
            omega, (box.p - torus::mode_at(box, c.index).first) % box.p,
            -torus::mode_at(box, c.index).second, box.p));
    }
    check_new_frequencies(freqs, incoming);
    for (double f : incoming) freqs.push_back(f);
    std::sort(freqs.begin(), freqs.end());
    add_classes(st, V, base);
  }

  AdaptiveResult result;
  double resid = qr_validation_residual(st, V, Bval, bval_norm);
  double best_resid = resid;
  Eigen::VectorXi best_K = box.K;
  result.path.emplace_back(box.K, resid);

  const Eigen::Index count_cap = std::min(K_max, Ttrain);
  bool kmax_skip = false;

  while (true) {
    int best_dir = -1;
    double best_cand = std::numeric_limits<double>::infinity();
    std::vector<ModeClass> best_classes;
    std::vector<double> best_incoming;

    for (int j = 0; j < d; ++j) {
      ResolutionBox grown = box;
      grown.K[j] += 1;
      if (grown.mode_count() > count_cap) {
        if (grown.mode_count() <= Ttrain) kmax_skip = true;
        continue;
      }
      const auto classes = entering_classes(grown, omega, j);
      std::vector<double> incoming;
      for (const auto& c : classes) {
        incoming.push_back(c.freq);
        if (c.pair) {
          auto [n, k] = torus::mode_at(grown, c.index);
          incoming.push_back(torus::mode_frequency(
              omega, (grown.p - n) % grown.p, Eigen::VectorXi(-k), grown.p));
        }
      }
      try {
        check_new_frequencies(freqs, incoming);
      } catch (const std::runtime_error&) {
        // growing in this direction would add degenerate columns; skip it
        continue;
      }

      QRState cand = st;
      Eigen::MatrixXd Vcand = V;
      add_classes(cand, Vcand, classes);
      const double r = qr_validation_residual(cand, Vcand, Bval, bval_norm);
      // strict improvement beyond relative round-off; ties keep the lowest j
      if (r < best_cand * (1.0 - 1e-14)) {
        best_cand = r;
        best_dir = j;
        best_classes = classes;
        best_incoming = std::move(incoming);
      }
    }

    if (best_dir < 0 || best_cand >= eta * best_resid) break;

    box.K[best_dir] += 1;
    add_classes(st, V, best_classes);
    for (double f : best_incoming) freqs.push_back(f);
    std::sort(freqs.begin(), freqs.end());
    resid = best_cand;
    result.path.emplace_back(box.K, resid);
    if (resid < best_resid) {
      best_resid = resid;
      best_K = box.K;
    }
  }
  result.kmax_warning = kmax_skip;

  ResolutionBox final_box;
  final_box.K = best_K;
  final_box.p = p;
  ObservableSeries train{series.data.topRows(Ttrain), series.origin, series.source};
  result.torus = fourier_least_squares(train, omega, final_box, false);
  result.torus.R_h = validation_error(result.torus, series, Ttrain, Mval);
  return result;
}

}  // namespace toruskit::fit
