#include "toruskit/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toruskit::rotation {

namespace {

double frac(double x) { return x - std::floor(x); }

double torus_dist(double a, double b) {
  double d = frac(a - b);
  return std::min(d, 1.0 - d);
}

double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// Fraction-free integer determinant (Bareiss), exact for the small label
// matrices used here.
long long int_determinant(Eigen::MatrixXi m) {
  const int n = static_cast<int>(m.rows());
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> a = m.cast<long long>();
  long long sign = 1, prev = 1;
  for (int i = 0; i < n - 1; ++i) {
    if (a(i, i) == 0) {
      int pivot = -1;
      for (int r = i + 1; r < n; ++r)
        if (a(r, i) != 0) { pivot = r; break; }
      if (pivot < 0) return 0;
      a.row(i).swap(a.row(pivot));
      sign = -sign;
    }
    for (int r = i + 1; r < n; ++r)
      for (int c = i + 1; c < n; ++c)
        a(r, c) = (a(r, c) * a(i, i) - a(r, i) * a(i, c)) / prev;
    prev = a(i, i);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace

double log_reg_lower_gamma(double a, double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) {
    // Series representation.
    double ap = a, del = 1.0 / a, sum = del;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
  }
  // Continued fraction for Q(a, x); P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double logQ = -x + a * std::log(x) - std::lgamma(a) + std::log(h);
  const double Q = std::exp(logQ);
  if (Q >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::log1p(-Q);
}

bool ModeLabel::same_mode(const ModeLabel& other, int period) const {
  if (n == other.n && k == other.k) return true;
  const int conj_n = (period - other.n) % period;
  return n == conj_n && k == -other.k;
}

std::pair<double, double> fit_spectral_prior(const std::vector<double>& magnitudes,
                                             int d, int D) {
  const Eigen::Index total = static_cast<Eigen::Index>(magnitudes.size());
  const Eigen::Index J_cr = std::max<Eigen::Index>(2, total / 3);
  const double Vd = unit_ball_volume(d);

  std::vector<double> xs, ys;
  for (Eigen::Index j = 0; j < std::min(J_cr, total); ++j) {
    const double mag = magnitudes[static_cast<size_t>(j)];
    if (mag <= 0.0) continue;
    xs.push_back(std::pow(static_cast<double>(j) / Vd, 1.0 / d));
    ys.push_back(2.0 * std::log(mag));
  }
  if (xs.size() < 2)
    throw std::invalid_argument("fit_spectral_prior: need at least 2 positive magnitudes");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  const double r = std::max(-slope / 2.0, 1e-3);
  const double C = std::sqrt(std::exp(intercept) / static_cast<double>(D));
  return {C, r};
}

int detect_island_period(const std::vector<double>& frequencies, int p_max,
                         double eps_isl) {
  if (p_max < 1) throw std::invalid_argument("detect_island_period: p_max must be >= 1");
  for (int p = 2; p <= p_max; ++p)
    for (int n = 1; n < p; ++n)
      for (double om : frequencies)
        if (torus_dist(om, static_cast<double>(n) / p) < eps_isl) return p;
  return 1;
}

namespace {

struct GridEntry {
  double freq;  // predicted frequency mod 1
  ModeLabel label;
};

std::vector<GridEntry> build_sorted_grid(const Eigen::VectorXd& omega, int P, int p) {
  const int d = static_cast<int>(omega.size());
  std::vector<GridEntry> grid;
  const long long span = 2LL * P + 1;
  long long total = p;
  for (int i = 0; i < d; ++i) total *= span;
  grid.reserve(static_cast<size_t>(total));

  Eigen::VectorXi k = Eigen::VectorXi::Constant(d, -P);
  bool done = false;
  while (!done) {
    const double wk = omega.dot(k.cast<double>());
    for (int n = 0; n < p; ++n) {
      if (n == 0 && k.isZero()) continue;
      GridEntry e;
      e.freq = frac((static_cast<double>(n) + wk) / static_cast<double>(p));
      e.label.n = n;
      e.label.k = k;
      grid.push_back(std::move(e));
    }
    // odometer increment
    int i = 0;
    for (; i < d; ++i) {
      if (k[i] < P) {
        ++k[i];
        break;
      }
      k[i] = -P;
    }
    if (i == d) done = true;
  }
  std::sort(grid.begin(), grid.end(),
            [](const GridEntry& a, const GridEntry& b) { return a.freq < b.freq; });
  return grid;
}

}  // namespace

std::pair<WavenumberLabeling, double> greedy_label(
    const Eigen::VectorXd& omega, const FrequencySpectrum& spectrum,
    const SpectralPrior& prior, int P, Eigen::Index J_0, int p) {
  if (J_0 > spectrum.size())
    throw std::invalid_argument("greedy_label: J_0 exceeds spectrum size");
  if (J_0 < 1) throw std::invalid_argument("greedy_label: J_0 must be >= 1");

  const auto grid = build_sorted_grid(omega, P, p);
  const Eigen::Index G = static_cast<Eigen::Index>(grid.size());
  const double a = 0.5 * prior.D;
  const double H_tail = spectrum.entries[static_cast<size_t>(J_0 - 1)].mag;
  const double lg_a = std::lgamma(a);

  WavenumberLabeling labeling;
  labeling.labels.resize(static_cast<size_t>(J_0));
  double total = 0.0;

  auto score = [&](Eigen::Index j, const GridEntry& g) {
    const double H = std::max(spectrum.entries[static_cast<size_t>(j)].mag, 1e-300);
    const double sigma = prior.C * std::exp(-prior.r * g.label.k.cast<double>().norm());
    const double two_s2 = 2.0 * sigma * sigma;
    const double log_pdf = -a * std::log(two_s2) - lg_a +
                           (prior.D - 2) * std::log(H) - H * H / two_s2;
    const double log_cdf = log_reg_lower_gamma(a, H_tail * H_tail / two_s2);
    const double dist = torus_dist(spectrum.entries[static_cast<size_t>(j)].omega, g.freq);
    const double log_freq = -dist * dist / (2.0 * prior.sigma_omega * prior.sigma_omega);
    return (log_pdf - log_cdf) + log_freq;
  };

  std::vector<ModeLabel> used;
  for (Eigen::Index j = 0; j < J_0; ++j) {
    const double target = spectrum.entries[static_cast<size_t>(j)].omega;
    // First grid entry with freq >= target (the grid is circular in frequency).
    Eigen::Index lo = std::lower_bound(grid.begin(), grid.end(), target,
                                       [](const GridEntry& g, double t) {
                                         return g.freq < t;
                                       }) -
                      grid.begin();

    Eigen::Index window = 5;
    double best = -std::numeric_limits<double>::infinity();
    const GridEntry* best_entry = nullptr;
    while (best_entry == nullptr && window <= G) {
      for (Eigen::Index off = -window; off < window; ++off) {
        const auto& g = grid[static_cast<size_t>(((lo + off) % G + G) % G)];
        bool taken = false;
        for (const auto& u : used)
          if (u.same_mode(g.label, p)) { taken = true; break; }
        if (taken) continue;
        const double s = score(j, g);
        if (s > best) {
          best = s;
          best_entry = &g;
        }
      }
      window *= 2;
    }
    if (best_entry == nullptr)
      throw std::runtime_error("greedy_label: wavenumber grid exhausted");
    labeling.labels[static_cast<size_t>(j)] = best_entry->label;
    used.push_back(best_entry->label);
    total += best;
  }
  return {labeling, total};
}

int default_grid_bound(Eigen::Index J_0, int d) {
  return static_cast<int>(
      std::ceil(10.0 * std::pow(static_cast<double>(J_0), 1.0 / d)));
}

RotationEstimate estimate_rotation_vector(const FrequencySpectrum& spectrum,
                                          int d, Eigen::Index J_0,
                                          const SpectralPrior& prior, int P,
                                          int p, double eps_map) {
  Eigen::Index J0 = std::min<Eigen::Index>(J_0, spectrum.size());
  if (J0 < d)
    throw std::invalid_argument("estimate_rotation_vector: need at least d frequencies");
  // Trim so the weakest retained magnitude stays above eps_map * H_1.
  const double H1 = spectrum.entries[0].mag;
  while (J0 > d &&
         spectrum.entries[static_cast<size_t>(J0 - 1)].mag <= eps_map * H1)
    --J0;

  RotationEstimate best;
  bool found = false;

  std::vector<Eigen::Index> idx(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) idx[static_cast<size_t>(i)] = i;

  auto advance = [&]() {
    int i = d - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == J0 - d + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < d; ++j)
      idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    return true;
  };

  do {
    Eigen::VectorXd omega(d);
    for (int i = 0; i < d; ++i) {
      const double om = spectrum.entries[static_cast<size_t>(idx[static_cast<size_t>(i)])].omega;
      omega[i] = p > 1 ? frac(p * om) : om;
    }
    auto [labeling, logpost] = greedy_label(omega, spectrum, prior, P, J0, p);

    Eigen::MatrixXi L(d, d);
    for (int i = 0; i < d; ++i)
      L.row(i) = labeling.labels[static_cast<size_t>(idx[static_cast<size_t>(i)])]
                     .k.transpose();
    const long long det = int_determinant(L);
    if (det != 1 && det != -1) continue;
    if (!found || logpost > best.log_posterior) {
      found = true;
      best.omega = omega;
      best.labeling = std::move(labeling);
      best.log_posterior = logpost;
      best.source_rows = L;
      best.det = det;
      best.period = p;
      best.source_indices = idx;
    }
  } while (advance());

  if (!found)
    throw std::runtime_error(
        "estimate_rotation_vector: no candidate passed the det +-1 validity test");
  return best;
}

}  // namespace toruskit::rotation
