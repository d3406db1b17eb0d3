#include "toruskit/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "toruskit/csv.hpp"
#include "toruskit/fit.hpp"
#include "toruskit/lattice.hpp"
#include "toruskit/linalg.hpp"
#include "toruskit/rotation.hpp"
#include "toruskit/spectral.hpp"
#include "toruskit/validation.hpp"

namespace toruskit::pipeline {

using dynamics::MapConfig;
using dynamics::MapKind;
using dynamics::ObservableSeries;
using dynamics::PhaseState;

// ---------------------------------------------------------------- config --

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key()))
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " +
                                  where);
}

MapConfig map_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"kind", "K_sm", "mu", "eps", "substeps",
                       "observable_radius", "singularity_floor"},
                      "map");
  MapConfig m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "coupled_standard_map")
    m.kind = MapKind::coupled_standard_map;
  else if (kind == "er3bp_planar")
    m.kind = MapKind::er3bp_planar;
  else if (kind == "er3bp_spatial")
    m.kind = MapKind::er3bp_spatial;
  else
    throw std::invalid_argument("config: unknown map kind \"" + kind + "\"");
  if (j.contains("K_sm")) {
    const auto rows = j.at("K_sm").get<std::vector<std::vector<double>>>();
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
      throw std::invalid_argument("config: K_sm must be a 2x2 matrix");
    m.K_sm << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
  }
  m.mu = j.value("mu", m.mu);
  m.eps = j.value("eps", m.eps);
  m.substeps = j.value("substeps", m.substeps);
  m.observable_radius = j.value("observable_radius", m.observable_radius);
  m.singularity_floor = j.value("singularity_floor", m.singularity_floor);
  m.validate();
  return m;
}

PhaseState state_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"q", "p"}, "x0");
  const auto q = j.at("q").get<std::vector<double>>();
  const auto p = j.at("p").get<std::vector<double>>();
  return PhaseState(
      Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size())),
      Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
}

}  // namespace

void PipelineConfig::validate() const {
  if (map.has_value() == !trajectory_path.empty())
    throw std::invalid_argument(
        "config: exactly one of \"map\" and \"trajectory\" is required");
  if (!map.has_value() && d < 1)
    throw std::invalid_argument("config: \"d\" is required for external trajectories");
  if (ladder.empty()) throw std::invalid_argument("config: ladder must be nonempty");
  for (size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i].J < 1 || ladder[i].T < 1)
      throw std::invalid_argument("config: ladder entries must be positive");
    if (i > 0 && ladder[i].points() < ladder[i - 1].points())
      throw std::invalid_argument("config: ladder must be nondecreasing");
  }
  if (classify_tol <= 0 || sigma_omega <= 0 || eps_map <= 0 || eps_isl <= 0 ||
      delta_res <= 0 || eta < 1 || gamma_split <= 0 || gamma_split >= 1 ||
      gamma_P <= 0 || J0 < 1 || K_max < 1 || p_max < 1 || kam_grid < 2 ||
      stride < 1 || P < 0)
    throw std::invalid_argument("config: tolerances and sizes must be positive");
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(
      j,
      {"map", "trajectory", "x0", "d", "ladder", "classify_tol", "J0",
       "sigma_omega", "eps_map", "gamma_P", "P", "K_max", "eta", "gamma_split",
       "p_max", "eps_isl", "delta_res", "kam_grid", "seed", "stride"},
      "config");
  PipelineConfig c;
  if (j.contains("map")) c.map = map_from_json(j.at("map"));
  c.trajectory_path = j.value("trajectory", std::string());
  if (j.contains("x0")) c.x0 = state_from_json(j.at("x0"));
  c.d = j.value("d", c.d);
  if (j.contains("ladder")) {
    c.ladder.clear();
    for (const auto& rung : j.at("ladder")) {
      const auto pair = rung.get<std::vector<Eigen::Index>>();
      if (pair.size() != 2)
        throw std::invalid_argument("config: ladder entries must be [J, T] pairs");
      c.ladder.push_back({pair[0], pair[1]});
    }
  }
  c.classify_tol = j.value("classify_tol", c.classify_tol);
  c.J0 = j.value("J0", c.J0);
  c.sigma_omega = j.value("sigma_omega", c.sigma_omega);
  c.eps_map = j.value("eps_map", c.eps_map);
  c.gamma_P = j.value("gamma_P", c.gamma_P);
  c.P = j.value("P", c.P);
  c.K_max = j.value("K_max", c.K_max);
  c.eta = j.value("eta", c.eta);
  c.gamma_split = j.value("gamma_split", c.gamma_split);
  c.p_max = j.value("p_max", c.p_max);
  c.eps_isl = j.value("eps_isl", c.eps_isl);
  c.delta_res = j.value("delta_res", c.delta_res);
  c.kam_grid = j.value("kam_grid", c.kam_grid);
  c.seed = j.value("seed", c.seed);
  c.stride = j.value("stride", c.stride);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

// ---------------------------------------------------------------- report --

std::string classification_label(Classification c, int p) {
  switch (c) {
    case Classification::torus:
      return "torus";
    case Classification::island:
      return "island(" + std::to_string(p) + ")";
    default:
      return "not_converged";
  }
}

nlohmann::json TorusReport::to_json(bool include_torus) const {
  nlohmann::json j;
  j["classification"] = classification_label(classification, p);
  j["p"] = p;
  nlohmann::json rungs = nlohmann::json::array();
  for (const auto& r : ladder)
    rungs.push_back({{"J", r.J}, {"T", r.T}, {"N", r.N},
                     {"R_RRE", r.R_RRE}, {"R_WBA", r.R_WBA}});
  j["ladder"] = std::move(rungs);
  if (N > 0) {
    j["J"] = J;
    j["T"] = T;
    j["N"] = N;
    j["R_RRE"] = R_RRE;
    j["R_WBA"] = R_WBA;
  }
  if (omega.size() > 0) {
    j["omega"] = std::vector<double>(omega.data(), omega.data() + omega.size());
    j["L_MAP"] = L_MAP;
    j["det"] = det;
    nlohmann::json Lrows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < L.rows(); ++r)
      Lrows.push_back(std::vector<int>(L.row(r).begin(), L.row(r).end()));
    j["L"] = std::move(Lrows);
  }
  if (K.size() > 0) {
    j["K"] = std::vector<int>(K.data(), K.data() + K.size());
    j["R_h"] = R_h;
  }
  if (R_KAM) j["R_KAM"] = *R_KAM;
  if (M_delta) j["M_delta"] = *M_delta;
  j["warnings"] = warnings;
  nlohmann::json times = nlohmann::json::array();
  for (const auto& t : timings)
    times.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  j["timings"] = std::move(times);
  if (include_torus && fit) j["torus"] = torus::torus_to_json(*fit);
  return j;
}

// -------------------------------------------------------------- pipeline --

namespace {

class StageClock {
 public:
  explicit StageClock(TorusReport& rep) : rep_(rep) {}
  template <typename Fn>
  void run(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    rep_.timings.push_back(
        {stage, std::chrono::duration<double>(t1 - t0).count()});
  }

 private:
  TorusReport& rep_;
};

ObservableSeries acquire_series(const PipelineConfig& config,
                                const std::optional<PhaseState>& x0) {
  if (!config.trajectory_path.empty())
    return csv::read_series(config.trajectory_path);
  const PhaseState start = x0 ? *x0
                              : (config.x0 ? *config.x0
                                           : throw std::invalid_argument(
                                                 "pipeline: no initial state given"));
  Eigen::Index need = 0;
  for (const auto& rung : config.ladder) need = std::max(need, rung.points());
  if (config.stride == 1)
    return dynamics::generate_series(*config.map, start, need);
  // subsample hook: record every stride-th iterate
  ObservableSeries series;
  series.origin = start;
  series.source = "map";
  series.data.resize(need, config.map->observable_dim());
  PhaseState state = start;
  for (Eigen::Index t = 0; t < need; ++t) {
    series.data.row(t) = dynamics::observe(state, *config.map).transpose();
    for (int s = 0; s < config.stride; ++s)
      state = dynamics::apply_map(state, *config.map);
  }
  return series;
}

double wba_on_prefix(const ObservableSeries& series, Eigen::Index n) {
  const Eigen::Index even = (n / 2) * 2;
  ObservableSeries prefix{series.data.topRows(even), {}, series.source};
  return spectral::wba_residual(prefix);
}

// Fallback for trajectories with no measurable oscillation (fixed points):
// constant fit with omega = 0.
void constant_fit(TorusReport& rep, const ObservableSeries& sub,
                  const PipelineConfig& config, int d) {
  rep.omega = Eigen::VectorXd::Zero(d);
  torus::ResolutionBox box;
  box.K = Eigen::VectorXi::Zero(d);
  const Eigen::Index Ttrain = static_cast<Eigen::Index>(
      std::floor((1.0 - config.gamma_split) * static_cast<double>(sub.length())));
  auto torus_fit = fit::fourier_least_squares(sub, rep.omega, box, false, Ttrain);
  torus_fit.R_h = fit::validation_error(torus_fit, sub, Ttrain,
                                        sub.length() - Ttrain);
  rep.K = box.K;
  rep.R_h = torus_fit.R_h;
  rep.fit = std::move(torus_fit);
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> observable_step(
    const MapConfig& map, int stride) {
  return [map, stride](const Eigen::VectorXd& h) -> Eigen::VectorXd {
    PhaseState state;
    if (map.kind == MapKind::coupled_standard_map) {
      state = dynamics::unembed_standard_map(Eigen::Vector4d(h),
                                             map.observable_radius);
    } else {
      const Eigen::Index n = h.size() / 2;
      state = PhaseState(h.head(n), h.tail(n));
    }
    for (int s = 0; s < stride; ++s) state = dynamics::apply_map(state, map);
    return dynamics::observe(state, map);
  };
}

}  // namespace

TorusReport run_pipeline(const PipelineConfig& config,
                         const std::optional<PhaseState>& x0,
                         bool classify_only) {
  config.validate();
  TorusReport rep;
  StageClock clock(rep);

  ObservableSeries series;
  try {
    clock.run("trajectory", [&] { series = acquire_series(config, x0); });
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("trajectory: ") + e.what());
    return rep;
  }
  const int d = config.map ? config.map->state_dim() : config.d;
  const int D = static_cast<int>(series.dim());

  // --- classification over the (J,T) ladder
  spectral::RREFilter filter;
  bool classified = false;
  try {
    clock.run("classify", [&] {
      for (const auto& rung : config.ladder) {
        if (series.length() < rung.points()) {
          rep.warnings.push_back("classify: series too short for ladder rung J=" +
                                 std::to_string(rung.J));
          continue;
        }
        auto f = spectral::solve_rre_filter(series, rung.J, rung.T);
        RungRecord rec{rung.J, rung.T, rung.points(), f.residual,
                       wba_on_prefix(series, rung.points())};
        rep.ladder.push_back(rec);
        rep.J = rec.J;
        rep.T = rec.T;
        rep.N = rec.N;
        rep.R_RRE = rec.R_RRE;
        rep.R_WBA = rec.R_WBA;
        if (f.rank_warning)
          rep.warnings.push_back("classify: rank-deficient filter system");
        if (f.residual < config.classify_tol) {
          filter = std::move(f);
          classified = true;
          break;
        }
      }
    });
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("classify: ") + e.what());
    return rep;
  }
  if (!classified) {
    rep.classification = Classification::not_converged;
    return rep;
  }
  rep.classification = Classification::torus;
  if (classify_only) return rep;

  const ObservableSeries sub{series.data.topRows(rep.N), series.origin,
                             series.source};

  // --- frequency spectrum
  std::vector<double> freqs;
  spectral::FrequencySpectrum spectrum;
  try {
    clock.run("frequencies", [&] {
      freqs = spectral::extract_frequencies(filter);
      spectrum = spectral::project_spectrum(sub, freqs);
      if (spectrum.conditioning_warning)
        rep.warnings.push_back("frequencies: near-duplicate frequencies in projection");
    });
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("frequencies: ") + e.what());
    return rep;
  }

  const double mean_scale = std::max(spectrum.mean.size() > 0 ? spectrum.mean.norm() : 0.0, 1e-300);
  const bool degenerate =
      spectrum.size() == 0 || spectrum.entries[0].mag <= 1e-12 * mean_scale;
  if (degenerate) {
    // fixed point: constant parameterization
    rep.warnings.push_back("rotation: no significant oscillatory content; constant fit");
    try {
      clock.run("fit", [&] { constant_fit(rep, sub, config, d); });
      clock.run("validate", [&] {
        if (config.map)
          rep.R_KAM = validation::kam_residual(
              *rep.fit, observable_step(*config.map, config.stride),
              {config.kam_grid});
        rep.M_delta = validation::resonance_order(rep.omega, config.delta_res, 50)
                          .value_or(51);
      });
    } catch (const std::exception& e) {
      rep.warnings.push_back(std::string("fit: ") + e.what());
    }
    return rep;
  }

  // --- island period
  int p = 1;
  clock.run("island", [&] {
    p = rotation::detect_island_period(freqs, config.p_max, config.eps_isl);
  });
  rep.p = p;
  if (p > 1) rep.classification = Classification::island;

  // --- rotation vector (MAP)
  rotation::RotationEstimate est;
  try {
    clock.run("rotation", [&] {
      const Eigen::Index J0e =
          std::min<Eigen::Index>(config.J0, spectrum.size());
      if (J0e < d)
        throw std::runtime_error("spectrum has fewer frequencies than torus dimension");
      // Decay-rate fit uses a third of the full extracted spectrum, not just
      // the J0 entries that enter the MAP search: the tail determines the
      // analytic decay far better than the leading peaks.
      const Eigen::Index J_Cr =
          std::max<Eigen::Index>(2, spectrum.size() / 3);
      std::vector<double> mags;
      for (Eigen::Index i = 0; i < std::min(J_Cr, spectrum.size()); ++i)
        mags.push_back(spectrum.entries[static_cast<size_t>(i)].mag);
      auto [C, r] = rotation::fit_spectral_prior(mags, d, D);
      rotation::SpectralPrior prior{C, r, config.sigma_omega, D};
      const int P = config.P > 0
                        ? config.P
                        : static_cast<int>(std::ceil(
                              config.gamma_P *
                              std::pow(static_cast<double>(J0e), 1.0 / d)));
      est = rotation::estimate_rotation_vector(spectrum, d, J0e, prior, P, p,
                                               config.eps_map);
    });
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("rotation: ") + e.what());
    return rep;
  }
  rep.L_MAP = est.log_posterior;
  rep.L = est.source_rows;
  rep.det = est.det;

  // --- lattice canonicalization
  Eigen::VectorXd omega_canon = est.omega;
  try {
    clock.run("canonicalize", [&] {
      auto metric = lattice::averaged_metric(spectrum, est.labeling, p);
      if (metric.rank_warning)
        rep.warnings.push_back(
            "canonicalize: averaged metric is rank deficient");
      auto A = lattice::kz_reduce(metric);
      auto [A2, w] = lattice::canonicalize_rotation(A, est.omega);
      omega_canon = w;
    });
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("canonicalize: ") + e.what() +
                           " (keeping uncanonicalized rotation)");
    lattice::UnimodularTransform identity;
    identity.A = Eigen::MatrixXi::Identity(d, d);
    auto [A2, w] = lattice::canonicalize_rotation(identity, est.omega);
    omega_canon = w;
  }
  rep.omega = omega_canon;

  // --- adaptive Fourier fit
  try {
    clock.run("fit", [&] {
      auto ar = fit::adaptive_parameterize(sub, omega_canon, config.gamma_split,
                                           config.eta, config.K_max, p);
      if (ar.kmax_warning)
        rep.warnings.push_back("fit: resolution bound halted the descent");
      if (ar.torus.ill_conditioned)
        rep.warnings.push_back("fit: ill-conditioned design matrix");
      rep.K = ar.torus.box.K;
      rep.R_h = ar.torus.R_h;
      rep.fit = std::move(ar.torus);
    });
  } catch (const std::exception& e) {
    rep.warnings.push_back(std::string("fit: ") + e.what());
    return rep;
  }

  // --- validation metrics
  clock.run("validate", [&] {
    if (config.map) {
      try {
        rep.R_KAM = validation::kam_residual(
            *rep.fit, observable_step(*config.map, config.stride),
            {config.kam_grid});
      } catch (const std::exception& e) {
        rep.warnings.push_back(std::string("validate: ") + e.what());
      }
    } else {
      rep.warnings.push_back(
          "validate: R_KAM unavailable for external observables");
    }
    rep.M_delta =
        validation::resonance_order(rep.omega, config.delta_res, 50).value_or(51);
  });
  return rep;
}

// ----------------------------------------------------------------- batch --

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double sample_uniform(unsigned long long seed, unsigned long long index,
                      unsigned long long draw) {
  const uint64_t key = splitmix64(seed ^ 0x6A09E667F3BCC908ULL);
  const uint64_t v = splitmix64(key + splitmix64(index * 0x100000001B3ULL + draw));
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

PhaseState batch_sample(unsigned long long seed, unsigned long long index) {
  Eigen::VectorXd q(2), p(2);
  q << sample_uniform(seed, index, 0), sample_uniform(seed, index, 1);
  p << sample_uniform(seed, index, 2), sample_uniform(seed, index, 3);
  return PhaseState(q, p);
}

namespace {

std::string csv_opt(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

std::string join_warnings(const std::vector<std::string>& w) {
  std::string out;
  for (const auto& s : w) {
    if (!out.empty()) out += ';';
    std::string clean = s;
    for (char& c : clean)
      if (c == ',' || c == '\n') c = ' ';
    out += clean;
  }
  return out;
}

}  // namespace

BatchResult batch_run(const PipelineConfig& config, int n_samples,
                      unsigned long long seed, const std::string& out_dir) {
  if (n_samples < 1)
    throw std::invalid_argument("batch_run: n_samples must be >= 1");
  std::filesystem::create_directories(out_dir);

  BatchResult result;
  result.reports.resize(static_cast<size_t>(n_samples));

  linalg::set_blas_threads(1);
  const unsigned workers = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(n_samples)));
  std::atomic<int> next{0};
  auto work = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_samples) return;
      result.reports[static_cast<size_t>(i)] =
          run_pipeline(config, batch_sample(seed, static_cast<unsigned>(i)));
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const int d = config.map ? config.map->state_dim() : config.d;

  // per-trajectory reports
  for (int i = 0; i < n_samples; ++i) {
    std::ofstream out(out_dir + "/report_" + std::to_string(i) + ".json");
    out << result.reports[static_cast<size_t>(i)].to_json().dump(2) << "\n";
  }

  // batch.csv
  {
    std::ofstream out(out_dir + "/batch.csv");
    out << "index,class,R_RRE";
    for (int i = 0; i < d; ++i) out << ",omega_" << (i + 1);
    out << ",L_MAP";
    for (int i = 0; i < d; ++i) out << ",K_" << (i + 1);
    out << ",R_h,R_KAM,M_delta,warnings\n";
    for (int i = 0; i < n_samples; ++i) {
      const auto& r = result.reports[static_cast<size_t>(i)];
      out << i << "," << classification_label(r.classification, r.p) << ","
          << csv::format_double(r.R_RRE);
      for (int k = 0; k < d; ++k)
        out << "," << (r.omega.size() == d ? csv::format_double(r.omega[k]) : "");
      out << "," << (std::isnan(r.L_MAP) ? "" : csv::format_double(r.L_MAP));
      for (int k = 0; k < d; ++k)
        out << "," << (r.K.size() == d ? std::to_string(r.K[k]) : "");
      out << "," << (std::isnan(r.R_h) ? "" : csv::format_double(r.R_h));
      out << "," << csv_opt(r.R_KAM);
      out << "," << (r.M_delta ? std::to_string(*r.M_delta) : "");
      out << "," << join_warnings(r.warnings) << "\n";
    }
  }

  // rre_vs_N.csv (classification-vs-length plot data)
  {
    std::ofstream out(out_dir + "/rre_vs_N.csv");
    out << "index,N,R_RRE,R_WBA\n";
    for (int i = 0; i < n_samples; ++i)
      for (const auto& rec : result.reports[static_cast<size_t>(i)].ladder)
        out << i << "," << rec.N << "," << csv::format_double(rec.R_RRE) << ","
            << csv::format_double(rec.R_WBA) << "\n";
  }

  // resid_scatter.csv (fit-vs-KAM residual plot data)
  {
    std::ofstream out(out_dir + "/resid_scatter.csv");
    out << "index,R_h,R_KAM,M_delta\n";
    for (int i = 0; i < n_samples; ++i) {
      const auto& r = result.reports[static_cast<size_t>(i)];
      if (std::isnan(r.R_h) || !r.R_KAM) continue;
      out << i << "," << csv::format_double(r.R_h) << ","
          << csv::format_double(*r.R_KAM) << ","
          << (r.M_delta ? std::to_string(*r.M_delta) : "") << "\n";
    }
  }

  // summary.json
  int classified = 0, wba_classified = 0, rkam_ok = 0, rkam_avail = 0;
  std::map<int, int> rkam_hist;  // decade -> count
  for (const auto& r : result.reports) {
    const bool is_classified = r.classification != Classification::not_converged;
    if (is_classified) ++classified;
    if (!r.ladder.empty() && r.ladder.back().R_WBA < config.classify_tol)
      ++wba_classified;
    if (r.R_KAM) {
      ++rkam_avail;
      if (*r.R_KAM < 1e-3) ++rkam_ok;
      const int decade = static_cast<int>(
          std::floor(std::log10(std::max(*r.R_KAM, 1e-300))));
      ++rkam_hist[decade];
    }
  }
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [decade, count] : rkam_hist)
    hist["1e" + std::to_string(decade)] = count;
  result.summary = {
      {"n_samples", n_samples},
      {"seed", seed},
      {"classified", classified},
      {"classified_fraction",
       static_cast<double>(classified) / static_cast<double>(n_samples)},
      {"wba_classified", wba_classified},
      {"R_KAM_available", rkam_avail},
      {"R_KAM_below_1e-3", rkam_ok},
      {"R_KAM_histogram", hist},
  };
  std::ofstream out(out_dir + "/summary.json");
  out << result.summary.dump(2) << "\n";
  return result;
}

}  // namespace toruskit::pipeline
