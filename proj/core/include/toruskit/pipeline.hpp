#pragma once

// End-to-end orchestration: classification by the extrapolation residual over
// a (J,T) ladder, rotation-vector inference, lattice canonicalization,
// adaptive Fourier fit, validation metrics, and seeded batch sweeps.

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "toruskit/dynamics.hpp"
#include "toruskit/torus.hpp"

namespace toruskit::pipeline {

struct LadderRung {
  Eigen::Index J = 0;
  Eigen::Index T = 0;
  Eigen::Index points() const { return T + 2 * J + 1; }
};

struct PipelineConfig {
  std::optional<dynamics::MapConfig> map;
  std::string trajectory_path;  // external series (exclusive with map)
  std::optional<dynamics::PhaseState> x0;
  int d = 0;  // torus dimension override (required for external series)

  std::vector<LadderRung> ladder = {{1000, 2000}, {1500, 3000}, {2000, 4000}};
  double classify_tol = 5e-14;
  int J0 = 30;
  double sigma_omega = 1e-10;
  double eps_map = 1e-3;
  double gamma_P = 10.0;  // wavenumber grid bound P = ceil(gamma_P * J0^{1/d})
  int P = 0;              // explicit grid bound (0: derive from gamma_P)
  Eigen::Index K_max = 2000;
  double eta = 10.0;
  double gamma_split = 0.05;
  int p_max = 10;
  double eps_isl = 1e-8;
  double delta_res = 1e-4;
  int kam_grid = 25;
  unsigned long long seed = 0;
  int stride = 1;  // subsample hook: use F^stride as the map

  void validate() const;
  static PipelineConfig from_json(const nlohmann::json& j);  // unknown keys error
  static PipelineConfig from_file(const std::string& path);
};

enum class Classification { torus, island, not_converged };

std::string classification_label(Classification c, int p);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RungRecord {
  Eigen::Index J = 0, T = 0, N = 0;
  double R_RRE = 0.0;
  double R_WBA = 0.0;
};

struct TorusReport {
  Classification classification = Classification::not_converged;
  int p = 1;
  std::vector<RungRecord> ladder;  // every rung evaluated
  Eigen::Index J = 0, T = 0, N = 0;  // chosen rung
  double R_RRE = std::numeric_limits<double>::quiet_NaN();
  double R_WBA = std::numeric_limits<double>::quiet_NaN();

  Eigen::VectorXd omega;  // canonical rotation vector
  double L_MAP = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXi L;      // label rows of the chosen spectral pair
  long long det = 0;
  Eigen::VectorXi K;
  double R_h = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> R_KAM;
  std::optional<int> M_delta;

  std::optional<torus::FourierTorus> fit;
  std::vector<std::string> warnings;
  std::vector<StageTiming> timings;

  nlohmann::json to_json(bool include_torus = true) const;
};

/// Full pipeline on one trajectory; stage errors are recorded as warnings
/// (later stages are skipped), never thrown. `classify_only` stops after the
/// ladder walk.
TorusReport run_pipeline(const PipelineConfig& config,
                         const std::optional<dynamics::PhaseState>& x0,
                         bool classify_only = false);

/// Counter-based uniform sample in [0,1): deterministic in (seed, index, draw)
/// and independent of evaluation order.
double sample_uniform(unsigned long long seed, unsigned long long index,
                      unsigned long long draw);

/// Initial condition of batch item `index`: (x, y) in T^2 x [0,1]^2.
dynamics::PhaseState batch_sample(unsigned long long seed,
                                  unsigned long long index);

struct BatchResult {
  std::vector<TorusReport> reports;  // sorted by sample index
  nlohmann::json summary;
};

/// Runs n_samples pipelines on seeded random initial conditions and writes
/// report_<i>.json, batch.csv, rre_vs_N.csv, resid_scatter.csv, and
/// summary.json into out_dir. Deterministic for a fixed (config, seed).
BatchResult batch_run(const PipelineConfig& config, int n_samples,
                      unsigned long long seed, const std::string& out_dir);

}  // namespace toruskit::pipeline
