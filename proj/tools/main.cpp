// toruskit command line: run / classify a single trajectory or sweep a batch
// of random initial conditions.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <fstream>
#include <iostream>

#include "toruskit/pipeline.hpp"

namespace {

using toruskit::dynamics::PhaseState;
using toruskit::pipeline::PipelineConfig;

std::optional<PhaseState> parse_x0(const std::vector<double>& flat) {
  if (flat.empty()) return std::nullopt;
  if (flat.size() % 2 != 0)
    throw CLI::ValidationError("--x0 needs an even number of values (q then p)");
  const Eigen::Index n = static_cast<Eigen::Index>(flat.size()) / 2;
  return PhaseState(Eigen::Map<const Eigen::VectorXd>(flat.data(), n),
                    Eigen::Map<const Eigen::VectorXd>(flat.data() + n, n));
}

int run_single(const std::string& config_path, const std::vector<double>& x0_flat,
               const std::string& out_path, bool classify_only) {
  const auto config = PipelineConfig::from_file(config_path);
  const auto report =
      toruskit::pipeline::run_pipeline(config, parse_x0(x0_flat), classify_only);
  const auto j = report.to_json();
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot open " << out_path << "\n";
      return 1;
    }
    out << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant torus extraction from single trajectories"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir = ".";
  std::vector<double> x0_flat;
  int n_samples = 1;
  long long seed = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "full pipeline on one trajectory");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--x0", x0_flat, "initial state (q components then p components)");
  run->add_option("--out", out_path, "write report JSON here (default: stdout)");

  auto* classify =
      app.add_subcommand("classify", "stop after the extrapolation residual");
  classify->add_option("--config", config_path, "JSON config file")->required();
  classify->add_option("--x0", x0_flat,
                       "initial state (q components then p components)");
  classify->add_option("--out", out_path, "write report JSON here (default: stdout)");

  auto* batch = app.add_subcommand("batch", "seeded sweep over random samples");
  batch->add_option("--config", config_path, "JSON config file")->required();
  batch->add_option("--n", n_samples, "number of samples")->required();
  batch->add_option("--seed", seed, "sample stream seed")
      ->required()
      ->each([&](const std::string&) { seed_given = true; });
  batch->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_single(config_path, x0_flat, out_path, false);
    if (classify->parsed())
      return run_single(config_path, x0_flat, out_path, true);
    if (batch->parsed()) {
      (void)seed_given;
      const auto config = PipelineConfig::from_file(config_path);
      const auto result = toruskit::pipeline::batch_run(
          config, n_samples, static_cast<unsigned long long>(seed), out_dir);
      std::cout << result.summary.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
