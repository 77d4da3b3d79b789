// Experiment driver behind the command-line tool: single-realization
// trajectories, Monte-Carlo leakage statistics and traffic reports, all
// written as CSV (plus a JSON aggregate for Monte-Carlo runs).
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mpia/distsim.hpp"
#include "mpia/factor_graph.hpp"
#include "mpia/scheduler.hpp"

namespace mpia {

enum class Algorithm { mpia, ilm, both };

std::string_view algorithm_name(Algorithm alg);
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  int K = 3;
  int N = 4;
  int M = 4;
  int d = 2;
  Algorithm algorithm = Algorithm::both;
  std::string schedule = "regular";  // "regular", "ilm" or a schedule file path (message passing only)
  InitMode init_mode = InitMode::random;  // message passing only; ILM always starts from zero
  int max_outer_iters = 100;
  double leakage_tol = 1e-10;
  int inner_max_iters = 50;
  double inner_tol = 1e-10;
  bool warm_start = true;
  int num_realizations = 1;
  std::uint64_t seed = 1;
  std::string connectivity;  // optional mask file: K rows of K 0/1 entries
  std::filesystem::path output_dir = ".";
  int threads = 1;
  bool save_trajectories = false;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Reads a K x K whitespace-separated 0/1 mask; '#' starts a comment.
ConnectivityMask load_mask_file(const std::string& path, int K);

Schedule resolve_schedule(const std::string& spec);

struct RealizationResult {
  int realization_id = 0;
  Algorithm algorithm = Algorithm::mpia;
  double final_leakage = 0.0;
  int iterations_run = 0;
  bool converged = false;
  std::vector<double> trajectory;
};

struct EcdfPoint {
  double leakage;
  double probability;
};

struct AlgorithmAggregate {
  Algorithm algorithm = Algorithm::mpia;
  int realizations = 0;
  int converged = 0;
  double geometric_mean_leakage = 0.0;
  std::vector<EcdfPoint> ecdf;
};

struct ExperimentResult {
  std::vector<RealizationResult> realizations;  // ordered by (realization_id, algorithm)
  std::vector<AlgorithmAggregate> aggregates;
};

/// exp(mean(ln x)) with each x floored at 1e-300.
double geometric_mean(const std::vector<double>& values);

/// Sorted (value, k/n) pairs, k = 1..n.
std::vector<EcdfPoint> empirical_cdf(std::vector<double> values);

/// Runs the configured algorithm(s) on one channel realization. ILM runs
/// the ILM schedule from zero messages on the same channel draw.
std::vector<RealizationResult> run_realization(const ExperimentConfig& cfg, int realization_id);

/// Realization 0 of the configured seed; writes trajectory.csv.
ExperimentResult run_single(const ExperimentConfig& cfg);

/// num_realizations independent draws; writes final_leakage.csv,
/// aggregate.json and, when save_trajectories is set, trajectories.csv.
ExperimentResult run_montecarlo(const ExperimentConfig& cfg);

/// Traffic of the configured schedule over max_outer_iters iterations;
/// writes traffic.csv.
TrafficReport run_distsim_report(const ExperimentConfig& cfg);

}  // namespace mpia
