#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mpia/harness.hpp"

using namespace mpia;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mpia_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.output_dir = dir;
  cfg.max_outer_iters = 20;
  cfg.num_realizations = 6;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST(Harness, SingleIterationGivesOneRowPerAlgorithm) {
  auto cfg = small_config(scratch("single1"));
  cfg.max_outer_iters = 1;
  run_single(cfg);
  const auto rows = read_csv(cfg.output_dir / "trajectory.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"realization_id", "algorithm", "iteration", "total_leakage"}));
  EXPECT_EQ(rows[1][1], "mpia");
  EXPECT_EQ(rows[2][1], "ilm");
  EXPECT_EQ(rows[1][2], "1");
}

TEST(Harness, TrajectoryMatchesResult) {
  auto cfg = small_config(scratch("single2"));
  cfg.algorithm = Algorithm::mpia;
  const auto res = run_single(cfg);
  const auto rows = read_csv(cfg.output_dir / "trajectory.csv");
  ASSERT_EQ(res.realizations.size(), 1u);
  ASSERT_EQ(rows.size(), 1 + res.realizations[0].trajectory.size());
  for (std::size_t t = 0; t < res.realizations[0].trajectory.size(); ++t)
    EXPECT_EQ(std::stod(rows[t + 1][3]), res.realizations[0].trajectory[t]);
}

TEST(Harness, MonteCarloIsByteIdenticalAcrossRunsAndThreads) {
  auto a = small_config(scratch("det_a"));
  auto b = small_config(scratch("det_b"));
  b.threads = 3;
  a.save_trajectories = b.save_trajectories = true;
  run_montecarlo(a);
  run_montecarlo(b);
  for (const char* f : {"final_leakage.csv", "trajectories.csv", "aggregate.json"})
    EXPECT_EQ(slurp(a.output_dir / f), slurp(b.output_dir / f)) << f;
  EXPECT_FALSE(slurp(a.output_dir / "final_leakage.csv").empty());
}

TEST(Harness, RowCountsAndAggregateConsistency) {
  auto cfg = small_config(scratch("agg"));
  run_montecarlo(cfg);
  const auto rows = read_csv(cfg.output_dir / "final_leakage.csv");
  ASSERT_EQ(rows.size(), 1u + 2u * 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"realization_id", "algorithm", "final_leakage", "iterations_run",
                                               "converged"}));
  const auto doc = nlohmann::json::parse(slurp(cfg.output_dir / "aggregate.json"));
  for (const std::string alg : {"mpia", "ilm"}) {
    double acc = 0.0;
    int n = 0;
    for (std::size_t r = 1; r < rows.size(); ++r)
      if (rows[r][1] == alg) {
        acc += std::log(std::stod(rows[r][2]));
        ++n;
      }
    ASSERT_EQ(n, 6);
    const double gm = std::exp(acc / n);
    const double stored = doc["algorithms"][alg]["geometric_mean_leakage"].get<double>();
    EXPECT_LE(std::abs(gm - stored), 1e-12 * std::max(1.0, gm));
    const auto& ecdf = doc["algorithms"][alg]["ecdf"];
    ASSERT_EQ(ecdf.size(), 6u);
    EXPECT_DOUBLE_EQ(ecdf.back()[1].get<double>(), 1.0);
    for (std::size_t k = 1; k < ecdf.size(); ++k) EXPECT_LE(ecdf[k - 1][0].get<double>(), ecdf[k][0].get<double>());
  }
  EXPECT_EQ(doc["config"]["K"], 3);
}

TEST(Harness, SingleRealizationEcdfIsOneStep) {
  const auto e = empirical_cdf({0.25});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].leakage, 0.25);
  EXPECT_EQ(e[0].probability, 1.0);
  const auto sorted = empirical_cdf({3.0, 1.0, 2.0, 4.0});
  EXPECT_EQ(sorted[0].leakage, 1.0);
  EXPECT_DOUBLE_EQ(sorted[1].probability, 0.5);
}

TEST(Harness, GeometricMean) {
  EXPECT_DOUBLE_EQ(geometric_mean({1e-2, 1e-4}), 1e-3);
  EXPECT_NEAR(geometric_mean({0.0, 1.0}), 1e-150, 1e-160);
}

TEST(Harness, DistsimReport) {
  auto cfg = small_config(scratch("distsim"));
  cfg.max_outer_iters = 100;
  const auto rep = run_distsim_report(cfg);
  EXPECT_EQ(rep.totals.messages_ota, 2400u);
  EXPECT_EQ(rep.totals.messages_local, 1200u);
  EXPECT_EQ(rep.totals.bytes_ota, 128u * 2400u);
  const auto rows = read_csv(cfg.output_dir / "traffic.csv");
  ASSERT_EQ(rows.size(), 1u + 6u + 1u);
  EXPECT_EQ(rows.back(), (std::vector<std::string>{"total", "all", "2400", "307200", "1200"}));
  cfg.schedule = "ilm";
  EXPECT_EQ(run_distsim_report(cfg).totals.messages_ota, 1200u);
}

TEST(Harness, MaskAndScheduleFiles) {
  const std::string data = MPIA_TEST_DATA;
  const auto mask = load_mask_file(data + "/mask_3user.txt", 3);
  EXPECT_FALSE(mask[0][1]);
  EXPECT_TRUE(mask[1][0]);
  EXPECT_THROW(load_mask_file(data + "/mask_3user.txt", 2), std::invalid_argument);
  EXPECT_EQ(resolve_schedule(data + "/schedule_short.txt").families, ilm_schedule().families);

  auto cfg = small_config(scratch("masked"));
  cfg.connectivity = data + "/mask_3user.txt";
  cfg.max_outer_iters = 1;
  EXPECT_EQ(run_distsim_report(cfg).totals.messages_ota, 20u);
  cfg.schedule = data + "/schedule_short.txt";
  cfg.algorithm = Algorithm::mpia;
  cfg.init_mode = InitMode::zero;
  const auto res = run_single(cfg);
  EXPECT_EQ(res.realizations.size(), 1u);
}

TEST(Harness, ValidationErrors) {
  ExperimentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.K = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.d = 5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.num_realizations = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.threads = 0;
  EXPECT_THROW(run_montecarlo(cfg), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("svd"), std::invalid_argument);
}

TEST(Harness, UnwritableOutputThrows) {
  const fs::path dir = scratch("unwritable");
  std::ofstream(dir / "blocker") << "x";
  auto cfg = small_config(dir / "blocker" / "sub");
  cfg.num_realizations = 1;
  cfg.max_outer_iters = 1;
  EXPECT_THROW(run_montecarlo(cfg), std::exception);
}

TEST(Harness, MessagePassingReachesAlignmentFaster) {
  ExperimentConfig cfg;
  cfg.max_outer_iters = 1000;
  cfg.leakage_tol = 1e-8;
  cfg.seed = 2024;
  int faster = 0;
  const int seeds = 15;
  for (int r = 0; r < seeds; ++r) {
    const auto res = run_realization(cfg, r);
    if (res[0].iterations_run < res[1].iterations_run) ++faster;
  }
  EXPECT_GT(faster, seeds / 2);
}
