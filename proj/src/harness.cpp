#include "mpia/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace mpia {

namespace {

// stream ids for derive_stream(seed, realization, id)
constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kMpiaStream = 1;
constexpr std::uint64_t kIlmStream = 2;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("error while writing " + path.string());
}

std::vector<Algorithm> selected(Algorithm alg) {
  if (alg == Algorithm::both) return {Algorithm::mpia, Algorithm::ilm};
  return {alg};
}

void write_trajectories(const std::filesystem::path& dir, const std::string& name,
                        const std::vector<RealizationResult>& results) {
  auto out = open_output(dir, name);
  out << "realization_id,algorithm,iteration,total_leakage\n";
  for (const auto& r : results)
    for (std::size_t t = 0; t < r.trajectory.size(); ++t)
      out << r.realization_id << ',' << algorithm_name(r.algorithm) << ',' << t + 1 << ',' << r.trajectory[t]
          << '\n';
  close_output(out, dir / name);
}

std::vector<AlgorithmAggregate> aggregate(const ExperimentConfig& cfg, const std::vector<RealizationResult>& results) {
  std::vector<AlgorithmAggregate> out;
  for (Algorithm alg : selected(cfg.algorithm)) {
    AlgorithmAggregate agg;
    agg.algorithm = alg;
    std::vector<double> finals;
    for (const auto& r : results) {
      if (r.algorithm != alg) continue;
      finals.push_back(r.final_leakage);
      ++agg.realizations;
      agg.converged += r.converged ? 1 : 0;
    }
    agg.geometric_mean_leakage = geometric_mean(finals);
    agg.ecdf = empirical_cdf(finals);
    out.push_back(std::move(agg));
  }
  return out;
}

}  // namespace

std::string_view algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::mpia: return "mpia";
    case Algorithm::ilm: return "ilm";
    case Algorithm::both: return "both";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "mpia") return Algorithm::mpia;
  if (name == "ilm") return Algorithm::ilm;
  if (name == "both") return Algorithm::both;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  if (N < 1 || M < 1 || d < 1) throw std::invalid_argument("N, M and d must be positive");
  if (d > std::min(N, M)) throw std::invalid_argument("d must not exceed min(N, M)");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be at least 1");
  if (inner_max_iters < 1) throw std::invalid_argument("inner_max_iters must be at least 1");
  if (leakage_tol < 0.0 || inner_tol < 0.0) throw std::invalid_argument("tolerances must be non-negative");
  if (num_realizations < 1) throw std::invalid_argument("num_realizations must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

ConnectivityMask load_mask_file(const std::string& path, int K) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open connectivity file " + path);
  std::vector<int> values;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      if (tok != "0" && tok != "1") throw std::invalid_argument("connectivity file: entries must be 0 or 1, got '" + tok + "'");
      values.push_back(tok == "1");
    }
  }
  if (static_cast<int>(values.size()) != K * K)
    throw std::invalid_argument("connectivity file: expected " + std::to_string(K * K) + " entries, got " +
                                std::to_string(values.size()));
  ConnectivityMask mask(K, std::vector<bool>(K));
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) mask[i][j] = (i == j) || values[i * K + j] != 0;
  return mask;
}

Schedule resolve_schedule(const std::string& spec) {
  if (spec == "regular") return regular_schedule();
  if (spec == "ilm") return ilm_schedule();
  return load_schedule_file(spec);
}

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += std::log(std::max(v, 1e-300));
  return std::exp(acc / static_cast<double>(values.size()));
}

std::vector<EcdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<EcdfPoint> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) out.push_back({values[k], static_cast<double>(k + 1) / n});
  return out;
}

std::vector<RealizationResult> run_realization(const ExperimentConfig& cfg, int realization_id) {
  const ConnectivityMask mask = cfg.connectivity.empty() ? full_mask(cfg.K) : load_mask_file(cfg.connectivity, cfg.K);
  Rng channel_rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(realization_id), kChannelStream);
  const ChannelSet channels = draw_channels(cfg.K, cfg.N, cfg.M, cfg.d, mask, channel_rng);

  RunConfig run_cfg;
  run_cfg.max_outer_iters = cfg.max_outer_iters;
  run_cfg.leakage_tol = cfg.leakage_tol;
  run_cfg.inner = {cfg.inner_max_iters, cfg.inner_tol, cfg.warm_start};
  run_cfg.collect_diagnostics = false;

  std::vector<RealizationResult> out;
  for (Algorithm alg : selected(cfg.algorithm)) {
    Schedule schedule;
    Rng rng;
    if (alg == Algorithm::mpia) {
      schedule = resolve_schedule(cfg.schedule);
      run_cfg.init_mode = cfg.init_mode;
      rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(realization_id), kMpiaStream);
    } else {
      schedule = ilm_schedule();
      run_cfg.init_mode = InitMode::zero;
      rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(realization_id), kIlmStream);
    }
    IterationState st = run(channels, schedule, run_cfg, rng);
    out.push_back({realization_id, alg, st.leakage_history.back(), st.iterations_run, st.converged,
                   std::move(st.leakage_history)});
  }
  return out;
}

ExperimentResult run_single(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  res.realizations = run_realization(cfg, 0);
  res.aggregates = aggregate(cfg, res.realizations);
  write_trajectories(cfg.output_dir, "trajectory.csv", res.realizations);
  return res;
}

ExperimentResult run_montecarlo(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<RealizationResult>> slots(cfg.num_realizations);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < cfg.num_realizations; r = next++) {
      try {
        slots[r] = run_realization(cfg, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::min(cfg.threads, cfg.num_realizations);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult res;
  for (auto& slot : slots)
    for (auto& r : slot) res.realizations.push_back(std::move(r));
  res.aggregates = aggregate(cfg, res.realizations);

  {
    auto out = open_output(cfg.output_dir, "final_leakage.csv");
    out << "realization_id,algorithm,final_leakage,iterations_run,converged\n";
    for (const auto& r : res.realizations)
      out << r.realization_id << ',' << algorithm_name(r.algorithm) << ',' << r.final_leakage << ','
          << r.iterations_run << ',' << (r.converged ? 1 : 0) << '\n';
    close_output(out, cfg.output_dir / "final_leakage.csv");
  }

  nlohmann::ordered_json doc;
  doc["config"] = {{"K", cfg.K},
                   {"N", cfg.N},
                   {"M", cfg.M},
                   {"d", cfg.d},
                   {"schedule", cfg.schedule},
                   {"init_mode", init_mode_name(cfg.init_mode)},
                   {"max_outer_iters", cfg.max_outer_iters},
                   {"leakage_tol", cfg.leakage_tol},
                   {"inner_max_iters", cfg.inner_max_iters},
                   {"inner_tol", cfg.inner_tol},
                   {"num_realizations", cfg.num_realizations},
                   {"seed", cfg.seed}};
  for (const auto& agg : res.aggregates) {
    nlohmann::ordered_json ecdf = nlohmann::ordered_json::array();
    for (const auto& p : agg.ecdf) ecdf.push_back({p.leakage, p.probability});
    doc["algorithms"][std::string(algorithm_name(agg.algorithm))] = {
        {"realizations", agg.realizations},
        {"converged", agg.converged},
        {"geometric_mean_leakage", agg.geometric_mean_leakage},
        {"ecdf", std::move(ecdf)}};
  }
  {
    auto out = open_output(cfg.output_dir, "aggregate.json");
    out << doc.dump(2) << '\n';
    close_output(out, cfg.output_dir / "aggregate.json");
  }

  if (cfg.save_trajectories) write_trajectories(cfg.output_dir, "trajectories.csv", res.realizations);
  return res;
}

TrafficReport run_distsim_report(const ExperimentConfig& cfg) {
  cfg.validate();
  const ConnectivityMask mask = cfg.connectivity.empty() ? full_mask(cfg.K) : load_mask_file(cfg.connectivity, cfg.K);
  const FactorGraph graph(cfg.K, cfg.N, cfg.M, mask);
  const TrafficReport rep = account(resolve_schedule(cfg.schedule), graph, default_mapping(cfg.K), cfg.max_outer_iters);

  auto out = open_output(cfg.output_dir, "traffic.csv");
  out << "device,role,messages_ota,bytes_ota,messages_local\n";
  for (const auto& [dev, t] : rep.per_device)
    out << to_string(dev) << ',' << role_name(dev.role) << ',' << t.messages_ota << ',' << t.bytes_ota << ','
        << t.messages_local << '\n';
  out << "total,all," << rep.totals.messages_ota << ',' << rep.totals.bytes_ota << ',' << rep.totals.messages_local
      << '\n';
  close_output(out, cfg.output_dir / "traffic.csv");
  return rep;
}

}  // namespace mpia
