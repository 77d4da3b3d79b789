// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mpia/baselines.hpp"
#include "mpia/distsim.hpp"
#include "mpia/harness.hpp"
#include "mpia/metrics.hpp"
#include "mpia/scheduler.hpp"
#include "oracles.hpp"

using namespace mpia;
namespace fs = std::filesystem;

namespace {

// tolerances
constexpr double kEquivTol = 1e-10;
constexpr double kConvergedLeakage = 1e-6;
constexpr double kMedianLeakage = 1e-4;
constexpr double kConvergedFraction = 0.95;
constexpr double kRatioMax = 0.5;
constexpr double kIlmBand[2] = {4e-4, 4e-2};
constexpr double kMpiaBand[2] = {3.8e-5, 3.8e-3};
constexpr double kDecompTol = 1e-12;
constexpr double kAngleTol = 1e-7;
constexpr double kTraceTol = 1e-8;
constexpr double kMonotoneTol = 1e-10;
constexpr double kHermitianTol = 1e-10;
constexpr double kPsdTol = -1e-9;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int first_reaching(const std::vector<double>& history, double level, int cap) {
  for (std::size_t t = 0; t < history.size(); ++t)
    if (history[t] <= level) return static_cast<int>(t) + 1;
  return cap + 1;  // never reached within the budget
}

void ilm_equivalence() {
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    Rng ch_rng = derive_stream(101, c, 0);
    const auto ch = draw_channels(3, 4, 4, 2, full_mask(3), ch_rng);
    RunConfig cfg;
    cfg.max_outer_iters = 50;
    cfg.leakage_tol = 0.0;
    cfg.init_mode = InitMode::zero;
    cfg.record_beliefs = true;
    cfg.collect_diagnostics = false;
    Rng a = derive_stream(101, c, 1), b = derive_stream(101, c, 1);
    const auto mp = run(ch, ilm_schedule(), cfg, a);
    const auto ref = reference_ilm(ch, 50, b);
    if (mp.belief_history.size() != 50 || ref.history.size() != 50) {
      worst = INFINITY;
      break;
    }
    for (int t = 0; t < 50; ++t) {
      for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, (mp.belief_history[t].U[k] - ref.history[t].U[k]).norm());
        worst = std::max(worst, (mp.belief_history[t].V[k] - ref.history[t].V[k]).norm());
      }
      worst = std::max(worst, std::abs(mp.leakage_history[t] - ref.leakage_history[t]));
    }
  }
  report(worst <= kEquivTol, "ilm_equivalence",
         fmt("50 channels x 50 iterations, max deviation %.3e (tol %.0e)", worst, kEquivTol));
}

struct SuiteStats {
  RunDiagnostics diag;
  std::size_t messages = 0;
};

void merge(SuiteStats& s, const RunDiagnostics& d) {
  if (s.messages == 0 || d.min_relative_eigenvalue < s.diag.min_relative_eigenvalue)
    s.diag.min_relative_eigenvalue = d.min_relative_eigenvalue;
  s.messages += d.messages_checked;
  s.diag.max_hermitian_error = std::max(s.diag.max_hermitian_error, d.max_hermitian_error);
  s.diag.psd_violations += d.psd_violations;
  s.diag.max_own_rank = std::max(s.diag.max_own_rank, d.max_own_rank);
  s.diag.max_cross_rank = std::max(s.diag.max_cross_rank, d.max_cross_rank);
  s.diag.inner_invocations += d.inner_invocations;
  s.diag.inner_sweeps += d.inner_sweeps;
  s.diag.max_inner_increase = std::max(s.diag.max_inner_increase, d.max_inner_increase);
  s.diag.max_split_increase = std::max(s.diag.max_split_increase, d.max_split_increase);
}

SuiteStats convergence_suite() {
  const int seeds = 100, cap = 1000;
  int mpia_ok = 0, ilm_ok = 0;
  std::vector<double> mpia_iters, ilm_iters;
  SuiteStats stats;
  for (int s = 0; s < seeds; ++s) {
    Rng ch_rng = derive_stream(2024, s, 0);
    const auto ch = draw_channels(3, 4, 4, 2, full_mask(3), ch_rng);
    RunConfig cfg;
    cfg.max_outer_iters = cap;
    cfg.leakage_tol = kConvergedLeakage;

    Rng mp_rng = derive_stream(2024, s, 1);
    const auto mp = run(ch, regular_schedule(), cfg, mp_rng);
    cfg.init_mode = InitMode::zero;
    Rng ilm_rng = derive_stream(2024, s, 2);
    const auto ilm = run(ch, ilm_schedule(), cfg, ilm_rng);

    mpia_ok += mp.converged;
    ilm_ok += ilm.converged;
    mpia_iters.push_back(first_reaching(mp.leakage_history, kMedianLeakage, cap));
    ilm_iters.push_back(first_reaching(ilm.leakage_history, kMedianLeakage, cap));
    merge(stats, mp.diagnostics);
    merge(stats, ilm.diagnostics);
  }
  const double mpia_frac = mpia_ok / double(seeds), ilm_frac = ilm_ok / double(seeds);
  const double mpia_med = median(mpia_iters), ilm_med = median(ilm_iters);
  const bool ok = mpia_frac >= kConvergedFraction && ilm_frac >= kConvergedFraction && mpia_med <= ilm_med;
  report(ok, "convergence_to_alignment",
         fmt("leakage <= 1e-6 within %d iterations: mpia %d/%d, ilm %d/%d (need >= %.0f%% each); "
             "median iterations to 1e-4: mpia %.1f, ilm %.1f",
             cap, mpia_ok, seeds, ilm_ok, seeds, 100 * kConvergedFraction, mpia_med, ilm_med));
  return stats;
}

void leakage_distribution(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.num_realizations = 200;
  cfg.max_outer_iters = 100;
  cfg.output_dir = dir;
  const auto res = run_montecarlo(cfg);
  double gm_mpia = 0.0, gm_ilm = 0.0;
  for (const auto& agg : res.aggregates)
    (agg.algorithm == Algorithm::mpia ? gm_mpia : gm_ilm) = agg.geometric_mean_leakage;
  const double ratio = gm_mpia / gm_ilm;
  const bool ok = ratio <= kRatioMax && gm_ilm >= kIlmBand[0] && gm_ilm <= kIlmBand[1] && gm_mpia >= kMpiaBand[0] &&
                  gm_mpia <= kMpiaBand[1];
  report(ok, "leakage_distribution",
         fmt("200 realizations x 100 iterations: geometric mean mpia %.3e, ilm %.3e, ratio %.3f (<= %.1f)", gm_mpia,
             gm_ilm, ratio, kRatioMax));
}

void decomposition_identity() {
  Rng rng(404);
  std::uniform_int_distribution<int> users(2, 5), ants(2, 6);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int K = users(rng), N = ants(rng), M = ants(rng);
    const int d = std::uniform_int_distribution<int>(1, std::min(N, M))(rng);
    const auto ch = draw_channels(K, N, M, d, full_mask(K), rng);
    std::vector<TruncatedUnitary> U, V;
    for (int k = 0; k < K; ++k) {
      U.push_back(random_truncated_unitary(N, d, rng));
      V.push_back(random_truncated_unitary(M, d, rng));
    }
    const auto rep = leakage(ch, U, V);
    double sum_f = 0.0, sum_g = 0.0;
    for (double x : rep.per_receiver) sum_f += x;
    for (double x : rep.per_transmitter) sum_g += x;
    worst = std::max(worst, std::abs(sum_f - sum_g) / std::max(1.0, sum_f));
  }
  report(worst <= kDecompTol, "decomposition_identity",
         fmt("1000 tuples, max |sum f - sum g| / max(1, sum f) = %.3e (tol %.0e)", worst, kDecompTol));
}

void nu_min_oracle() {
  std::mt19937_64 gen(505);
  Rng rng(506);
  std::uniform_int_distribution<int> dims(2, 8);
  double worst_angle = 0.0, worst_trace = 0.0;
  int cases = 0;
  while (cases < 1000) {
    const int n = dims(gen);
    const int d = std::uniform_int_distribution<int>(1, std::min(3, n))(gen);
    const CMatrix q = oracle::random_psd(n, gen);
    const auto ev = oracle::eigenvalues(q);
    const CMatrix x = nu_min(q, d, rng);
    worst_angle = std::max(worst_angle, oracle::subspace_distance(x, oracle::weakest_subspace(q, d)));
    double weakest = 0.0;
    for (int k = 0; k < d; ++k) weakest += ev[k];
    worst_trace = std::max(worst_trace, std::abs(quadratic_trace(q, x) - weakest) / std::max(1.0, q.norm()));
    ++cases;
  }
  const bool ok = worst_angle <= kAngleTol && worst_trace <= kTraceTol;
  report(ok, "nu_min_oracle",
         fmt("1000 matrices, max sin(principal angle) %.3e (tol %.0e), max trace error %.3e (tol %.0e)", worst_angle,
             kAngleTol, worst_trace, kTraceTol));
}

void inner_monotonicity(const SuiteStats& s) {
  report(s.diag.max_inner_increase <= kMonotoneTol && s.diag.inner_invocations > 0, "inner_loop_monotonicity",
         fmt("%zu inner loops, %zu sweeps, max objective increase %.3e (tol %.0e); full-weight split objective "
             "max increase %.3e (informational)",
             s.diag.inner_invocations, s.diag.inner_sweeps, s.diag.max_inner_increase, kMonotoneTol,
             s.diag.max_split_increase));
}

void message_invariants(const SuiteStats& s) {
  const bool ok = s.messages > 0 && s.diag.max_hermitian_error <= kHermitianTol && s.diag.psd_violations == 0 &&
                  s.diag.min_relative_eigenvalue >= kPsdTol && s.diag.max_cross_rank <= 2;
  report(ok, "message_invariants",
         fmt("%zu messages, max hermitian error %.3e, min relative eigenvalue %.3e, max cross-message rank %d (d = 2)",
             s.messages, s.diag.max_hermitian_error, s.diag.min_relative_eigenvalue, s.diag.max_cross_rank));
}

void traffic_counts() {
  const FactorGraph graph(3, 4, 4, full_mask(3));
  const auto mapping = default_mapping(3);
  const auto reg = account(regular_schedule(), graph, mapping, 1);
  const auto ilm = account(ilm_schedule(), graph, mapping, 1);
  const bool ok = reg.totals.messages_ota == 24 && ilm.totals.messages_ota == 12 &&
                  reg.totals.bytes_ota == 24 * 4 * 4 * 8 && ilm.totals.bytes_ota == 12 * 4 * 4 * 8;
  report(ok, "distributed_traffic",
         fmt("over-the-air per iteration: regular %zu (%zu bytes), ilm %zu (%zu bytes)", reg.totals.messages_ota,
             reg.totals.bytes_ota, ilm.totals.messages_ota, ilm.totals.bytes_ota));
}

void determinism(const fs::path& first, const fs::path& second) {
  ExperimentConfig cfg;
  cfg.num_realizations = 200;
  cfg.max_outer_iters = 100;
  cfg.output_dir = second;
  run_montecarlo(cfg);
  bool same = true;
  std::string detail;
  for (const char* name : {"final_leakage.csv", "aggregate.json"}) {
    const std::string a = slurp(first / name), b = slurp(second / name);
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += fmt("%s %s (%zu bytes) ", name, eq ? "identical" : "differs", a.size());
  }
  report(same, "determinism", detail);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "mpia_acceptance";
  fs::remove_all(root);
  fs::create_directories(root / "a");
  fs::create_directories(root / "b");
  try {
    ilm_equivalence();
    const SuiteStats stats = convergence_suite();
    leakage_distribution(root / "a");
    decomposition_identity();
    nu_min_oracle();
    inner_monotonicity(stats);
    message_invariants(stats);
    traffic_counts();
    determinism(root / "a", root / "b");
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 2;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criteria failed, %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
