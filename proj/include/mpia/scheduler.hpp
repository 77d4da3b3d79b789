// Message schedules and the outer loopy message-passing driver.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpia/factor_graph.hpp"
#include "mpia/message_engine.hpp"

namespace mpia {

/// The eight directed message families of the graph. "Own" families stay on
/// one user (f_i<->U_i, g_j<->V_j), "cross" families link users i != j.
enum class MessageFamily {
  g_to_own_V,    // g_j -> V_j
  f_to_cross_V,  // f_i -> V_j
  V_to_cross_f,  // V_j -> f_i
  V_to_own_g,    // V_j -> g_j
  f_to_own_U,    // f_i -> U_i
  g_to_cross_U,  // g_j -> U_i
  U_to_cross_g,  // U_i -> g_j
  U_to_own_f,    // U_i -> f_i
};

/// Canonical text form, e.g. "g_j->V_j", "f_i->V_j".
std::string_view family_name(MessageFamily family);
/// Inverse of family_name; throws std::invalid_argument on unknown names.
MessageFamily parse_family(std::string_view name);

bool is_cross_family(MessageFamily family);

/// Directed edges of a family present in the graph, ordered by destination
/// index first, then source index, both ascending.
std::vector<DirectedEdge> expand_family(MessageFamily family, const FactorGraph& graph);

struct Schedule {
  std::string name;
  std::vector<MessageFamily> families;

  bool operator==(const Schedule&) const = default;
};

/// g->V, f->V, V->f, V->g, f->U, g->U, U->g, U->f.
Schedule regular_schedule();
/// g->V, V->f, f->U, U->g; the remaining families keep their initial value.
Schedule ilm_schedule();
/// One family name per line; blank lines and '#' comments are ignored.
Schedule parse_schedule(std::string_view text, std::string name = "custom");
Schedule load_schedule_file(const std::string& path);

enum class InitMode { zero, random };

std::string_view init_mode_name(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct RunConfig {
  int max_outer_iters = 1000;
  double leakage_tol = 1e-10;
  InitMode init_mode = InitMode::random;
  InnerLoopConfig inner;
  std::uint64_t seed = 1;
  // Eigen-checks every produced message and records inner-loop traces.
  bool collect_diagnostics = true;
  // Keeps the beliefs of every outer iteration.
  bool record_beliefs = false;
};

struct RunDiagnostics {
  std::size_t messages_checked = 0;
  double max_hermitian_error = 0.0;     // ||Q - Q^H||_F / max(1, ||Q||_F)
  double min_relative_eigenvalue = 0.0; // lambda_min / max(1, lambda_max)
  std::size_t psd_violations = 0;       // lambda_min < -1e-9 max(1, lambda_max)
  int max_own_rank = 0;                 // f_i->U_i, g_j->V_j
  int max_cross_rank = 0;               // f_i->V_j, g_j->U_i
  std::size_t inner_invocations = 0;
  std::size_t inner_sweeps = 0;
  double max_inner_increase = 0.0;      // largest sweep-to-sweep rise of the block objective
  double max_split_increase = 0.0;      // same for the full-weight split objective
};

struct BeliefSnapshot {
  std::vector<TruncatedUnitary> U;
  std::vector<TruncatedUnitary> V;
};

struct IterationState {
  MessageStore store;
  BeliefSet beliefs;
  std::vector<double> leakage_history;
  int iterations_run = 0;
  bool converged = false;
  RunDiagnostics diagnostics;
  std::vector<std::string> warnings;
  std::vector<BeliefSnapshot> belief_history;  // filled when record_beliefs is set

  std::vector<TruncatedUnitary> filters() const;
  std::vector<TruncatedUnitary> precoders() const;
};

/// Zero mode: every Q = 0. Random mode: every Q = A A^H with A an n x d
/// Gaussian draw, one draw per directed edge in sorted edge order.
MessageStore initialize(const FactorGraph& graph, InitMode mode, int d, Rng& rng);

/// Runs the schedule until total leakage <= leakage_tol or max_outer_iters.
/// Each outer iteration runs the families in order with sequential live
/// updates, then extracts the beliefs U_1..U_K, V_1..V_K and records the
/// leakage. The stream is seeded from cfg.seed.
IterationState run(const ChannelSet& channels, const Schedule& schedule, const RunConfig& cfg);
/// Same, drawing from a caller-owned stream instead of cfg.seed.
IterationState run(const ChannelSet& channels, const Schedule& schedule, const RunConfig& cfg, Rng& rng);

}  // namespace mpia
