#include "mpia/scheduler.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mpia/metrics.hpp"

namespace mpia {

namespace {

struct FamilyInfo {
  MessageFamily family;
  std::string_view name;
  NodeKind from;
  NodeKind to;
  bool cross;
};

constexpr std::array<FamilyInfo, 8> kFamilies{{
    {MessageFamily::g_to_own_V, "g_j->V_j", NodeKind::g, NodeKind::V, false},
    {MessageFamily::f_to_cross_V, "f_i->V_j", NodeKind::f, NodeKind::V, true},
    {MessageFamily::V_to_cross_f, "V_j->f_i", NodeKind::V, NodeKind::f, true},
    {MessageFamily::V_to_own_g, "V_j->g_j", NodeKind::V, NodeKind::g, false},
    {MessageFamily::f_to_own_U, "f_i->U_i", NodeKind::f, NodeKind::U, false},
    {MessageFamily::g_to_cross_U, "g_j->U_i", NodeKind::g, NodeKind::U, true},
    {MessageFamily::U_to_cross_g, "U_i->g_j", NodeKind::U, NodeKind::g, true},
    {MessageFamily::U_to_own_f, "U_i->f_i", NodeKind::U, NodeKind::f, false},
}};

const FamilyInfo& info(MessageFamily family) {
  for (const auto& fi : kFamilies)
    if (fi.family == family) return fi;
  throw std::invalid_argument("unknown message family");
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

void check_message(const PsdMessage& msg, MessageFamily family, RunDiagnostics& diag,
                   std::vector<std::string>& warnings) {
  const double scale = std::max(1.0, msg.Q.norm());
  diag.max_hermitian_error = std::max(diag.max_hermitian_error, (msg.Q - msg.Q.adjoint()).norm() / scale);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(msg.Q, Eigen::EigenvaluesOnly);
  const RVector& ev = solver.eigenvalues();
  const double rel_min = ev(0) / std::max(1.0, ev(ev.size() - 1));
  if (diag.messages_checked == 0 || rel_min < diag.min_relative_eigenvalue) diag.min_relative_eigenvalue = rel_min;
  ++diag.messages_checked;
  if (rel_min < -1e-9) {
    ++diag.psd_violations;
    warnings.push_back("message " + to_string(msg.from) + "->" + to_string(msg.to) +
                       " has negative eigenvalue " + std::to_string(ev(0)));
  }
  if (!msg.from.is_variable()) {
    const int rank = numerical_rank(msg.Q);
    int& slot = is_cross_family(family) ? diag.max_cross_rank : diag.max_own_rank;
    slot = std::max(slot, rank);
  }
}

void record_trace(const InnerLoopTrace& trace, RunDiagnostics& diag) {
  ++diag.inner_invocations;
  diag.inner_sweeps += static_cast<std::size_t>(trace.sweeps);
  for (std::size_t s = 1; s < trace.objective.size(); ++s) {
    diag.max_inner_increase = std::max(diag.max_inner_increase, trace.objective[s] - trace.objective[s - 1]);
    diag.max_split_increase =
        std::max(diag.max_split_increase, trace.split_objective[s] - trace.split_objective[s - 1]);
  }
}

}  // namespace

std::string_view family_name(MessageFamily family) { return info(family).name; }

MessageFamily parse_family(std::string_view name) {
  for (const auto& fi : kFamilies)
    if (fi.name == name) return fi.family;
  throw std::invalid_argument("unknown message family '" + std::string(name) + "'");
}

bool is_cross_family(MessageFamily family) { return info(family).cross; }

std::vector<DirectedEdge> expand_family(MessageFamily family, const FactorGraph& graph) {
  const FamilyInfo& fi = info(family);
  const int K = graph.num_users();
  std::vector<DirectedEdge> out;
  for (int dst = 0; dst < K; ++dst) {
    if (!fi.cross) {
      out.emplace_back(NodeId{fi.from, dst}, NodeId{fi.to, dst});
      continue;
    }
    for (int src = 0; src < K; ++src) {
      if (src == dst) continue;
      const NodeId a{fi.from, src};
      const NodeId b{fi.to, dst};
      if (graph.has_edge(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

Schedule regular_schedule() {
  return {"regular",
          {MessageFamily::g_to_own_V, MessageFamily::f_to_cross_V, MessageFamily::V_to_cross_f,
           MessageFamily::V_to_own_g, MessageFamily::f_to_own_U, MessageFamily::g_to_cross_U,
           MessageFamily::U_to_cross_g, MessageFamily::U_to_own_f}};
}

Schedule ilm_schedule() {
  return {"ilm",
          {MessageFamily::g_to_own_V, MessageFamily::V_to_cross_f, MessageFamily::f_to_own_U,
           MessageFamily::U_to_cross_g}};
}

Schedule parse_schedule(std::string_view text, std::string name) {
  Schedule sched{std::move(name), {}};
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string token = trim(line);
    if (token.empty()) continue;
    try {
      sched.families.push_back(parse_family(token));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("schedule line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (sched.families.empty()) throw std::invalid_argument("schedule lists no message families");
  return sched;
}

Schedule load_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_schedule(buf.str(), path);
}

std::string_view init_mode_name(InitMode mode) { return mode == InitMode::zero ? "zero" : "random"; }

InitMode parse_init_mode(std::string_view name) {
  if (name == "zero") return InitMode::zero;
  if (name == "random") return InitMode::random;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

std::vector<TruncatedUnitary> IterationState::filters() const {
  std::vector<TruncatedUnitary> out;
  for (const auto& u : beliefs.U) out.push_back(u.value());
  return out;
}

std::vector<TruncatedUnitary> IterationState::precoders() const {
  std::vector<TruncatedUnitary> out;
  for (const auto& v : beliefs.V) out.push_back(v.value());
  return out;
}

MessageStore initialize(const FactorGraph& graph, InitMode mode, int d, Rng& rng) {
  std::vector<DirectedEdge> directed;
  for (const auto& [var, fn] : graph.edges()) {
    directed.emplace_back(var, fn);
    directed.emplace_back(fn, var);
  }
  std::sort(directed.begin(), directed.end());

  MessageStore store;
  for (const auto& [from, to] : directed) {
    const int n = graph.message_dim(from, to);
    if (mode == InitMode::zero) {
      store.set(from, to, CMatrix::Zero(n, n));
    } else {
      const CMatrix a = random_gaussian_matrix(n, d, rng);
      store.set(from, to, hermitize(a * a.adjoint()));
    }
  }
  return store;
}

IterationState run(const ChannelSet& channels, const Schedule& schedule, const RunConfig& cfg) {
  Rng rng(cfg.seed);
  return run(channels, schedule, cfg, rng);
}

IterationState run(const ChannelSet& channels, const Schedule& schedule, const RunConfig& cfg, Rng& rng) {
  channels.validate();
  if (cfg.max_outer_iters < 1) throw std::invalid_argument("RunConfig: max_outer_iters must be >= 1");
  if (schedule.families.empty()) throw std::invalid_argument("run: empty schedule");

  const FactorGraph graph = build_graph(channels);
  const int K = channels.K;
  const int d = channels.d;

  IterationState state;
  if (!check_feasibility(K, channels.N, channels.M, d))
    state.warnings.push_back("dimensions fail the properness check M + N >= d(K + 1); alignment may be infeasible");
  if (schedule == ilm_schedule() && cfg.init_mode != InitMode::zero)
    state.warnings.push_back("ILM schedule without zero initialization does not reproduce ILM");

  std::vector<std::pair<MessageFamily, std::vector<DirectedEdge>>> plan;
  for (MessageFamily fam : schedule.families) plan.emplace_back(fam, expand_family(fam, graph));

  state.store = initialize(graph, cfg.init_mode, d, rng);
  state.beliefs.U.assign(K, std::nullopt);
  state.beliefs.V.assign(K, std::nullopt);

  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    for (const auto& [family, edges] : plan) {
      for (const auto& [from, to] : edges) {
        InnerLoopTrace trace;
        PsdMessage msg = compute_message(state.store, graph, channels, from, to, cfg.inner, state.beliefs, rng,
                                         cfg.collect_diagnostics ? &trace : nullptr);
        if (cfg.collect_diagnostics) {
          check_message(msg, family, state.diagnostics, state.warnings);
          if (trace.sweeps > 0) record_trace(trace, state.diagnostics);
        }
        state.store.set(std::move(msg));
      }
    }

    for (int i = 0; i < K; ++i) state.beliefs.U[i] = extract_belief(state.store, graph, U(i), d, rng);
    for (int j = 0; j < K; ++j) state.beliefs.V[j] = extract_belief(state.store, graph, V(j), d, rng);

    const std::vector<TruncatedUnitary> filters = state.filters();
    const std::vector<TruncatedUnitary> precoders = state.precoders();
    if (cfg.record_beliefs) state.belief_history.push_back({filters, precoders});

    const double total = leakage(channels, filters, precoders).total;
    state.leakage_history.push_back(total);
    state.iterations_run = iter;
    if (total <= cfg.leakage_tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace mpia
