#include "mpia/message_engine.hpp"

namespace mpia {

namespace {

std::string edge_name(NodeId from, NodeId to) { return to_string(from) + "->" + to_string(to); }

void require_edge(const FactorGraph& graph, NodeId a, NodeId b) {
  if (!graph.has_edge(a, b)) throw ProtocolError("no graph edge for message " + edge_name(a, b));
}

// Coupling of a function node's inner problem: the anchor variable X (U_i for
// f_i, V_j for g_j) couples to each other variable Y_k through
// ||X^H G_k Y_k||_F^2.
struct Coupling {
  NodeId other;
  CMatrix G;
};

NodeId anchor_of(NodeId function) {
  return function.kind == NodeKind::f ? U(function.index) : V(function.index);
}

// Channel seen between the function's anchor and a given other variable.
CMatrix coupling_matrix(const ChannelSet& ch, NodeId function, NodeId other) {
  if (function.kind == NodeKind::f) return ch.H[function.index][other.index];  // ||U_i^H H_ik V_k||
  return ch.H[other.index][function.index].adjoint();                          // ||V_j^H H_kj^H U_k||
}

}  // namespace

const HermitianPsd& MessageStore::get(NodeId from, NodeId to) const {
  auto it = messages_.find({from, to});
  if (it == messages_.end()) throw ProtocolError("missing message " + edge_name(from, to));
  return it->second;
}

PsdMessage var_to_fn_message(const MessageStore& store, const FactorGraph& graph, NodeId variable,
                             NodeId function) {
  if (!variable.is_variable() || function.is_variable())
    throw ProtocolError("var_to_fn_message: expected a variable -> function edge, got " +
                        edge_name(variable, function));
  require_edge(graph, variable, function);
  const int n = graph.message_dim(variable, function);
  CMatrix sum = CMatrix::Zero(n, n);
  for (NodeId a : graph.neighbors(variable))
    if (a != function) sum += store.get(a, variable);
  return {variable, function, hermitize(sum)};
}

PsdMessage fn_to_own_var_message(const MessageStore& store, const FactorGraph& graph,
                                 const ChannelSet& channels, NodeId function, Rng& rng) {
  if (function.is_variable()) throw ProtocolError("fn_to_own_var_message: " + to_string(function) + " is a variable");
  const NodeId own = anchor_of(function);
  require_edge(graph, function, own);
  const int n = graph.message_dim(function, own);
  CMatrix sum = CMatrix::Zero(n, n);
  for (NodeId other : graph.neighbors(function)) {
    if (other == own) continue;
    const TruncatedUnitary x0 = nu_min(store.get(other, function), channels.d, rng);
    sum += projected_outer(coupling_matrix(channels, function, other), x0);
  }
  return {function, own, hermitize(sum)};
}

PsdMessage fn_to_other_var_message(const MessageStore& store, const FactorGraph& graph,
                                   const ChannelSet& channels, NodeId function, NodeId target,
                                   const InnerLoopConfig& cfg,
                                   const std::optional<TruncatedUnitary>& warm_start, Rng& rng,
                                   InnerLoopTrace* trace) {
  if (function.is_variable()) throw ProtocolError("fn_to_other_var_message: " + to_string(function) + " is a variable");
  const NodeId anchor = anchor_of(function);
  if (target == anchor) throw ProtocolError("fn_to_other_var_message: " + edge_name(function, target) + " is an own-variable message");
  require_edge(graph, function, target);
  if (cfg.max_inner_iters < 1) throw std::invalid_argument("InnerLoopConfig: max_inner_iters must be >= 1");

  const int d = channels.d;
  const HermitianPsd& q_anchor = store.get(anchor, function);
  std::vector<Coupling> couplings;
  std::vector<const HermitianPsd*> q_other;
  for (NodeId other : graph.neighbors(function)) {
    if (other == anchor || other == target) continue;
    couplings.push_back({other, coupling_matrix(channels, function, other)});
    q_other.push_back(&store.get(other, function));
  }

  TruncatedUnitary x;
  if (couplings.empty()) {
    // nothing to alternate with: a single minimization of the anchor term
    x = nu_min(q_anchor, d, rng);
    if (trace) {
      const double obj = quadratic_trace(q_anchor, x);
      trace->objective.push_back(obj);
      trace->split_objective.push_back(obj);
      trace->sweeps = 1;
    }
  } else {
    const int anchor_dim = static_cast<int>(q_anchor.rows());
    x = (warm_start && warm_start->rows() == anchor_dim && warm_start->cols() == d)
            ? *warm_start
            : random_truncated_unitary(anchor_dim, d, rng);
    std::vector<TruncatedUnitary> y(couplings.size());
    double previous = 0.0;
    for (int sweep = 1; sweep <= cfg.max_inner_iters; ++sweep) {
      for (std::size_t k = 0; k < couplings.size(); ++k)
        y[k] = nu_min(*q_other[k] + 0.5 * projected_outer(couplings[k].G.adjoint(), x), d, rng);
      CMatrix r = q_anchor;
      for (std::size_t k = 0; k < couplings.size(); ++k) r += 0.5 * projected_outer(couplings[k].G, y[k]);
      x = nu_min(r, d, rng);

      double own = quadratic_trace(q_anchor, x);
      double cross = 0.0;
      for (std::size_t k = 0; k < couplings.size(); ++k) {
        own += quadratic_trace(*q_other[k], y[k]);
        cross += (x.adjoint() * couplings[k].G * y[k]).squaredNorm();
      }
      const double objective = own + 0.5 * cross;
      if (trace) {
        trace->objective.push_back(objective);
        trace->split_objective.push_back(own + cross);
        trace->sweeps = sweep;
      }
      if (sweep > 1 && previous - objective < cfg.inner_tol) break;
      previous = objective;
    }
  }

  const CMatrix g_target = coupling_matrix(channels, function, target);
  return {function, target, hermitize(projected_outer(g_target.adjoint(), x))};
}

TruncatedUnitary extract_belief(const MessageStore& store, const FactorGraph& graph, NodeId variable,
                                int d, Rng& rng) {
  if (!variable.is_variable()) throw ProtocolError("extract_belief: " + to_string(variable) + " is not a variable");
  const auto& nbrs = graph.neighbors(variable);
  const int n = graph.message_dim(variable, nbrs.front());
  CMatrix sum = CMatrix::Zero(n, n);
  for (NodeId a : nbrs) sum += store.get(a, variable);
  return nu_min(hermitize(sum), d, rng);
}

PsdMessage compute_message(const MessageStore& store, const FactorGraph& graph, const ChannelSet& channels,
                           NodeId from, NodeId to, const InnerLoopConfig& cfg, const BeliefSet& beliefs,
                           Rng& rng, InnerLoopTrace* trace) {
  if (from.is_variable()) return var_to_fn_message(store, graph, from, to);
  if (to == anchor_of(from)) return fn_to_own_var_message(store, graph, channels, from, rng);

  std::optional<TruncatedUnitary> warm;
  if (cfg.warm_start) {
    const auto& pool = from.kind == NodeKind::f ? beliefs.U : beliefs.V;
    if (from.index < static_cast<int>(pool.size())) warm = pool[from.index];
  }
  return fn_to_other_var_message(store, graph, channels, from, to, cfg, warm, rng, trace);
}

}  // namespace mpia
