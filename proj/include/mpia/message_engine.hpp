// Closed-form min-sum message updates under the quadratic-form message
// parameterization m_{a->b}(X) = tr(X^H Q_{a->b} X).
//
// Variable-to-function messages are exact sums of incoming matrices.
// Function-to-variable messages use the leakage approximations that make the
// minimization tractable: messages to the function's "own" variable (f_i->U_i,
// g_j->V_j) decouple per link, messages to the other variables
// (f_i->V_j, g_j->U_i) run an inner alternating minimization. Terms
// proportional to the identity only shift a message by a constant and are
// dropped everywhere.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mpia/factor_graph.hpp"
#include "mpia/matrix_kernel.hpp"

namespace mpia {

class ProtocolError : public std::logic_error {
 public:
  explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

struct PsdMessage {
  NodeId from;
  NodeId to;
  HermitianPsd Q;
};

using DirectedEdge = std::pair<NodeId, NodeId>;

/// One Q matrix per direction of every graph edge.
class MessageStore {
 public:
  void set(NodeId from, NodeId to, HermitianPsd q) { messages_[{from, to}] = std::move(q); }
  void set(PsdMessage m) { set(m.from, m.to, std::move(m.Q)); }

  /// Throws ProtocolError when the message has never been stored.
  const HermitianPsd& get(NodeId from, NodeId to) const;
  bool contains(NodeId from, NodeId to) const { return messages_.count({from, to}) != 0; }

  std::size_t size() const { return messages_.size(); }
  auto begin() const { return messages_.begin(); }
  auto end() const { return messages_.end(); }

  bool operator==(const MessageStore&) const = default;

 private:
  std::map<DirectedEdge, HermitianPsd> messages_;
};

struct InnerLoopConfig {
  int max_inner_iters = 50;
  double inner_tol = 1e-10;  // stop once the objective decreases by less than this
  bool warm_start = true;    // start from the current belief when one exists
};

/// Per-invocation record of the inner alternating minimization.
struct InnerLoopTrace {
  // Block objective tr(U^H Q_U U) + sum_k tr(V_k^H Q_k V_k) + 1/2 sum_k ||U^H H_k V_k||_F^2,
  // which each alternating step minimizes exactly; one entry per sweep.
  std::vector<double> objective;
  // tr(U^H R U) + sum_k tr(V_k^H S_k V_k) with R, S evaluated at the same
  // sweep, i.e. the cross leakage at full weight.
  std::vector<double> split_objective;
  int sweeps = 0;
};

/// Beliefs indexed by user; empty optional when not yet extracted.
struct BeliefSet {
  std::vector<std::optional<TruncatedUnitary>> U;
  std::vector<std::optional<TruncatedUnitary>> V;
};

/// Q_{var->fn} = sum of Q_{a->var} over the variable's neighbours except fn.
PsdMessage var_to_fn_message(const MessageStore& store, const FactorGraph& graph, NodeId variable,
                             NodeId function);

/// f_i -> U_i: sum_j H_ij V_j0 V_j0^H H_ij^H with V_j0 = nu_min(Q_{V_j->f_i}).
/// g_j -> V_j: sum_i H_ij^H U_i0 U_i0^H H_ij with U_i0 = nu_min(Q_{U_i->g_j}).
/// Sums run over connected links in ascending user order.
PsdMessage fn_to_own_var_message(const MessageStore& store, const FactorGraph& graph,
                                 const ChannelSet& channels, NodeId function, Rng& rng);

/// f_i -> V_j: H_ij^H U* U*^H H_ij, g_j -> U_i: H_ij V* V*^H H_ij^H, where the
/// starred matrix is the fixed point of the inner alternating minimization.
/// warm_start seeds the alternated variable (U_i for f_i, V_j for g_j); a
/// Haar draw from rng is used when it is absent.
PsdMessage fn_to_other_var_message(const MessageStore& store, const FactorGraph& graph,
                                   const ChannelSet& channels, NodeId function, NodeId target,
                                   const InnerLoopConfig& cfg,
                                   const std::optional<TruncatedUnitary>& warm_start, Rng& rng,
                                   InnerLoopTrace* trace = nullptr);

/// nu_min of the sum of all messages arriving at the variable.
TruncatedUnitary extract_belief(const MessageStore& store, const FactorGraph& graph, NodeId variable,
                                int d, Rng& rng);

/// Dispatches a directed edge to the matching update rule. The warm start for
/// inner loops is taken from beliefs when cfg.warm_start is set.
PsdMessage compute_message(const MessageStore& store, const FactorGraph& graph, const ChannelSet& channels,
                           NodeId from, NodeId to, const InnerLoopConfig& cfg, const BeliefSet& beliefs,
                           Rng& rng, InnerLoopTrace* trace = nullptr);

}  // namespace mpia
