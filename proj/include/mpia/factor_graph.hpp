// Channel description and the bipartite factor graph of the K-user MIMO
// interference channel.
//
// Variable nodes U_i (receive filters) and V_j (precoders), function nodes
// f_i (leakage seen at receiver i) and g_j (leakage caused by transmitter j).
// f_i touches U_i and every V_j whose link H_ij is present; g_j touches V_j
// and every U_i whose link H_ij is present.
#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpia/matrix_kernel.hpp"

namespace mpia {

// K x K connectivity; entry [i][j] is true when the link H_ij (transmitter j
// to receiver i) is present. Diagonal entries are ignored.
using ConnectivityMask = std::vector<std::vector<bool>>;

ConnectivityMask full_mask(int k);

struct ChannelSet {
  int K = 0;
  int N = 0;  // receive antennas
  int M = 0;  // transmit antennas
  int d = 0;  // streams per user
  std::vector<std::vector<CMatrix>> H;  // H[i][j] is N x M
  ConnectivityMask mask;

  bool connected(int i, int j) const { return i != j && mask[i][j]; }

  /// Throws DimensionError when shapes, dimensions or the mask are inconsistent.
  void validate() const;
};

/// Draws every present link i.i.d. unit-variance Gaussian; masked links are
/// zero. Links are drawn in row-major (i, j) order, diagonal included.
ChannelSet draw_channels(int K, int N, int M, int d, const ConnectivityMask& mask, Rng& rng);

/// All-zero channels with a full mask.
ChannelSet zero_channels(int K, int N, int M, int d);

enum class NodeKind { U = 0, V = 1, f = 2, g = 3 };

struct NodeId {
  NodeKind kind;
  int index;  // zero-based user index

  bool is_variable() const { return kind == NodeKind::U || kind == NodeKind::V; }
  auto operator<=>(const NodeId&) const = default;
};

inline NodeId U(int i) { return {NodeKind::U, i}; }
inline NodeId V(int j) { return {NodeKind::V, j}; }
inline NodeId f(int i) { return {NodeKind::f, i}; }
inline NodeId g(int j) { return {NodeKind::g, j}; }

/// One-based display name, e.g. "U_1", "g_3".
std::string to_string(NodeId n);

class LookupError : public std::out_of_range {
 public:
  explicit LookupError(const std::string& what) : std::out_of_range(what) {}
};

class FactorGraph {
 public:
  FactorGraph(int K, int N, int M, const ConnectivityMask& mask);

  int num_users() const { return K_; }
  std::size_t num_edges() const { return edges_.size(); }

  bool has_node(NodeId n) const;
  bool has_edge(NodeId a, NodeId b) const;

  /// Sorted neighbour list. Throws LookupError for unknown nodes.
  const std::vector<NodeId>& neighbors(NodeId n) const;

  /// Edges as (variable, function) pairs in sorted order.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }

  std::vector<NodeId> variable_nodes() const;
  std::vector<NodeId> function_nodes() const;

  /// Message dimension carried on an edge: N if the variable endpoint is a U
  /// node, M if it is a V node.
  int message_dim(NodeId a, NodeId b) const;

 private:
  void add_edge(NodeId var, NodeId fn);

  int K_;
  int N_;
  int M_;
  std::map<NodeId, std::vector<NodeId>> adjacency_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

FactorGraph build_graph(const ChannelSet& channels);

}  // namespace mpia
