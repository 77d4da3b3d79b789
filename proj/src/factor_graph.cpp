#include "mpia/factor_graph.hpp"

#include <algorithm>

namespace mpia {

ConnectivityMask full_mask(int k) { return ConnectivityMask(k, std::vector<bool>(k, true)); }

void ChannelSet::validate() const {
  if (K < 1 || N < 1 || M < 1 || d < 1) throw DimensionError("ChannelSet: dimensions must be positive");
  if (d > std::min(N, M)) throw DimensionError("ChannelSet: d exceeds min(N, M)");
  if (static_cast<int>(H.size()) != K || static_cast<int>(mask.size()) != K)
    throw DimensionError("ChannelSet: expected K rows of channels and mask");
  for (int i = 0; i < K; ++i) {
    if (static_cast<int>(H[i].size()) != K || static_cast<int>(mask[i].size()) != K)
      throw DimensionError("ChannelSet: expected K columns of channels and mask");
    for (int j = 0; j < K; ++j) {
      if (H[i][j].rows() != N || H[i][j].cols() != M)
        throw DimensionError("ChannelSet: H_" + std::to_string(i + 1) + std::to_string(j + 1) + " is not N x M");
      if (i != j && !mask[i][j] && H[i][j].norm() != 0.0)
        throw DimensionError("ChannelSet: masked link H_" + std::to_string(i + 1) + std::to_string(j + 1) +
                             " is not zero");
    }
  }
}

ChannelSet draw_channels(int K, int N, int M, int d, const ConnectivityMask& mask, Rng& rng) {
  ChannelSet ch{K, N, M, d, {}, mask};
  ch.H.assign(K, std::vector<CMatrix>(K));
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      CMatrix h = random_gaussian_matrix(N, M, rng);
      ch.H[i][j] = (i == j || mask[i][j]) ? h : CMatrix::Zero(N, M);
    }
  ch.validate();
  return ch;
}

ChannelSet zero_channels(int K, int N, int M, int d) {
  ChannelSet ch{K, N, M, d, {}, full_mask(K)};
  ch.H.assign(K, std::vector<CMatrix>(K, CMatrix::Zero(N, M)));
  return ch;
}

std::string to_string(NodeId n) {
  static constexpr const char* names[] = {"U", "V", "f", "g"};
  return std::string(names[static_cast<int>(n.kind)]) + "_" + std::to_string(n.index + 1);
}

FactorGraph::FactorGraph(int K, int N, int M, const ConnectivityMask& mask) : K_(K), N_(N), M_(M) {
  if (static_cast<int>(mask.size()) != K) throw DimensionError("FactorGraph: mask must be K x K");
  for (NodeKind kind : {NodeKind::U, NodeKind::V, NodeKind::f, NodeKind::g})
    for (int i = 0; i < K; ++i) adjacency_[{kind, i}];

  for (int i = 0; i < K; ++i) {
    if (static_cast<int>(mask[i].size()) != K) throw DimensionError("FactorGraph: mask must be K x K");
    add_edge(U(i), f(i));
    add_edge(V(i), g(i));
    for (int j = 0; j < K; ++j) {
      if (i == j || !mask[i][j]) continue;
      add_edge(V(j), f(i));
      add_edge(U(i), g(j));
    }
  }
  for (auto& [node, nbrs] : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  std::sort(edges_.begin(), edges_.end());
}

void FactorGraph::add_edge(NodeId var, NodeId fn) {
  adjacency_[var].push_back(fn);
  adjacency_[fn].push_back(var);
  edges_.emplace_back(var, fn);
}

bool FactorGraph::has_node(NodeId n) const { return adjacency_.count(n) != 0; }

bool FactorGraph::has_edge(NodeId a, NodeId b) const {
  auto it = adjacency_.find(a);
  if (it == adjacency_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), b);
}

const std::vector<NodeId>& FactorGraph::neighbors(NodeId n) const {
  auto it = adjacency_.find(n);
  if (it == adjacency_.end()) throw LookupError("unknown graph node " + to_string(n));
  return it->second;
}

std::vector<NodeId> FactorGraph::variable_nodes() const {
  std::vector<NodeId> out;
  for (const auto& [node, nbrs] : adjacency_)
    if (node.is_variable()) out.push_back(node);
  return out;
}

std::vector<NodeId> FactorGraph::function_nodes() const {
  std::vector<NodeId> out;
  for (const auto& [node, nbrs] : adjacency_)
    if (!node.is_variable()) out.push_back(node);
  return out;
}

int FactorGraph::message_dim(NodeId a, NodeId b) const {
  if (!has_edge(a, b)) throw LookupError("no edge between " + to_string(a) + " and " + to_string(b));
  const NodeId var = a.is_variable() ? a : b;
  return var.kind == NodeKind::U ? N_ : M_;
}

FactorGraph build_graph(const ChannelSet& channels) {
  return FactorGraph(channels.K, channels.N, channels.M, channels.mask);
}

}  // namespace mpia
