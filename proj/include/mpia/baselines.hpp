// Stand-alone iterative leakage minimization (ILM): alternately set every
// receive filter to the weakest-eigenvalue subspace of its interference
// covariance, then every precoder to that of its reverse-link covariance.
#pragma once

#include <vector>

#include "mpia/factor_graph.hpp"
#include "mpia/matrix_kernel.hpp"

namespace mpia {

enum class IlmInit {
  // For each precoder V_j (j ascending), draw a Haar filter for every
  // connected receiver i != j (i ascending) and take nu_min of the induced
  // reverse-link covariance. This consumes the stream exactly like the first
  // g_j->V_j pass of zero-initialized message passing.
  mirror_message_passing,
  // One Haar draw per precoder, j ascending.
  haar_precoders,
};

struct IlmSnapshot {
  std::vector<TruncatedUnitary> U;
  std::vector<TruncatedUnitary> V;
};

struct IlmState {
  std::vector<TruncatedUnitary> precoders;  // V^[j], M x d
  std::vector<TruncatedUnitary> filters;    // U^[i], N x d
  std::vector<double> leakage_history;
  std::vector<IlmSnapshot> history;  // iterate pair at each recorded leakage
};

/// Each iteration updates the filters from the current precoders, records
/// the leakage of that pair, then updates the precoders from the new filters.
IlmState reference_ilm(const ChannelSet& channels, int iterations, Rng& rng,
                       IlmInit init = IlmInit::mirror_message_passing);

}  // namespace mpia
