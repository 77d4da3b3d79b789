// Interference leakage and alignment residuals.
#pragma once

#include <vector>

#include "mpia/factor_graph.hpp"
#include "mpia/matrix_kernel.hpp"

namespace mpia {

struct LeakageReport {
  std::vector<double> per_receiver;      // f_i
  std::vector<double> per_transmitter;   // g_j
  std::vector<std::vector<double>> per_link;  // [i][j] = ||U_i^H H_ij V_j||_F^2, zero diagonal
  double total = 0.0;                    // sum_i f_i
};

/// f_i = sum_j tr(U_i^H H_ij V_j V_j^H H_ij^H U_i) and
/// g_j = sum_i tr(V_j^H H_ij^H U_i U_i^H H_ij V_j) over connected links.
/// The two sides are evaluated through their own trace forms.
LeakageReport leakage(const ChannelSet& channels, const std::vector<TruncatedUnitary>& filters,
                      const std::vector<TruncatedUnitary>& precoders);

/// max over connected i != j of ||U_i^H H_ij V_j||_F.
double ia_residual(const ChannelSet& channels, const std::vector<TruncatedUnitary>& filters,
                   const std::vector<TruncatedUnitary>& precoders);

/// Symmetric-system properness heuristic M + N >= d (K + 1). Advisory only.
bool check_feasibility(int K, int N, int M, int d);

}  // namespace mpia
