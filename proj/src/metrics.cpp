#include "mpia/metrics.hpp"

#include <algorithm>

namespace mpia {

namespace {

void check_shapes(const ChannelSet& ch, const std::vector<TruncatedUnitary>& filters,
                  const std::vector<TruncatedUnitary>& precoders) {
  if (static_cast<int>(filters.size()) != ch.K || static_cast<int>(precoders.size()) != ch.K)
    throw DimensionError("leakage: expected one filter and one precoder per user");
  for (int k = 0; k < ch.K; ++k) {
    if (filters[k].rows() != ch.N || filters[k].cols() != ch.d)
      throw DimensionError("leakage: filter U_" + std::to_string(k + 1) + " is not N x d");
    if (precoders[k].rows() != ch.M || precoders[k].cols() != ch.d)
      throw DimensionError("leakage: precoder V_" + std::to_string(k + 1) + " is not M x d");
  }
}

}  // namespace

LeakageReport leakage(const ChannelSet& channels, const std::vector<TruncatedUnitary>& filters,
                      const std::vector<TruncatedUnitary>& precoders) {
  check_shapes(channels, filters, precoders);
  const int K = channels.K;
  LeakageReport rep;
  rep.per_receiver.assign(K, 0.0);
  rep.per_transmitter.assign(K, 0.0);
  rep.per_link.assign(K, std::vector<double>(K, 0.0));

  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      if (!channels.connected(i, j)) continue;
      const CMatrix& h = channels.H[i][j];
      // receiver side: tr(U^H H V V^H H^H U)
      const double rx = quadratic_trace(projected_outer(h, precoders[j]), filters[i]);
      // transmitter side: tr(V^H H^H U U^H H V)
      const double tx = quadratic_trace(projected_outer(h.adjoint(), filters[i]), precoders[j]);
      rep.per_link[i][j] = rx;
      rep.per_receiver[i] += rx;
      rep.per_transmitter[j] += tx;
    }
  for (double v : rep.per_receiver) rep.total += v;
  return rep;
}

double ia_residual(const ChannelSet& channels, const std::vector<TruncatedUnitary>& filters,
                   const std::vector<TruncatedUnitary>& precoders) {
  check_shapes(channels, filters, precoders);
  double worst = 0.0;
  for (int i = 0; i < channels.K; ++i)
    for (int j = 0; j < channels.K; ++j)
      if (channels.connected(i, j))
        worst = std::max(worst, (filters[i].adjoint() * channels.H[i][j] * precoders[j]).norm());
  return worst;
}

bool check_feasibility(int K, int N, int M, int d) { return M + N >= d * (K + 1); }

}  // namespace mpia
