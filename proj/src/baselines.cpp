#include "mpia/baselines.hpp"

#include <stdexcept>

#include "mpia/metrics.hpp"

namespace mpia {

namespace {

// sum_j H_ij V_j V_j^H H_ij^H over connected j != i
CMatrix receiver_covariance(const ChannelSet& ch, int i, const std::vector<TruncatedUnitary>& precoders) {
  CMatrix sum = CMatrix::Zero(ch.N, ch.N);
  for (int j = 0; j < ch.K; ++j)
    if (ch.connected(i, j)) sum += projected_outer(ch.H[i][j], precoders[j]);
  return hermitize(sum);
}

// sum_i H_ij^H U_i U_i^H H_ij over connected i != j
CMatrix transmitter_covariance(const ChannelSet& ch, int j, const std::vector<TruncatedUnitary>& filters) {
  CMatrix sum = CMatrix::Zero(ch.M, ch.M);
  for (int i = 0; i < ch.K; ++i)
    if (ch.connected(i, j)) sum += projected_outer(ch.H[i][j].adjoint(), filters[i]);
  return hermitize(sum);
}

}  // namespace

IlmState reference_ilm(const ChannelSet& channels, int iterations, Rng& rng, IlmInit init) {
  channels.validate();
  if (iterations < 0) throw std::invalid_argument("reference_ilm: negative iteration count");
  const int K = channels.K;
  const int d = channels.d;

  IlmState st;
  st.precoders.resize(K);
  st.filters.resize(K);
  for (int j = 0; j < K; ++j) {
    if (init == IlmInit::haar_precoders) {
      st.precoders[j] = random_truncated_unitary(channels.M, d, rng);
      continue;
    }
    CMatrix sum = CMatrix::Zero(channels.M, channels.M);
    for (int i = 0; i < K; ++i)
      if (channels.connected(i, j))
        sum += projected_outer(channels.H[i][j].adjoint(), random_truncated_unitary(channels.N, d, rng));
    st.precoders[j] = nu_min(hermitize(sum), d, rng);
  }

  for (int t = 0; t < iterations; ++t) {
    for (int i = 0; i < K; ++i) st.filters[i] = nu_min(receiver_covariance(channels, i, st.precoders), d, rng);
    st.history.push_back({st.filters, st.precoders});
    st.leakage_history.push_back(leakage(channels, st.filters, st.precoders).total);
    for (int j = 0; j < K; ++j) st.precoders[j] = nu_min(transmitter_covariance(channels, j, st.filters), d, rng);
  }
  return st;
}

}  // namespace mpia
