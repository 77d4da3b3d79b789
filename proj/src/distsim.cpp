#include "mpia/distsim.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpia {

std::string_view role_name(DeviceRole role) { return role == DeviceRole::receiver ? "receiver" : "transmitter"; }

std::string to_string(DeviceId dev) { return std::string(role_name(dev.role)) + "_" + std::to_string(dev.index + 1); }

DeviceId DeviceMapping::device_of(NodeId node) const {
  auto it = assignment.find(node);
  if (it == assignment.end()) throw LookupError("node " + to_string(node) + " is not mapped to a device");
  return it->second;
}

std::vector<DeviceId> DeviceMapping::devices() const {
  std::vector<DeviceId> out;
  for (const auto& [node, dev] : assignment) out.push_back(dev);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DeviceMapping default_mapping(int K) {
  if (K < 2) throw std::invalid_argument("default_mapping: need at least two users");
  DeviceMapping m;
  for (int k = 0; k < K; ++k) {
    m.assignment[U(k)] = {DeviceRole::receiver, k};
    m.assignment[f(k)] = {DeviceRole::receiver, k};
    m.assignment[V(k)] = {DeviceRole::transmitter, k};
    m.assignment[g(k)] = {DeviceRole::transmitter, k};
  }
  return m;
}

LinkClass classify(const DeviceMapping& mapping, NodeId from, NodeId to) {
  return mapping.device_of(from) == mapping.device_of(to) ? LinkClass::local : LinkClass::over_the_air;
}

TrafficReport account(const Schedule& schedule, const FactorGraph& graph, const DeviceMapping& mapping,
                      int iterations) {
  if (iterations < 0) throw std::invalid_argument("account: negative iteration count");
  std::map<DeviceId, DeviceTraffic> one_iteration;
  for (DeviceId dev : mapping.devices()) one_iteration[dev];
  DeviceTraffic iteration_total;

  for (MessageFamily fam : schedule.families) {
    for (const auto& [from, to] : expand_family(fam, graph)) {
      DeviceTraffic& slot = one_iteration[mapping.device_of(from)];
      if (classify(mapping, from, to) == LinkClass::over_the_air) {
        const std::size_t bytes = message_bytes(graph.message_dim(from, to));
        ++slot.messages_ota;
        slot.bytes_ota += bytes;
        ++iteration_total.messages_ota;
        iteration_total.bytes_ota += bytes;
      } else {
        ++slot.messages_local;
        ++iteration_total.messages_local;
      }
    }
  }

  TrafficReport rep;
  const auto n = static_cast<std::size_t>(iterations);
  for (const auto& [dev, t] : one_iteration) {
    DeviceTraffic scaled{t.messages_ota * n, t.bytes_ota * n, t.messages_local * n};
    rep.per_device[dev] = scaled;
    rep.totals.messages_ota += scaled.messages_ota;
    rep.totals.bytes_ota += scaled.bytes_ota;
    rep.totals.messages_local += scaled.messages_local;
  }
  rep.per_iteration.assign(n, iteration_total);
  return rep;
}

}  // namespace mpia
