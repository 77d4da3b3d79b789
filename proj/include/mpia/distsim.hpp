// Traffic accounting for a distributed deployment of the message-passing
// schedule: graph nodes are hosted on physical devices, and a message costs
// air time only when its endpoints live on different devices.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mpia/factor_graph.hpp"
#include "mpia/scheduler.hpp"

namespace mpia {

enum class DeviceRole { receiver, transmitter };

struct DeviceId {
  DeviceRole role;
  int index;  // zero-based

  auto operator<=>(const DeviceId&) const = default;
};

/// "receiver_1", "transmitter_3", ...
std::string to_string(DeviceId dev);
std::string_view role_name(DeviceRole role);

struct DeviceMapping {
  std::map<NodeId, DeviceId> assignment;

  /// Throws LookupError for unmapped nodes.
  DeviceId device_of(NodeId node) const;
  std::vector<DeviceId> devices() const;
};

/// U_i and f_i on receiver i, V_j and g_j on transmitter j.
DeviceMapping default_mapping(int K);

enum class LinkClass { local, over_the_air };

LinkClass classify(const DeviceMapping& mapping, NodeId from, NodeId to);

struct DeviceTraffic {
  std::size_t messages_ota = 0;
  std::size_t bytes_ota = 0;
  std::size_t messages_local = 0;

  bool operator==(const DeviceTraffic&) const = default;
};

/// Sends are attributed to the device hosting the source node.
struct TrafficReport {
  std::map<DeviceId, DeviceTraffic> per_device;
  DeviceTraffic totals;
  std::vector<DeviceTraffic> per_iteration;
};

/// Full n x n matrix as n^2 doubles.
inline std::size_t message_bytes(int n) { return static_cast<std::size_t>(n) * n * sizeof(double); }

TrafficReport account(const Schedule& schedule, const FactorGraph& graph, const DeviceMapping& mapping,
                      int iterations);

}  // namespace mpia
