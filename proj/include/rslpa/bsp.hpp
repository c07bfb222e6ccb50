#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rslpa/graph.hpp"
#include "rslpa/incremental.hpp"
#include "rslpa/label_engine.hpp"
#include "rslpa/postprocess.hpp"
#include "rslpa/slpa.hpp"

namespace rslpa::bsp {

// In-process bulk-synchronous harness. Vertices are owned by workers
// (hash of id mod worker count); within a superstep a worker only writes
// vertices it owns, and everything crossing vertices travels as a message
// delivered at the next barrier. Messages are counted, not transported.

enum class PayloadClass : std::size_t {
  kLabelRequest,
  kLabelResponse,
  kCorrection,
  kRecordRemoval,
  kSpokenLabel,
  kComponentProbe,
  kCount,
};

const char* to_string(PayloadClass payload);

struct RoundMetrics {
  std::uint32_t round = 0;
  std::string phase;
  std::uint64_t logical = 0;
  std::uint64_t inter_worker = 0;
  std::array<std::uint64_t, static_cast<std::size_t>(PayloadClass::kCount)> by_class{};

  std::uint64_t count(PayloadClass c) const { return by_class[static_cast<std::size_t>(c)]; }
};

class Cluster {
 public:
  explicit Cluster(std::size_t workers);

  std::size_t workers() const { return workers_; }
  std::size_t owner(VertexId v) const;

 private:
  std::size_t workers_;
};

struct RslpaRun {
  LabelState state;
  std::vector<RoundMetrics> rounds;  // one per propagation iteration
};

// Same draws as label-engine run(), so the state is bit-identical to it.
RslpaRun sim_run_rslpa(const Graph& graph, std::uint32_t iterations, std::uint64_t seed,
                       std::size_t workers);

struct SlpaRun {
  MemoryState state;
  std::vector<RoundMetrics> rounds;
};

SlpaRun sim_run_slpa(const Graph& graph, std::uint32_t iterations, std::uint64_t seed,
                     std::size_t workers);

struct UpdateRun {
  UpdateMetrics metrics;
  // classify, then fetch (if anything was repicked), then one per wave.
  std::vector<RoundMetrics> rounds;
};

// Correction Propagation as message rounds; result and metrics are
// bit-identical to correction_propagate under the same seed.
UpdateRun sim_run_update(LabelState& state, const Graph& new_graph, const DeltaMap& deltas,
                         std::uint64_t seed, std::size_t workers);

struct ComponentsRun {
  Components components;
  // Hook-and-shortcut iterations; each is a fixed group of supersteps.
  std::uint32_t rounds = 0;
  std::vector<RoundMetrics> metrics;
};

// Minimum-label connected components with pointer jumping over edges of
// weight >= tau. Output equals components_above exactly.
ComponentsRun sim_connected_components(const Graph& graph, const EdgeWeights& weights, double tau,
                                       std::size_t workers);

}  // namespace rslpa::bsp
