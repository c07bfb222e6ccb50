#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rslpa/cover.hpp"
#include "rslpa/graph.hpp"
#include "rslpa/label_engine.hpp"

namespace rslpa {

// Label memory of original SLPA, aligned with Graph::vertices(). Active
// vertices hold T+1 labels in the order they were appended.
struct MemoryState {
  std::uint32_t iterations = 0;
  std::vector<VertexId> ids;
  std::vector<std::vector<Label>> memory;

  bool operator==(const MemoryState&) const = default;
};

// Each iteration every vertex sends one uniform draw from its memory to each
// neighbor, and every vertex appends the plurality label among what it
// received (ties broken uniformly).
MemoryState slpa_run(const Graph& graph, std::uint32_t iterations, std::uint64_t seed);

// Draw contexts shared with the BSP simulator.
Label slpa_spoken_label(const RngStream& rng, VertexId speaker, VertexId listener,
                        std::uint32_t t, const std::vector<Label>& memory);
Label slpa_plurality(const RngStream& rng, VertexId listener, std::uint32_t t,
                     std::vector<Label> received);

// Each label kept by a vertex with relative frequency >= tau names a
// community; singleton and duplicate communities are dropped.
Cover slpa_threshold(const MemoryState& state, double tau);

inline constexpr double kSlpaDefaultTau = 0.2;
inline constexpr std::uint32_t kSlpaDefaultIterations = 100;
inline constexpr std::uint64_t kVotingOutcomeCap = 10'000'000;

// Exact distribution of the plurality winner when each voter submits one
// uniform draw from its sequence and ties break uniformly. Enumerates the
// whole product space; throws DomainError when it exceeds `cap` outcomes.
std::map<Label, double> voting_distribution(const std::vector<std::vector<Label>>& sequences,
                                            std::uint64_t cap = kVotingOutcomeCap);

}  // namespace rslpa
