#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "rslpa/graph.hpp"
#include "rslpa/rng.hpp"

namespace rslpa {

using Label = VertexId;

// (target, k): vertex `target` copied this label at its iteration k.
struct Receiver {
  VertexId target = 0;
  std::uint32_t iteration = 0;

  auto operator<=>(const Receiver&) const = default;
};

// Label sequence of one vertex with provenance. Index t holds l^t, src^t,
// pos^t and R^t; index 0 is the vertex's own label and has no provenance.
// Inactive (degree-0) vertices hold only index 0.
struct VertexLabels {
  VertexId id = 0;
  bool active = false;
  std::vector<Label> labels;
  std::vector<VertexId> sources;
  std::vector<std::uint32_t> positions;
  // Each entry is kept sorted so the state has one canonical form.
  std::vector<std::vector<Receiver>> receivers;

  bool operator==(const VertexLabels&) const = default;
};

struct LabelState {
  std::uint32_t iterations = 0;
  // Number of non-empty incremental updates applied; folded into repick
  // draws so successive updates never reuse a draw context.
  std::uint64_t epoch = 0;
  // Ascending by id, aligned with Graph::vertices().
  std::vector<VertexLabels> vertices;

  const VertexLabels& at(VertexId id) const;
  VertexLabels& at(VertexId id);
  const VertexLabels* find(VertexId id) const;
  VertexLabels* find(VertexId id);

  bool operator==(const LabelState&) const = default;
};

void add_receiver(std::vector<Receiver>& records, Receiver r);
// Returns false when the record was not present.
bool remove_receiver(std::vector<Receiver>& records, Receiver r);

LabelState initialize(const Graph& graph);

// One synchronous round: every active vertex copies l_src^pos for a uniform
// neighbor src and a uniform position pos in [0, t-1]. Requires
// t == state.iterations + 1.
void propagate_iteration(LabelState& state, const Graph& graph, std::uint32_t t,
                         const RngStream& rng);

LabelState run(const Graph& graph, std::uint32_t iterations, std::uint64_t seed);

// Draw contexts shared by the library path and the BSP simulator.
VertexId draw_propagation_source(const RngStream& rng, VertexId vertex, std::uint32_t t,
                                 std::span<const VertexId> neighbors);
std::uint32_t draw_propagation_position(const RngStream& rng, VertexId vertex, std::uint32_t t);

// Probability that a uniform (sequence, position) pick returns each label.
// All sequences must have the same positive length.
std::map<Label, double> uniform_pick_distribution(const std::vector<std::vector<Label>>& sequences);

// Full invariant audit of a state against its graph: shape, provenance,
// and provenance/record duality. Throws CorruptionError naming the first
// violated check.
void audit_state(const LabelState& state, const Graph& graph);

}  // namespace rslpa
