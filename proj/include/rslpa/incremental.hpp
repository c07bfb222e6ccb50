#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rslpa/graph.hpp"
#include "rslpa/label_engine.hpp"
#include "rslpa/rng.hpp"

namespace rslpa {

struct RepickDecision {
  VertexId vertex = 0;
  std::uint32_t iteration = 0;
  bool repick = false;
  // Only meaningful when repick is set.
  VertexId source = 0;
  std::uint32_t position = 0;

  bool operator==(const RepickDecision&) const = default;
};

// Decides whether slot `t` of `delta.vertex` survives the batch.
//
//   Unchanged                 keep
//   LostOnly, src kept        keep
//   LostOnly, src removed     repick src uniformly from kept
//   HasNew,   src removed     repick src uniformly from kept + added
//   HasNew,   src kept        keep with probability n_u / (n_u + n_a),
//                             otherwise repick src uniformly from added
//
// A repick draws pos uniformly from [0, t-1]. `epoch` separates draws of
// successive updates. Throws ConsistencyError when the source is not an old
// neighbor or the vertex has no neighbor left to pick from.
RepickDecision decide_repick(const VertexDelta& delta, std::uint32_t t, VertexId current_source,
                             const RngStream& rng, std::uint64_t epoch);

// Provenance for slot t of a vertex that had no neighbors before the
// batch: every slot is drawn fresh from the new neighbors.
RepickDecision draw_created_slot(VertexId vertex, const std::vector<VertexId>& neighbors,
                                 std::uint32_t t, const RngStream& rng, std::uint64_t epoch);

struct UpdateMetrics {
  // Distinct label slots whose value changed, including slots retired by
  // isolation and slots created for newly active vertices.
  std::uint64_t eta = 0;
  std::uint64_t repicks = 0;
  std::uint64_t record_removals = 0;
  std::uint64_t fetches = 0;
  // Value-changing writes over the whole update, fetches included.
  std::uint64_t corrections = 0;
  std::uint64_t retired = 0;
  std::uint64_t created = 0;
  // Correction rounds after the fetch round, and messages per round.
  std::uint32_t waves = 0;
  std::vector<std::uint64_t> wave_messages;

  bool operator==(const UpdateMetrics&) const = default;
};

// Moves the per-vertex records into the new graph's vertex order, adding
// vertices introduced by the batch, and checks that every activity change
// is explained by a delta. Throws ConsistencyError otherwise.
void align_state(LabelState& state, const Graph& new_graph, const DeltaMap& deltas);

// Called after the fetch round (wave 0) and after every correction wave.
using WaveObserver = std::function<void(const LabelState&, std::uint32_t wave)>;

// Correction Propagation. Brings `state`, built on the pre-batch graph, in
// line with `new_graph`: repicks slots whose provenance the batch
// invalidated, then forwards every value change along receiver records
// until no slot changes. Throws ConsistencyError if the state does not
// match the deltas.
UpdateMetrics correction_propagate(LabelState& state, const Graph& new_graph,
                                   const DeltaMap& deltas, const RngStream& rng,
                                   const WaveObserver& observer = {});

// Provenance/record duality only; holds between waves, when labels may
// still be stale.
void audit_records(const LabelState& state, const Graph& graph);

}  // namespace rslpa
