#include "rslpa/incremental.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "rslpa/error.hpp"

namespace rslpa {
namespace {

bool contains(const std::vector<VertexId>& sorted, VertexId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

struct Message {
  VertexId target;
  std::uint32_t iteration;
  VertexId from;
  Label value;

  auto key() const { return std::tie(target, iteration, from); }
};

// Tracks which slots changed at least once; inner vectors are allocated
// on first touch.
class ChangeSet {
 public:
  explicit ChangeSet(std::size_t vertices) : flags_(vertices) {}

  bool mark(std::size_t index, std::uint32_t t, std::uint32_t length) {
    auto& f = flags_[index];
    if (f.empty()) f.assign(length, 0);
    if (f[t] != 0) return false;
    f[t] = 1;
    return true;
  }

 private:
  std::vector<std::vector<std::uint8_t>> flags_;
};

}  // namespace

RepickDecision decide_repick(const VertexDelta& delta, std::uint32_t t, VertexId current_source,
                             const RngStream& rng, std::uint64_t epoch) {
  RepickDecision d{delta.vertex, t, false, 0, 0};
  const VertexCategory category = delta.category();
  if (category == VertexCategory::kUnchanged) return d;

  const bool kept = contains(delta.kept, current_source);
  const bool removed = contains(delta.removed, current_source);
  if (!kept && !removed) {
    throw ConsistencyError("source " + std::to_string(current_source) + " of slot (" +
                           std::to_string(delta.vertex) + "," + std::to_string(t) +
                           ") was not a neighbor before the batch");
  }

  const std::size_t n_u = delta.kept.size();
  const std::size_t n_a = delta.added.size();
  const VertexId v = delta.vertex;
  if (category == VertexCategory::kLostOnly) {
    if (kept) return d;
    if (n_u == 0) {
      throw ConsistencyError("vertex " + std::to_string(v) +
                             " has no neighbor left; its labels are retired, not repicked");
    }
    d.repick = true;
    d.source = delta.kept[rng.uniform(n_u, v, t, DrawPurpose::kRepickSource, epoch)];
  } else if (removed) {
    // Uniform over kept + added.
    d.repick = true;
    const std::size_t r = rng.uniform(n_u + n_a, v, t, DrawPurpose::kRepickSource, epoch);
    d.source = r < n_u ? delta.kept[r] : delta.added[r - n_u];
  } else {
    const std::size_t r = rng.uniform(n_u + n_a, v, t, DrawPurpose::kRepickKeep, epoch);
    if (r < n_u) return d;
    d.repick = true;
    d.source = delta.added[rng.uniform(n_a, v, t, DrawPurpose::kRepickSource, epoch)];
  }
  d.position = static_cast<std::uint32_t>(rng.uniform(t, v, t, DrawPurpose::kRepickPosition, epoch));
  return d;
}

RepickDecision draw_created_slot(VertexId vertex, const std::vector<VertexId>& neighbors,
                                 std::uint32_t t, const RngStream& rng, std::uint64_t epoch) {
  RepickDecision d{vertex, t, true, 0, 0};
  d.source = neighbors[rng.uniform(neighbors.size(), vertex, t, DrawPurpose::kRepickSource, epoch)];
  d.position =
      static_cast<std::uint32_t>(rng.uniform(t, vertex, t, DrawPurpose::kRepickPosition, epoch));
  return d;
}

void align_state(LabelState& state, const Graph& new_graph, const DeltaMap& deltas) {
  // Re-align the vertex list with the new graph; vertices that first appear
  // in this batch start with their own label only.
  const auto ids = new_graph.vertices();
  std::vector<VertexLabels> aligned;
  aligned.reserve(ids.size());
  {
    std::size_t old = 0;
    for (VertexId id : ids) {
      if (old < state.vertices.size() && state.vertices[old].id < id) {
        throw ConsistencyError("vertex " + std::to_string(state.vertices[old].id) +
                               " missing from the new graph");
      }
      if (old < state.vertices.size() && state.vertices[old].id == id) {
        aligned.push_back(std::move(state.vertices[old++]));
        continue;
      }
      auto it = deltas.find(id);
      if (it == deltas.end() || !it->second.kept.empty() || !it->second.removed.empty()) {
        throw ConsistencyError("vertex " + std::to_string(id) +
                               " unknown to the label state but not introduced by the batch");
      }
      VertexLabels v;
      v.id = id;
      v.labels = {id};
      v.sources = {id};
      v.positions = {0};
      v.receivers.resize(1);
      aligned.push_back(std::move(v));
    }
    if (old != state.vertices.size()) {
      throw ConsistencyError("vertex " + std::to_string(state.vertices[old].id) +
                             " missing from the new graph");
    }
  }
  state.vertices = std::move(aligned);

  for (std::size_t i = 0; i < ids.size(); ++i) {
    const VertexLabels& v = state.vertices[i];
    const bool now_active = !new_graph.neighbors_at(i).empty();
    if (!deltas.contains(v.id) && v.active != now_active) {
      throw ConsistencyError("vertex " + std::to_string(v.id) +
                             " changed activity without appearing in the batch");
    }
  }
}

UpdateMetrics correction_propagate(LabelState& state, const Graph& new_graph,
                                   const DeltaMap& deltas, const RngStream& rng,
                                   const WaveObserver& observer) {
  const std::uint32_t T = state.iterations;
  const std::uint64_t epoch = state.epoch;
  UpdateMetrics metrics;

  align_state(state, new_graph, deltas);
  const auto ids = new_graph.vertices();
  const auto index = [&](VertexId id) { return *new_graph.index_of(id); };
  ChangeSet changed(state.vertices.size());

  // Phase 1: decide, drop stale records, retire and create slots.
  std::vector<RepickDecision> repicks;
  std::vector<std::size_t> isolated;
  for (const auto& [id, delta] : deltas) {
    const auto idx = new_graph.index_of(id);
    if (!idx) throw ConsistencyError("delta for unknown vertex " + std::to_string(id));
    VertexLabels& v = state.vertices[*idx];
    const std::size_t new_degree = delta.kept.size() + delta.added.size();
    if (new_graph.neighbors_at(*idx).size() != new_degree) {
      throw ConsistencyError("delta of vertex " + std::to_string(id) +
                             " does not match the new graph");
    }
    if (v.active && v.labels.size() != T + 1) {
      throw ConsistencyError("vertex " + std::to_string(id) + " has a stale label sequence");
    }
    if (T == 0) {
      v.active = new_degree > 0;
      continue;
    }

    if (v.active && new_degree == 0) {
      for (std::uint32_t t = 1; t <= T; ++t) {
        auto& src = state.vertices[index(v.sources[t])];
        if (!remove_receiver(src.receivers[v.positions[t]], Receiver{id, t})) {
          throw ConsistencyError("receiver record missing for slot (" + std::to_string(id) + "," +
                                 std::to_string(t) + ")");
        }
        ++metrics.record_removals;
        if (changed.mark(*idx, t, T + 1)) ++metrics.eta;
      }
      metrics.retired += T;
      isolated.push_back(*idx);
    } else if (!v.active && new_degree > 0) {
      for (std::uint32_t t = 1; t <= T; ++t) {
        repicks.push_back(draw_created_slot(id, delta.added, t, rng, epoch));
        // A created slot counts as changed even if its fetched value
        // equals the placeholder.
        if (changed.mark(*idx, t, T + 1)) ++metrics.eta;
      }
      metrics.created += T;
    } else if (v.active) {
      for (std::uint32_t t = 1; t <= T; ++t) {
        RepickDecision d = decide_repick(delta, t, v.sources[t], rng, epoch);
        if (!d.repick) continue;
        auto& src = state.vertices[index(v.sources[t])];
        if (!remove_receiver(src.receivers[v.positions[t]], Receiver{id, t})) {
          throw ConsistencyError("receiver record missing for slot (" + std::to_string(id) + "," +
                                 std::to_string(t) + ")");
        }
        ++metrics.record_removals;
        repicks.push_back(d);
      }
    }
  }
  metrics.repicks = repicks.size();

  for (std::size_t idx : isolated) {
    VertexLabels& v = state.vertices[idx];
    v.labels.resize(1);
    v.sources.resize(1);
    v.positions.resize(1);
    v.receivers.resize(1);
    v.active = false;
  }
  for (const auto& [id, delta] : deltas) {
    VertexLabels& v = state.vertices[index(id)];
    if (T > 0 && !v.active && !new_graph.neighbors(id).empty()) {
      v.active = true;
      v.labels.assign(T + 1, id);
      v.sources.assign(T + 1, id);
      v.positions.assign(T + 1, 0);
      v.receivers.resize(T + 1);
    }
  }

  // Register every new provenance before any value is read, so a source
  // slot corrected later in the waves still reaches its new receivers.
  for (const RepickDecision& d : repicks) {
    VertexLabels& v = state.vertices[index(d.vertex)];
    v.sources[d.iteration] = d.source;
    v.positions[d.iteration] = d.position;
    add_receiver(state.vertices[index(d.source)].receivers[d.position],
                 Receiver{d.vertex, d.iteration});
  }

  // Fetch round: all reads see the state before any fetched value lands.
  std::vector<Message> inbox;
  inbox.reserve(repicks.size());
  for (const RepickDecision& d : repicks) {
    inbox.push_back(Message{d.vertex, d.iteration, d.source,
                            state.vertices[index(d.source)].labels[d.position]});
  }
  metrics.fetches = inbox.size();

  bool fetch_round = true;
  while (!inbox.empty()) {
    std::sort(inbox.begin(), inbox.end(),
              [](const Message& a, const Message& b) { return a.key() < b.key(); });
    std::vector<Message> outbox;
    for (const Message& m : inbox) {
      const std::size_t idx = index(m.target);
      VertexLabels& v = state.vertices[idx];
      if (v.labels[m.iteration] == m.value) continue;
      v.labels[m.iteration] = m.value;
      ++metrics.corrections;
      if (changed.mark(idx, m.iteration, T + 1)) ++metrics.eta;
      for (const Receiver& r : v.receivers[m.iteration]) {
        outbox.push_back(Message{r.target, r.iteration, v.id, m.value});
      }
    }
    if (!fetch_round) {
      ++metrics.waves;
      metrics.wave_messages.push_back(inbox.size());
    }
    if (observer) observer(state, fetch_round ? 0 : metrics.waves);
    fetch_round = false;
    inbox = std::move(outbox);
  }

  if (!deltas.empty()) ++state.epoch;
  return metrics;
}

void audit_records(const LabelState& state, const Graph& graph) {
  const auto fail = [](const std::string& what) { throw CorruptionError(what); };
  if (state.vertices.size() != graph.vertex_count()) fail("vertex count differs from graph");
  for (std::size_t i = 0; i < state.vertices.size(); ++i) {
    const VertexLabels& v = state.vertices[i];
    const auto nbrs = graph.neighbors_at(i);
    for (std::uint32_t t = 1; t < v.labels.size(); ++t) {
      if (!std::binary_search(nbrs.begin(), nbrs.end(), v.sources[t])) {
        fail("source of slot (" + std::to_string(v.id) + "," + std::to_string(t) +
             ") is not a neighbor");
      }
      const VertexLabels* s = state.find(v.sources[t]);
      if (s == nullptr || v.positions[t] >= t ||
          !std::binary_search(s->receivers[v.positions[t]].begin(),
                              s->receivers[v.positions[t]].end(), Receiver{v.id, t})) {
        fail("slot (" + std::to_string(v.id) + "," + std::to_string(t) +
             ") missing from its source's receiver record");
      }
    }
    for (std::uint32_t t = 0; t < v.receivers.size(); ++t) {
      for (const Receiver& r : v.receivers[t]) {
        const VertexLabels* tar = state.find(r.target);
        if (tar == nullptr || r.iteration == 0 || r.iteration >= tar->labels.size() ||
            tar->sources[r.iteration] != v.id || tar->positions[r.iteration] != t) {
          fail("receiver record (" + std::to_string(r.target) + "," +
               std::to_string(r.iteration) + ") has no matching provenance");
        }
      }
    }
  }
}

}  // namespace rslpa
