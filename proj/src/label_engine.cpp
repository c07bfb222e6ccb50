#include "rslpa/label_engine.hpp"

#include <algorithm>
#include <string>

#include "rslpa/error.hpp"

namespace rslpa {
namespace {

auto find_vertex(auto& vertices, VertexId id) {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), id,
                             [](const VertexLabels& v, VertexId x) { return v.id < x; });
  return (it != vertices.end() && it->id == id) ? &*it : nullptr;
}

std::string slot_name(VertexId v, std::uint32_t t) {
  return "(" + std::to_string(v) + "," + std::to_string(t) + ")";
}

}  // namespace

const VertexLabels* LabelState::find(VertexId id) const { return find_vertex(vertices, id); }
VertexLabels* LabelState::find(VertexId id) { return find_vertex(vertices, id); }

const VertexLabels& LabelState::at(VertexId id) const {
  const auto* v = find(id);
  if (v == nullptr) throw ConsistencyError("label state has no vertex " + std::to_string(id));
  return *v;
}

VertexLabels& LabelState::at(VertexId id) {
  auto* v = find(id);
  if (v == nullptr) throw ConsistencyError("label state has no vertex " + std::to_string(id));
  return *v;
}

void add_receiver(std::vector<Receiver>& records, Receiver r) {
  records.insert(std::lower_bound(records.begin(), records.end(), r), r);
}

bool remove_receiver(std::vector<Receiver>& records, Receiver r) {
  auto it = std::lower_bound(records.begin(), records.end(), r);
  if (it == records.end() || *it != r) return false;
  records.erase(it);
  return true;
}

LabelState initialize(const Graph& graph) {
  LabelState state;
  state.vertices.reserve(graph.vertex_count());
  const auto ids = graph.vertices();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    VertexLabels v;
    v.id = ids[i];
    v.active = !graph.neighbors_at(i).empty();
    v.labels = {ids[i]};
    v.sources = {ids[i]};
    v.positions = {0};
    v.receivers.resize(1);
    state.vertices.push_back(std::move(v));
  }
  return state;
}

VertexId draw_propagation_source(const RngStream& rng, VertexId vertex, std::uint32_t t,
                                 std::span<const VertexId> neighbors) {
  return neighbors[rng.uniform(neighbors.size(), vertex, t, DrawPurpose::kPropagateSource)];
}

std::uint32_t draw_propagation_position(const RngStream& rng, VertexId vertex, std::uint32_t t) {
  return static_cast<std::uint32_t>(rng.uniform(t, vertex, t, DrawPurpose::kPropagatePosition));
}

void propagate_iteration(LabelState& state, const Graph& graph, std::uint32_t t,
                         const RngStream& rng) {
  if (t != state.iterations + 1) {
    throw ConsistencyError("propagation out of sequence: state is at iteration " +
                           std::to_string(state.iterations) + ", asked for " + std::to_string(t));
  }
  if (state.vertices.size() != graph.vertex_count()) {
    throw ConsistencyError("label state and graph disagree on the vertex set");
  }
  const auto ids = graph.vertices();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    VertexLabels& v = state.vertices[i];
    if (v.id != ids[i]) throw ConsistencyError("label state and graph disagree on the vertex set");
    const auto nbrs = graph.neighbors_at(i);
    if (nbrs.empty()) continue;
    const VertexId src = draw_propagation_source(rng, v.id, t, nbrs);
    const std::uint32_t pos = draw_propagation_position(rng, v.id, t);
    // Positions < t were fixed in earlier rounds, so reading while writing
    // this round's slots is order independent.
    VertexLabels& s = state.vertices[*graph.index_of(src)];
    v.labels.push_back(s.labels[pos]);
    v.sources.push_back(src);
    v.positions.push_back(pos);
    v.receivers.emplace_back();
    add_receiver(s.receivers[pos], Receiver{v.id, t});
  }
  state.iterations = t;
}

LabelState run(const Graph& graph, std::uint32_t iterations, std::uint64_t seed) {
  LabelState state = initialize(graph);
  const RngStream rng(seed);
  for (std::uint32_t t = 1; t <= iterations; ++t) propagate_iteration(state, graph, t, rng);
  return state;
}

std::map<Label, double> uniform_pick_distribution(
    const std::vector<std::vector<Label>>& sequences) {
  if (sequences.empty()) throw ValidationError("need at least one sequence");
  const std::size_t m = sequences.front().size();
  if (m == 0) throw ValidationError("sequences must be non-empty");
  std::map<Label, std::size_t> counts;
  for (const auto& s : sequences) {
    if (s.size() != m) throw ValidationError("sequences must all have the same length");
    for (Label l : s) ++counts[l];
  }
  const double total = static_cast<double>(sequences.size() * m);
  std::map<Label, double> dist;
  for (const auto& [l, c] : counts) dist[l] = static_cast<double>(c) / total;
  return dist;
}

void audit_state(const LabelState& state, const Graph& graph) {
  const auto fail = [](const std::string& what) { throw CorruptionError(what); };
  const std::uint32_t T = state.iterations;
  if (state.vertices.size() != graph.vertex_count()) fail("vertex count differs from graph");
  const auto ids = graph.vertices();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const VertexLabels& v = state.vertices[i];
    if (v.id != ids[i]) fail("vertex set differs from graph at index " + std::to_string(i));
    const bool active = !graph.neighbors_at(i).empty();
    if (v.active != active) fail("activity flag wrong for vertex " + std::to_string(v.id));
    const std::size_t len = active ? T + 1 : 1;
    if (v.labels.size() != len || v.sources.size() != len || v.positions.size() != len ||
        v.receivers.size() != len) {
      fail("sequence length wrong for vertex " + std::to_string(v.id));
    }
    if (v.labels[0] != v.id) fail("initial label of vertex " + std::to_string(v.id));
    for (std::uint32_t t = 0; t < len; ++t) {
      if (!std::is_sorted(v.receivers[t].begin(), v.receivers[t].end()) ||
          std::adjacent_find(v.receivers[t].begin(), v.receivers[t].end()) !=
              v.receivers[t].end()) {
        fail("receiver record not canonical at " + slot_name(v.id, t));
      }
    }
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const VertexLabels& v = state.vertices[i];
    const auto nbrs = graph.neighbors_at(i);
    for (std::uint32_t t = 1; t < v.labels.size(); ++t) {
      const VertexId src = v.sources[t];
      const std::uint32_t pos = v.positions[t];
      if (!std::binary_search(nbrs.begin(), nbrs.end(), src)) {
        fail("source of " + slot_name(v.id, t) + " is not a neighbor");
      }
      if (pos >= t) fail("position of " + slot_name(v.id, t) + " out of range");
      const VertexLabels* s = state.find(src);
      if (s == nullptr || pos >= s->labels.size()) {
        fail("source slot of " + slot_name(v.id, t) + " missing");
      }
      if (v.labels[t] != s->labels[pos]) {
        fail("label of " + slot_name(v.id, t) + " differs from its source slot");
      }
      if (!std::binary_search(s->receivers[pos].begin(), s->receivers[pos].end(),
                              Receiver{v.id, t})) {
        fail("slot " + slot_name(v.id, t) + " missing from its source's receiver record");
      }
    }
    for (std::uint32_t t = 0; t < v.receivers.size(); ++t) {
      for (const Receiver& r : v.receivers[t]) {
        const VertexLabels* tar = state.find(r.target);
        if (tar == nullptr || r.iteration == 0 || r.iteration >= tar->labels.size() ||
            tar->sources[r.iteration] != v.id || tar->positions[r.iteration] != t) {
          fail("receiver record " + slot_name(r.target, r.iteration) + " at " +
               slot_name(v.id, t) + " has no matching provenance");
        }
      }
    }
  }
}

}  // namespace rslpa
