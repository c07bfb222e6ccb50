#include "rslpa/bsp.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <tuple>

#include "rslpa/error.hpp"

namespace rslpa::bsp {
namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One superstep's worth of outgoing traffic, bucketed by receiving worker.
template <typename Msg>
class Exchange {
 public:
  Exchange(const Cluster& cluster, std::uint32_t round, std::string phase)
      : cluster_(&cluster), inboxes_(cluster.workers()) {
    metrics_.round = round;
    metrics_.phase = std::move(phase);
  }

  void send(VertexId from, VertexId to, PayloadClass payload, Msg msg) {
    const std::size_t dst = cluster_->owner(to);
    ++metrics_.logical;
    ++metrics_.by_class[static_cast<std::size_t>(payload)];
    if (cluster_->owner(from) != dst) ++metrics_.inter_worker;
    inboxes_[dst].push_back(std::move(msg));
  }

  std::vector<Msg>& inbox(std::size_t worker) { return inboxes_[worker]; }
  const RoundMetrics& metrics() const { return metrics_; }
  bool empty() const { return metrics_.logical == 0; }

 private:
  const Cluster* cluster_;
  std::vector<std::vector<Msg>> inboxes_;
  RoundMetrics metrics_;
};

// Vertex indices partitioned by owner, ascending within each worker.
std::vector<std::vector<std::size_t>> partition(const Cluster& cluster,
                                                std::span<const VertexId> ids) {
  std::vector<std::vector<std::size_t>> owned(cluster.workers());
  for (std::size_t i = 0; i < ids.size(); ++i) owned[cluster.owner(ids[i])].push_back(i);
  return owned;
}

struct Request {
  VertexId requester;
  std::uint32_t iteration;
  VertexId source;
  std::uint32_t position;
};

struct Response {
  VertexId target;
  std::uint32_t iteration;
  VertexId from;
  Label value;

  auto key() const { return std::tie(target, iteration, from); }
};

struct Appended {
  VertexId target;
  VertexId source;
  std::uint32_t position;
  Label value;
};

struct Spoken {
  VertexId listener;
  Label label;
};

std::string slot_name(VertexId v, std::uint32_t t) {
  return "(" + std::to_string(v) + "," + std::to_string(t) + ")";
}

}  // namespace

const char* to_string(PayloadClass payload) {
  switch (payload) {
    case PayloadClass::kLabelRequest: return "label_request";
    case PayloadClass::kLabelResponse: return "label_response";
    case PayloadClass::kCorrection: return "correction";
    case PayloadClass::kRecordRemoval: return "record_removal";
    case PayloadClass::kSpokenLabel: return "spoken_label";
    case PayloadClass::kComponentProbe: return "component_probe";
    case PayloadClass::kCount: break;
  }
  return "unknown";
}

Cluster::Cluster(std::size_t workers) : workers_(workers) {
  if (workers == 0) throw DomainError("need at least one worker");
}

std::size_t Cluster::owner(VertexId v) const { return mix(v) % workers_; }

RslpaRun sim_run_rslpa(const Graph& graph, std::uint32_t iterations, std::uint64_t seed,
                       std::size_t workers) {
  const Cluster cluster(workers);
  const RngStream rng(seed);
  RslpaRun run;
  run.state = initialize(graph);
  LabelState& state = run.state;
  const auto ids = graph.vertices();
  const auto owned = partition(cluster, ids);

  for (std::uint32_t t = 1; t <= iterations; ++t) {
    // Listeners pick a provenance and ask the source for the label.
    Exchange<Request> ask(cluster, t, "request");
    for (const auto& mine : owned) {
      for (std::size_t i : mine) {
        const auto nbrs = graph.neighbors_at(i);
        if (nbrs.empty()) continue;
        const VertexId src = draw_propagation_source(rng, ids[i], t, nbrs);
        const std::uint32_t pos = draw_propagation_position(rng, ids[i], t);
        ask.send(ids[i], src, PayloadClass::kLabelRequest, Request{ids[i], t, src, pos});
      }
    }
    // Sources record the receiver and answer with the stored label.
    Exchange<Appended> answer(cluster, t, "respond");
    for (std::size_t w = 0; w < workers; ++w) {
      for (const Request& r : ask.inbox(w)) {
        VertexLabels& s = state.at(r.source);
        add_receiver(s.receivers[r.position], Receiver{r.requester, t});
        answer.send(r.source, r.requester, PayloadClass::kLabelResponse,
                    Appended{r.requester, r.source, r.position, s.labels[r.position]});
      }
    }
    for (std::size_t w = 0; w < workers; ++w) {
      for (const Appended& r : answer.inbox(w)) {
        VertexLabels& v = state.at(r.target);
        v.labels.push_back(r.value);
        v.sources.push_back(r.source);
        v.positions.push_back(r.position);
        v.receivers.emplace_back();
      }
    }
    RoundMetrics m = ask.metrics();
    m.phase = "propagate";
    for (std::size_t c = 0; c < m.by_class.size(); ++c) m.by_class[c] += answer.metrics().by_class[c];
    m.logical += answer.metrics().logical;
    m.inter_worker += answer.metrics().inter_worker;
    run.rounds.push_back(m);
    state.iterations = t;
  }
  return run;
}

SlpaRun sim_run_slpa(const Graph& graph, std::uint32_t iterations, std::uint64_t seed,
                     std::size_t workers) {
  const Cluster cluster(workers);
  const RngStream rng(seed);
  SlpaRun run;
  MemoryState& state = run.state;
  const auto ids = graph.vertices();
  state.ids.assign(ids.begin(), ids.end());
  state.memory.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) state.memory[i] = {ids[i]};
  const auto owned = partition(cluster, ids);

  for (std::uint32_t t = 1; t <= iterations; ++t) {
    Exchange<Spoken> speak(cluster, t, "speak");
    for (const auto& mine : owned) {
      for (std::size_t i : mine) {
        for (VertexId n : graph.neighbors_at(i)) {
          speak.send(ids[i], n, PayloadClass::kSpokenLabel,
                     Spoken{n, slpa_spoken_label(rng, ids[i], n, t, state.memory[i])});
        }
      }
    }
    std::vector<std::vector<Label>> heard(ids.size());
    for (std::size_t w = 0; w < workers; ++w) {
      for (const Spoken& s : speak.inbox(w)) heard[*graph.index_of(s.listener)].push_back(s.label);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (heard[i].empty()) continue;
      state.memory[i].push_back(slpa_plurality(rng, ids[i], t, std::move(heard[i])));
    }
    run.rounds.push_back(speak.metrics());
    state.iterations = t;
  }
  return run;
}

UpdateRun sim_run_update(LabelState& state, const Graph& new_graph, const DeltaMap& deltas,
                         std::uint64_t seed, std::size_t workers) {
  const Cluster cluster(workers);
  const RngStream rng(seed);
  const std::uint32_t T = state.iterations;
  const std::uint64_t epoch = state.epoch;
  UpdateRun run;
  UpdateMetrics& metrics = run.metrics;

  align_state(state, new_graph, deltas);
  const auto ids = new_graph.vertices();
  const auto index = [&](VertexId id) { return *new_graph.index_of(id); };

  // Same preconditions as the library, checked before any message moves.
  for (const auto& [id, delta] : deltas) {
    const auto idx = new_graph.index_of(id);
    if (!idx) throw ConsistencyError("delta for unknown vertex " + std::to_string(id));
    const VertexLabels& v = state.vertices[*idx];
    if (new_graph.neighbors_at(*idx).size() != delta.kept.size() + delta.added.size()) {
      throw ConsistencyError("delta of vertex " + std::to_string(id) +
                             " does not match the new graph");
    }
    if (v.active && v.labels.size() != T + 1) {
      throw ConsistencyError("vertex " + std::to_string(id) + " has a stale label sequence");
    }
  }
  if (T == 0) {
    run.rounds.push_back(RoundMetrics{0, "classify", 0, 0, {}});
    for (const auto& [id, delta] : deltas) {
      state.vertices[index(id)].active = !new_graph.neighbors(id).empty();
    }
    if (!deltas.empty()) ++state.epoch;
    return run;
  }

  std::vector<std::vector<std::uint8_t>> changed(ids.size());
  const auto mark = [&](std::size_t idx, std::uint32_t t) {
    auto& f = changed[idx];
    if (f.empty()) f.assign(T + 1, 0);
    if (f[t] == 0) {
      f[t] = 1;
      ++metrics.eta;
    }
  };

  // Superstep 0: owners classify their changed vertices. Removals and
  // requests share the barrier; receivers apply removals first.
  Exchange<Request> removals(cluster, 0, "classify");
  Exchange<Request> requests(cluster, 0, "classify");
  std::vector<std::vector<std::size_t>> isolated(workers);
  for (const auto& [id, delta] : deltas) {
    const std::size_t idx = index(id);
    VertexLabels& v = state.vertices[idx];
    const bool now_active = !new_graph.neighbors_at(idx).empty();
    if (v.active && !now_active) {
      for (std::uint32_t t = 1; t <= T; ++t) {
        removals.send(id, v.sources[t], PayloadClass::kRecordRemoval,
                      Request{id, t, v.sources[t], v.positions[t]});
        mark(idx, t);
      }
      metrics.retired += T;
      isolated[cluster.owner(id)].push_back(idx);
    } else if (!v.active && now_active) {
      v.active = true;
      v.labels.assign(T + 1, id);
      v.sources.assign(T + 1, id);
      v.positions.assign(T + 1, 0);
      v.receivers.resize(T + 1);
      for (std::uint32_t t = 1; t <= T; ++t) {
        const RepickDecision d = draw_created_slot(id, delta.added, t, rng, epoch);
        v.sources[t] = d.source;
        v.positions[t] = d.position;
        requests.send(id, d.source, PayloadClass::kLabelRequest, Request{id, t, d.source, d.position});
        mark(idx, t);
      }
      metrics.created += T;
    } else if (v.active) {
      for (std::uint32_t t = 1; t <= T; ++t) {
        const RepickDecision d = decide_repick(delta, t, v.sources[t], rng, epoch);
        if (!d.repick) continue;
        removals.send(id, v.sources[t], PayloadClass::kRecordRemoval,
                      Request{id, t, v.sources[t], v.positions[t]});
        v.sources[t] = d.source;
        v.positions[t] = d.position;
        requests.send(id, d.source, PayloadClass::kLabelRequest, Request{id, t, d.source, d.position});
      }
    }
  }
  metrics.record_removals = removals.metrics().logical;
  metrics.fetches = requests.metrics().logical;
  metrics.repicks = metrics.fetches;
  {
    RoundMetrics m = removals.metrics();
    for (std::size_t c = 0; c < m.by_class.size(); ++c) m.by_class[c] += requests.metrics().by_class[c];
    m.logical += requests.metrics().logical;
    m.inter_worker += requests.metrics().inter_worker;
    run.rounds.push_back(m);
  }

  // Superstep 1: sources drop stale records, register the new ones and
  // answer from their current labels. No label has been written yet.
  Exchange<Response> inflight(cluster, 1, "fetch");
  for (std::size_t w = 0; w < workers; ++w) {
    for (const Request& r : removals.inbox(w)) {
      if (!remove_receiver(state.at(r.source).receivers[r.position],
                           Receiver{r.requester, r.iteration})) {
        throw ConsistencyError("receiver record missing for slot " +
                               slot_name(r.requester, r.iteration));
      }
    }
    for (std::size_t idx : isolated[w]) {
      VertexLabels& v = state.vertices[idx];
      v.labels.resize(1);
      v.sources.resize(1);
      v.positions.resize(1);
      v.receivers.resize(1);
      v.active = false;
    }
  }
  // Registration must be complete on every worker before any answer can
  // trigger a correction, which the barrier after this superstep ensures.
  for (std::size_t w = 0; w < workers; ++w) {
    for (const Request& r : requests.inbox(w)) {
      VertexLabels& s = state.at(r.source);
      add_receiver(s.receivers[r.position], Receiver{r.requester, r.iteration});
      inflight.send(r.source, r.requester, PayloadClass::kLabelResponse,
                    Response{r.requester, r.iteration, r.source, s.labels[r.position]});
    }
  }
  if (!inflight.empty()) run.rounds.push_back(inflight.metrics());

  // Later supersteps: apply what arrived, forward actual changes.
  std::uint32_t round = 2;
  bool fetch_round = true;
  Exchange<Response> current = std::move(inflight);
  while (!current.empty()) {
    Exchange<Response> next(cluster, round, "wave " + std::to_string(round - 1));
    for (std::size_t w = 0; w < workers; ++w) {
      auto& inbox = current.inbox(w);
      std::sort(inbox.begin(), inbox.end(),
                [](const Response& a, const Response& b) { return a.key() < b.key(); });
      for (const Response& m : inbox) {
        const std::size_t idx = index(m.target);
        VertexLabels& v = state.vertices[idx];
        if (v.labels[m.iteration] == m.value) continue;
        v.labels[m.iteration] = m.value;
        ++metrics.corrections;
        mark(idx, m.iteration);
        for (const Receiver& r : v.receivers[m.iteration]) {
          next.send(v.id, r.target, PayloadClass::kCorrection,
                    Response{r.target, r.iteration, v.id, m.value});
        }
      }
    }
    if (!fetch_round) {
      ++metrics.waves;
      metrics.wave_messages.push_back(current.metrics().logical);
    }
    fetch_round = false;
    if (!next.empty()) run.rounds.push_back(next.metrics());
    current = std::move(next);
    ++round;
  }

  if (!deltas.empty()) ++state.epoch;
  return run;
}

ComponentsRun sim_connected_components(const Graph& graph, const EdgeWeights& weights, double tau,
                                       std::size_t workers) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("threshold " + std::to_string(tau) + " outside [0,1]");
  }
  const Cluster cluster(workers);
  const auto ids = graph.vertices();
  const std::size_t n = ids.size();

  std::vector<std::pair<std::size_t, std::size_t>> kept;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights.weights[k] >= tau) {
      kept.emplace_back(*graph.index_of(weights.edges[k].u), *graph.index_of(weights.edges[k].v));
    }
  }

  // Parent pointers over dense indices; ids ascend with index, so the
  // minimum index is the minimum id.
  std::vector<std::size_t> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = i;
  std::vector<std::size_t> gf = f;

  ComponentsRun run;
  while (!kept.empty()) {
    Exchange<char> probe(cluster, run.rounds, "hook");
    std::vector<std::size_t> next = f;
    for (const auto& [a, b] : kept) {
      for (const auto& [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
        // v tells u its grandparent; u hooks itself and its parent.
        probe.send(ids[v], ids[u], PayloadClass::kComponentProbe, 0);
        next[u] = std::min(next[u], gf[v]);
        if (f[u] != u) probe.send(ids[u], ids[f[u]], PayloadClass::kComponentProbe, 0);
        next[f[u]] = std::min(next[f[u]], gf[v]);
      }
    }
    for (std::size_t u = 0; u < n; ++u) next[u] = std::min(next[u], gf[u]);
    f = std::move(next);

    // Grandparent fetch: a request and an answer per non-root vertex.
    std::vector<std::size_t> ngf(n);
    for (std::size_t u = 0; u < n; ++u) {
      if (f[u] != u) {
        probe.send(ids[u], ids[f[u]], PayloadClass::kComponentProbe, 0);
        probe.send(ids[f[u]], ids[u], PayloadClass::kComponentProbe, 0);
      }
      ngf[u] = f[f[u]];
    }
    ++run.rounds;
    run.metrics.push_back(probe.metrics());
    if (ngf == gf) break;
    gf = std::move(ngf);
  }

  std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++size[gf[i]];
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.neighbors_at(i).empty()) continue;
    const std::size_t root = gf[i];
    if (size[root] < 2) {
      run.components.isolated.push_back(ids[i]);
      continue;
    }
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = run.components.components.size();
      run.components.components.emplace_back();
    }
    run.components.components[slot[root]].push_back(ids[i]);
  }
  return run;
}

}  // namespace rslpa::bsp
