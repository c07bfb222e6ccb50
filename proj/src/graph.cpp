#include "rslpa/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include "rslpa/error.hpp"

namespace rslpa {
namespace {

std::string format_edges(const std::vector<Edge>& edges, std::size_t limit = 10) {
  std::ostringstream out;
  for (std::size_t i = 0; i < edges.size() && i < limit; ++i) {
    if (i > 0) out << ", ";
    out << edges[i].u << "-" << edges[i].v;
  }
  if (edges.size() > limit) out << ", ... (" << edges.size() << " total)";
  return out.str();
}

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

Graph Graph::from_edges(std::span<const Edge> edges, std::span<const VertexId> extra_vertices) {
  Graph g;
  std::vector<VertexId> ids(extra_vertices.begin(), extra_vertices.end());
  ids.reserve(ids.size() + 2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  g.ids_ = std::move(ids);
  g.adjacency_.resize(g.ids_.size());

  for (const Edge& e : edges) {
    if (e.u == e.v) continue;
    const std::size_t a = *g.index_of(e.u);
    const std::size_t b = *g.index_of(e.v);
    g.adjacency_[a].push_back(e.v);
    g.adjacency_[b].push_back(e.u);
  }
  std::size_t total = 0;
  for (auto& nbrs : g.adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    total += nbrs.size();
  }
  g.edge_count_ = total / 2;
  return g;
}

std::size_t Graph::active_vertex_count() const {
  return static_cast<std::size_t>(std::count_if(adjacency_.begin(), adjacency_.end(),
                                                [](const auto& n) { return !n.empty(); }));
}

std::optional<std::size_t> Graph::index_of(VertexId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

bool Graph::has_edge(VertexId a, VertexId b) const {
  auto idx = index_of(a);
  if (!idx) return false;
  const auto& nbrs = adjacency_[*idx];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::span<const VertexId> Graph::neighbors(VertexId id) const {
  auto idx = index_of(id);
  if (!idx) throw ConsistencyError("unknown vertex " + std::to_string(id));
  return adjacency_[*idx];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    for (VertexId n : adjacency_[i]) {
      if (ids_[i] < n) out.emplace_back(ids_[i], n);
    }
  }
  return out;
}

EditBatch EditBatch::make(std::vector<Edge> insertions, std::vector<Edge> deletions) {
  for (const auto* side : {&insertions, &deletions}) {
    for (const Edge& e : *side) {
      if (e.u == e.v) {
        throw ValidationError("batch contains self-loop " + std::to_string(e.u) + "-" +
                              std::to_string(e.v));
      }
    }
  }
  sort_unique(insertions);
  sort_unique(deletions);
  std::vector<Edge> both;
  std::set_intersection(insertions.begin(), insertions.end(), deletions.begin(), deletions.end(),
                        std::back_inserter(both));
  if (!both.empty()) {
    throw ValidationError("pairs both inserted and deleted in one batch: " + format_edges(both));
  }
  EditBatch b;
  b.insertions_ = std::move(insertions);
  b.deletions_ = std::move(deletions);
  return b;
}

EditBatch EditBatch::inverse() const {
  EditBatch b;
  b.insertions_ = deletions_;
  b.deletions_ = insertions_;
  return b;
}

const char* to_string(VertexCategory category) {
  switch (category) {
    case VertexCategory::kUnchanged:
      return "unchanged";
    case VertexCategory::kLostOnly:
      return "lost-only";
    case VertexCategory::kHasNew:
      return "has-new";
  }
  return "?";
}

VertexCategory VertexDelta::category() const {
  if (!added.empty()) return VertexCategory::kHasNew;
  if (!removed.empty()) return VertexCategory::kLostOnly;
  return VertexCategory::kUnchanged;
}

BatchResult apply_batch(const Graph& graph, const EditBatch& batch, BatchMode mode) {
  BatchResult result;
  std::vector<Edge> insertions;
  std::vector<Edge> deletions;
  for (const Edge& e : batch.deletions()) {
    if (graph.has_edge(e.u, e.v)) {
      deletions.push_back(e);
    } else {
      result.skipped_deletions.push_back(e);
    }
  }
  for (const Edge& e : batch.insertions()) {
    if (!graph.has_edge(e.u, e.v)) {
      insertions.push_back(e);
    } else {
      result.skipped_insertions.push_back(e);
    }
  }
  if (mode == BatchMode::kStrict &&
      (!result.skipped_deletions.empty() || !result.skipped_insertions.empty())) {
    std::string msg = "batch does not match graph:";
    if (!result.skipped_deletions.empty()) {
      msg += " deletions of missing edges [" + format_edges(result.skipped_deletions) + "]";
    }
    if (!result.skipped_insertions.empty()) {
      msg += " insertions of existing edges [" + format_edges(result.skipped_insertions) + "]";
    }
    throw ValidationError(msg);
  }

  // Per-vertex removed/added lists; both edit lists are sorted so each
  // vertex's lists come out sorted after a final sort.
  std::map<VertexId, VertexDelta> deltas;
  for (const Edge& e : deletions) {
    deltas[e.u].removed.push_back(e.v);
    deltas[e.v].removed.push_back(e.u);
  }
  for (const Edge& e : insertions) {
    deltas[e.u].added.push_back(e.v);
    deltas[e.v].added.push_back(e.u);
  }
  for (auto& [id, delta] : deltas) {
    delta.vertex = id;
    std::sort(delta.removed.begin(), delta.removed.end());
    std::sort(delta.added.begin(), delta.added.end());
    if (graph.has_vertex(id)) {
      const auto old = graph.neighbors(id);
      std::set_difference(old.begin(), old.end(), delta.removed.begin(), delta.removed.end(),
                          std::back_inserter(delta.kept));
    }
  }

  std::vector<Edge> edges = graph.edges();
  std::vector<Edge> remaining;
  remaining.reserve(edges.size() + insertions.size());
  std::set_difference(edges.begin(), edges.end(), deletions.begin(), deletions.end(),
                      std::back_inserter(remaining));
  remaining.insert(remaining.end(), insertions.begin(), insertions.end());
  result.graph = Graph::from_edges(remaining, graph.vertices());
  result.deltas = std::move(deltas);
  return result;
}

EditBatch generate_random_batch(const Graph& graph, std::size_t size, std::uint64_t seed) {
  const std::size_t n_delete = size / 2;
  const std::size_t n_insert = size - n_delete;
  const std::size_t n = graph.vertex_count();
  const std::size_t m = graph.edge_count();
  const std::size_t all_pairs = n < 2 ? 0 : n * (n - 1) / 2;
  const std::size_t non_edges = all_pairs - m;
  if (n_delete > m) {
    throw DomainError("batch size " + std::to_string(size) + " infeasible: deletion side needs " +
                      std::to_string(n_delete) + " edges but graph has " + std::to_string(m));
  }
  if (n_insert > non_edges) {
    throw DomainError("batch size " + std::to_string(size) +
                      " infeasible: insertion side needs " + std::to_string(n_insert) +
                      " non-edges but graph has " + std::to_string(non_edges));
  }

  std::vector<Edge> edges = graph.edges();
  SequentialRng del_rng(seed, DrawPurpose::kBatchDelete);
  for (std::size_t i = 0; i < n_delete; ++i) {
    const std::size_t j = i + del_rng.uniform(edges.size() - i);
    std::swap(edges[i], edges[j]);
  }
  std::vector<Edge> deletions(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_delete));

  std::vector<Edge> insertions;
  SequentialRng ins_rng(seed, DrawPurpose::kBatchInsert);
  const auto ids = graph.vertices();
  if (n_insert > 0 && non_edges <= 4 * n_insert) {
    // Dense regime: enumerate non-edges and take a uniform subset.
    std::vector<Edge> candidates;
    candidates.reserve(non_edges);
    for (std::size_t a = 0; a < n; ++a) {
      const auto nbrs = graph.neighbors_at(a);
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!std::binary_search(nbrs.begin(), nbrs.end(), ids[b])) {
          candidates.emplace_back(ids[a], ids[b]);
        }
      }
    }
    for (std::size_t i = 0; i < n_insert; ++i) {
      const std::size_t j = i + ins_rng.uniform(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }
    insertions.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n_insert));
  } else {
    std::set<Edge> chosen;
    while (chosen.size() < n_insert) {
      const VertexId a = ids[ins_rng.uniform(n)];
      const VertexId b = ids[ins_rng.uniform(n)];
      if (a == b || graph.has_edge(a, b)) continue;
      chosen.emplace(a, b);
    }
    insertions.assign(chosen.begin(), chosen.end());
  }
  return EditBatch::make(std::move(insertions), std::move(deletions));
}

Graph generate_random_graph(std::size_t vertices, std::size_t edges, std::uint64_t seed) {
  const std::size_t all_pairs = vertices < 2 ? 0 : vertices * (vertices - 1) / 2;
  if (edges > all_pairs) {
    throw DomainError("cannot place " + std::to_string(edges) + " edges on " +
                      std::to_string(vertices) + " vertices");
  }
  SequentialRng rng(seed, DrawPurpose::kGenerator);
  std::set<Edge> chosen;
  if (edges * 2 > all_pairs) {
    std::vector<Edge> all;
    all.reserve(all_pairs);
    for (VertexId a = 0; a < vertices; ++a) {
      for (VertexId b = a + 1; b < vertices; ++b) all.emplace_back(a, b);
    }
    for (std::size_t i = 0; i < edges; ++i) {
      std::swap(all[i], all[i + rng.uniform(all.size() - i)]);
    }
    chosen.insert(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(edges));
  } else {
    while (chosen.size() < edges) {
      const VertexId a = rng.uniform(vertices);
      const VertexId b = rng.uniform(vertices);
      if (a != b) chosen.emplace(a, b);
    }
  }
  std::vector<VertexId> ids(vertices);
  for (std::size_t i = 0; i < vertices; ++i) ids[i] = i;
  const std::vector<Edge> list(chosen.begin(), chosen.end());
  return Graph::from_edges(list, ids);
}

PlantedGraph generate_planted_cover_graph(const PlantedParams& p) {
  if (!(p.p_in >= 0.0 && p.p_in <= 1.0) || !(p.p_out >= 0.0 && p.p_out <= 1.0)) {
    throw DomainError("edge probabilities must lie in [0,1]");
  }
  if (p.communities == 0 || p.community_size == 0) {
    throw DomainError("need at least one community of positive size");
  }
  if (p.overlap >= p.community_size) {
    throw DomainError("overlap must be smaller than the community size");
  }
  if (p.communities >= 3 && 2 * p.overlap > p.community_size) {
    throw DomainError("ring layout needs 2*overlap <= community size");
  }
  if (p.communities == 1 && p.overlap != 0) {
    throw DomainError("a single community cannot overlap");
  }

  const std::size_t stride = p.community_size - p.overlap;
  std::size_t n = 0;
  if (p.communities == 1) {
    n = p.community_size;
  } else if (p.communities == 2) {
    n = 2 * p.community_size - p.overlap;
  } else {
    n = p.communities * stride;
  }

  PlantedGraph out;
  std::vector<std::vector<std::size_t>> member_of(n);
  for (std::size_t c = 0; c < p.communities; ++c) {
    Community comm;
    for (std::size_t j = 0; j < p.community_size; ++j) {
      const std::size_t v = (c * stride + j) % n;
      comm.push_back(v);
      member_of[v].push_back(c);
    }
    out.truth.communities.push_back(std::move(comm));
  }
  out.truth.canonicalize();

  SequentialRng rng(p.seed, DrawPurpose::kGenerator);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      bool shared = false;
      for (std::size_t c : member_of[a]) {
        if (std::find(member_of[b].begin(), member_of[b].end(), c) != member_of[b].end()) {
          shared = true;
          break;
        }
      }
      const double prob = shared ? p.p_in : p.p_out;
      if (prob > 0.0 && rng.unit() < prob) edges.emplace_back(a, b);
    }
  }
  std::vector<VertexId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  out.graph = Graph::from_edges(edges, ids);
  return out;
}

}  // namespace rslpa
