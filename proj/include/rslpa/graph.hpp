#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rslpa/rng.hpp"

namespace rslpa {

// Undirected edge, always stored with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  Edge() = default;
  Edge(VertexId a, VertexId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  auto operator<=>(const Edge&) const = default;
};

// Simple undirected graph over arbitrary non-negative ids. Immutable once
// built; edits go through apply_batch which produces a new graph.
class Graph {
 public:
  Graph() = default;

  // Self-loops and repeated edges are dropped. `extra_vertices` adds
  // vertices that may have no incident edge.
  static Graph from_edges(std::span<const Edge> edges,
                          std::span<const VertexId> extra_vertices = {});

  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t active_vertex_count() const;

  // Ascending vertex ids; position in this span is the dense index.
  std::span<const VertexId> vertices() const { return ids_; }
  std::optional<std::size_t> index_of(VertexId id) const;
  bool has_vertex(VertexId id) const { return index_of(id).has_value(); }
  bool has_edge(VertexId a, VertexId b) const;

  // Ascending neighbor ids. Throws ConsistencyError on an unknown vertex.
  std::span<const VertexId> neighbors(VertexId id) const;
  std::span<const VertexId> neighbors_at(std::size_t index) const { return adjacency_[index]; }
  std::size_t degree(VertexId id) const { return neighbors(id).size(); }

  std::vector<Edge> edges() const;

  bool operator==(const Graph&) const = default;

 private:
  std::vector<VertexId> ids_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::size_t edge_count_ = 0;
};

// A set of insertions and deletions applied atomically. Both sides are kept
// sorted and free of duplicates.
class EditBatch {
 public:
  EditBatch() = default;

  // Throws ValidationError on a self-loop or a pair present on both sides.
  static EditBatch make(std::vector<Edge> insertions, std::vector<Edge> deletions);

  const std::vector<Edge>& insertions() const { return insertions_; }
  const std::vector<Edge>& deletions() const { return deletions_; }
  std::size_t size() const { return insertions_.size() + deletions_.size(); }
  bool empty() const { return size() == 0; }

  EditBatch inverse() const;

  bool operator==(const EditBatch&) const = default;

 private:
  std::vector<Edge> insertions_;
  std::vector<Edge> deletions_;
};

enum class VertexCategory { kUnchanged, kLostOnly, kHasNew };

const char* to_string(VertexCategory category);

struct VertexDelta {
  VertexId vertex = 0;
  std::vector<VertexId> kept;
  std::vector<VertexId> removed;
  std::vector<VertexId> added;

  VertexCategory category() const;
  bool operator==(const VertexDelta&) const = default;
};

// Only vertices whose neighbor set changed appear; every other vertex is
// implicitly Unchanged.
using DeltaMap = std::map<VertexId, VertexDelta>;

enum class BatchMode { kStrict, kLenient };

struct BatchResult {
  Graph graph;
  DeltaMap deltas;
  // Edits skipped in lenient mode: deletions of missing edges and
  // insertions of existing ones.
  std::vector<Edge> skipped_insertions;
  std::vector<Edge> skipped_deletions;
};

BatchResult apply_batch(const Graph& graph, const EditBatch& batch,
                        BatchMode mode = BatchMode::kStrict);

// floor(size/2) uniform deletions among existing edges and ceil(size/2)
// uniform insertions among non-adjacent vertex pairs.
EditBatch generate_random_batch(const Graph& graph, std::size_t size, std::uint64_t seed);

// Uniform random graph with exactly `edges` edges over ids 0..vertices-1.
Graph generate_random_graph(std::size_t vertices, std::size_t edges, std::uint64_t seed);

}  // namespace rslpa

#include "rslpa/cover.hpp"

namespace rslpa {

struct PlantedParams {
  std::size_t communities = 2;
  std::size_t community_size = 10;
  // Vertices shared by each pair of adjacent communities. Communities form
  // a chain for two communities and a ring for three or more.
  std::size_t overlap = 0;
  double p_in = 1.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
};

struct PlantedGraph {
  Graph graph;
  Cover truth;
};

PlantedGraph generate_planted_cover_graph(const PlantedParams& params);

}  // namespace rslpa
