#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rslpa/cover.hpp"
#include "rslpa/graph.hpp"
#include "rslpa/label_engine.hpp"

namespace rslpa {

// Edge weights aligned with Graph::edges() (ascending edge order).
struct EdgeWeights {
  std::vector<Edge> edges;
  std::vector<double> weights;

  std::size_t size() const { return edges.size(); }
  bool empty() const { return edges.empty(); }
  // Throws ConsistencyError if the edge is not present.
  double at(VertexId a, VertexId b) const;
  double max_weight() const;
};

// Probability that independent uniform draws from the two sequences agree.
double edge_similarity(std::span<const Label> a, std::span<const Label> b);

EdgeWeights compute_weights(const Graph& graph, const LabelState& state);

// min over non-isolated vertices of their largest incident weight.
double select_tau2(const Graph& graph, const EdgeWeights& weights);

struct Components {
  // Canonical order: members ascending, components by smallest member.
  std::vector<Community> components;
  // Vertices of degree >= 1 left alone once low-weight edges are dropped.
  std::vector<VertexId> isolated;
};

// Connected components of the subgraph keeping edges with weight >= tau.
// Degree-0 vertices are ignored.
Components components_above(const Graph& graph, const EdgeWeights& weights, double tau);

// -sum (|C|/V) ln(|C|/V) over the given community sizes.
double size_entropy(std::span<const std::size_t> sizes, std::size_t vertices);

inline constexpr double kDefaultScanStep = 0.001;

struct Tau1Selection {
  double tau = 0.0;
  double entropy = 0.0;
  // Number of thresholds at which components were actually computed.
  std::size_t evaluations = 0;
};

// Scans tau2, tau2 + step, ... up to the largest weight and returns the
// smallest threshold whose components maximize size_entropy. Only grid
// points where the filtered edge set changes are evaluated.
Tau1Selection select_tau1(const Graph& graph, const EdgeWeights& weights, double tau2,
                          double step = kDefaultScanStep);

// Entropy of components_above at tau, with sizes measured against the
// number of non-isolated vertices of the graph.
double threshold_entropy(const Graph& graph, const EdgeWeights& weights, double tau);

struct Extraction {
  Cover cover;
  // Vertices of degree >= 1 that ended up in no community.
  std::vector<VertexId> unassigned;
};

// Components at tau1 become communities; an isolated vertex then joins the
// community of every non-isolated neighbor it reaches with weight >= tau2.
Extraction extract_cover(const Graph& graph, const EdgeWeights& weights, double tau1, double tau2);

struct PostprocessOptions {
  std::optional<double> tau1;
  std::optional<double> tau2;
  double step = kDefaultScanStep;
};

struct PostprocessResult {
  Extraction extraction;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double entropy = 0.0;
};

// Weights, automatic or explicit thresholds, and extraction in one call.
// An edgeless graph yields an empty cover.
PostprocessResult postprocess(const Graph& graph, const LabelState& state,
                              const PostprocessOptions& options = {});

// Disjoint sets over dense indices, union by size with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t set_size(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace rslpa
