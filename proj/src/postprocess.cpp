#include "rslpa/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rslpa/error.hpp"

namespace rslpa {
namespace {

std::uint64_t common_pairs(const std::vector<Label>& a, const std::vector<Label>& b) {
  // Both sorted: sum over shared labels of count_a * count_b.
  std::uint64_t total = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      const Label l = a[i];
      std::uint64_t ca = 0;
      std::uint64_t cb = 0;
      while (i < a.size() && a[i] == l) ++ca, ++i;
      while (j < b.size() && b[j] == l) ++cb, ++j;
      total += ca * cb;
    }
  }
  return total;
}

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("threshold " + std::to_string(tau) + " outside [0,1]");
  }
}

std::vector<std::size_t> component_sizes(const Components& c) {
  std::vector<std::size_t> sizes;
  sizes.reserve(c.components.size());
  for (const auto& comp : c.components) sizes.push_back(comp.size());
  return sizes;
}

}  // namespace

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

double EdgeWeights::at(VertexId a, VertexId b) const {
  const Edge e(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) {
    throw ConsistencyError("no weight for edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
  }
  return weights[static_cast<std::size_t>(it - edges.begin())];
}

double EdgeWeights::max_weight() const {
  return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
}

double edge_similarity(std::span<const Label> a, std::span<const Label> b) {
  if (a.empty() || b.empty()) throw DomainError("similarity of an empty label sequence");
  std::vector<Label> sa(a.begin(), a.end());
  std::vector<Label> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return static_cast<double>(common_pairs(sa, sb)) /
         (static_cast<double>(sa.size()) * static_cast<double>(sb.size()));
}

EdgeWeights compute_weights(const Graph& graph, const LabelState& state) {
  if (state.vertices.size() != graph.vertex_count()) {
    throw ConsistencyError("label state and graph disagree on the vertex set");
  }
  std::vector<std::vector<Label>> sorted(state.vertices.size());
  for (std::size_t i = 0; i < state.vertices.size(); ++i) {
    if (graph.neighbors_at(i).empty()) continue;
    sorted[i] = state.vertices[i].labels;
    std::sort(sorted[i].begin(), sorted[i].end());
  }
  EdgeWeights w;
  w.edges = graph.edges();
  w.weights.reserve(w.edges.size());
  for (const Edge& e : w.edges) {
    const auto& a = sorted[*graph.index_of(e.u)];
    const auto& b = sorted[*graph.index_of(e.v)];
    w.weights.push_back(static_cast<double>(common_pairs(a, b)) /
                        (static_cast<double>(a.size()) * static_cast<double>(b.size())));
  }
  return w;
}

double select_tau2(const Graph& graph, const EdgeWeights& weights) {
  if (weights.empty()) throw DomainError("cannot select tau2 on a graph without edges");
  std::vector<double> best(graph.vertex_count(), -1.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const auto a = *graph.index_of(weights.edges[k].u);
    const auto b = *graph.index_of(weights.edges[k].v);
    best[a] = std::max(best[a], weights.weights[k]);
    best[b] = std::max(best[b], weights.weights[k]);
  }
  double tau2 = std::numeric_limits<double>::infinity();
  for (double b : best) {
    if (b >= 0.0) tau2 = std::min(tau2, b);
  }
  return tau2;
}

Components components_above(const Graph& graph, const EdgeWeights& weights, double tau) {
  check_tau(tau);
  const auto ids = graph.vertices();
  UnionFind uf(ids.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights.weights[k] >= tau) {
      uf.unite(*graph.index_of(weights.edges[k].u), *graph.index_of(weights.edges[k].v));
    }
  }
  Components out;
  std::vector<std::size_t> slot(ids.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (graph.neighbors_at(i).empty()) continue;
    const std::size_t root = uf.find(i);
    if (uf.set_size(root) < 2) {
      out.isolated.push_back(ids[i]);
      continue;
    }
    // Ids are visited ascending, so components come out in canonical order.
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = out.components.size();
      out.components.emplace_back();
    }
    out.components[slot[root]].push_back(ids[i]);
  }
  return out;
}

double size_entropy(std::span<const std::size_t> sizes, std::size_t vertices) {
  std::vector<std::size_t> sorted(sizes.begin(), sizes.end());
  std::sort(sorted.begin(), sorted.end());
  double h = 0.0;
  for (std::size_t s : sorted) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / static_cast<double>(vertices);
    h -= p * std::log(p);
  }
  return h;
}

double threshold_entropy(const Graph& graph, const EdgeWeights& weights, double tau) {
  const auto sizes = component_sizes(components_above(graph, weights, tau));
  return size_entropy(sizes, graph.active_vertex_count());
}

Tau1Selection select_tau1(const Graph& graph, const EdgeWeights& weights, double tau2,
                          double step) {
  if (!(step > 0.0)) throw DomainError("scan step must be positive");
  check_tau(tau2);
  const double top = weights.max_weight();
  const auto grid = [&](std::size_t k) { return tau2 + static_cast<double>(k) * step; };
  std::size_t last = 0;
  if (top > tau2) {
    last = static_cast<std::size_t>(std::floor((top - tau2) / step));
    while (grid(last + 1) <= top) ++last;
    while (last > 0 && grid(last) > top) --last;
  }

  // The filtered edge set at grid(k) is {w >= grid(k)}; it only changes
  // once grid(k) passes a weight, so the first grid point above each
  // weight (plus grid(0)) covers every distinct partition on the grid.
  std::vector<std::size_t> candidates{0};
  std::vector<double> distinct = weights.weights;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (double w : distinct) {
    if (w < tau2) continue;
    auto k = static_cast<std::size_t>(std::floor((w - tau2) / step)) + 1;
    while (k > 1 && grid(k - 1) > w) --k;
    while (grid(k) <= w) ++k;
    if (k <= last) candidates.push_back(k);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  Tau1Selection best;
  best.tau = grid(0);
  best.entropy = -1.0;
  for (std::size_t k : candidates) {
    const double tau = std::min(grid(k), 1.0);
    const double h = threshold_entropy(graph, weights, tau);
    ++best.evaluations;
    if (h > best.entropy) {
      best.entropy = h;
      best.tau = tau;
    }
  }
  return best;
}

Extraction extract_cover(const Graph& graph, const EdgeWeights& weights, double tau1,
                         double tau2) {
  check_tau(tau1);
  check_tau(tau2);
  if (tau2 > tau1) {
    throw DomainError("weak threshold tau2=" + std::to_string(tau2) +
                      " exceeds strong threshold tau1=" + std::to_string(tau1));
  }
  const Components comps = components_above(graph, weights, tau1);
  std::vector<std::size_t> owner(graph.vertex_count(), std::numeric_limits<std::size_t>::max());
  for (std::size_t c = 0; c < comps.components.size(); ++c) {
    for (VertexId v : comps.components[c]) owner[*graph.index_of(v)] = c;
  }

  Extraction out;
  out.cover.communities = comps.components;
  for (VertexId v : comps.isolated) {
    std::vector<std::size_t> joined;
    for (VertexId n : graph.neighbors(v)) {
      const std::size_t c = owner[*graph.index_of(n)];
      if (c == std::numeric_limits<std::size_t>::max()) continue;
      if (weights.at(v, n) >= tau2) joined.push_back(c);
    }
    std::sort(joined.begin(), joined.end());
    joined.erase(std::unique(joined.begin(), joined.end()), joined.end());
    if (joined.empty()) out.unassigned.push_back(v);
    for (std::size_t c : joined) out.cover.communities[c].push_back(v);
  }
  out.cover.canonicalize();
  return out;
}

PostprocessResult postprocess(const Graph& graph, const LabelState& state,
                              const PostprocessOptions& options) {
  PostprocessResult result;
  const EdgeWeights weights = compute_weights(graph, state);
  if (options.tau1) check_tau(*options.tau1);
  if (options.tau2) check_tau(*options.tau2);
  if (options.tau1 && options.tau2 && *options.tau2 > *options.tau1) {
    throw DomainError("tau2 must not exceed tau1");
  }
  if (weights.empty()) {
    result.tau1 = options.tau1.value_or(0.0);
    result.tau2 = options.tau2.value_or(0.0);
    return result;
  }
  result.tau2 = options.tau2 ? *options.tau2 : select_tau2(graph, weights);
  if (options.tau1) {
    result.tau1 = *options.tau1;
    result.entropy = threshold_entropy(graph, weights, result.tau1);
  } else {
    const Tau1Selection sel = select_tau1(graph, weights, result.tau2, options.step);
    result.tau1 = sel.tau;
    result.entropy = sel.entropy;
  }
  result.extraction = extract_cover(graph, weights, result.tau1, result.tau2);
  return result;
}

}  // namespace rslpa
