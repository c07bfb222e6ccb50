#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "rslpa/graph.hpp"
#include "rslpa/label_engine.hpp"

namespace testing {

using rslpa::Edge;
using rslpa::Graph;
using rslpa::VertexId;

inline Graph graph_of(std::initializer_list<std::pair<VertexId, VertexId>> edges,
                      std::initializer_list<VertexId> extra = {}) {
  std::vector<Edge> es;
  for (auto [a, b] : edges) es.emplace_back(a, b);
  std::vector<VertexId> xs(extra);
  return Graph::from_edges(es, xs);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> es;
  for (std::size_t i = 1; i < n; ++i) es.emplace_back(i - 1, i);
  return Graph::from_edges(es);
}

inline Graph clique(VertexId first, std::size_t n, std::vector<Edge> extra = {}) {
  for (VertexId a = first; a < first + n; ++a) {
    for (VertexId b = a + 1; b < first + n; ++b) extra.emplace_back(a, b);
  }
  return Graph::from_edges(extra);
}

// Slot provenance keyed by (vertex, t) -> (source, position). Labels and
// receiver records are derived in iteration order.
using Provenance = std::map<std::pair<VertexId, std::uint32_t>, std::pair<VertexId, std::uint32_t>>;

inline rslpa::LabelState state_from_provenance(const Graph& g, std::uint32_t T,
                                               const Provenance& prov) {
  rslpa::LabelState s = rslpa::initialize(g);
  for (auto& v : s.vertices) {
    if (!v.active) continue;
    v.labels.resize(T + 1, v.id);
    v.sources.resize(T + 1, v.id);
    v.positions.resize(T + 1, 0);
    v.receivers.resize(T + 1);
  }
  s.iterations = T;
  for (std::uint32_t t = 1; t <= T; ++t) {
    for (auto& v : s.vertices) {
      if (!v.active) continue;
      const auto [src, pos] = prov.at({v.id, t});
      v.sources[t] = src;
      v.positions[t] = pos;
      v.labels[t] = s.at(src).labels[pos];
      rslpa::add_receiver(s.at(src).receivers[pos], rslpa::Receiver{v.id, t});
    }
  }
  return s;
}

}  // namespace testing

#include <boost/math/distributions/chi_squared.hpp>

namespace testing {

// Goodness-of-fit p-value of observed counts against expected probabilities.
// Categories with zero expectation must have zero observations.
inline double chi_square_p(const std::map<rslpa::Label, std::size_t>& observed,
                           const std::map<rslpa::Label, double>& expected, std::size_t n) {
  double stat = 0.0;
  std::size_t cells = 0;
  for (const auto& [label, p] : expected) {
    if (p <= 0.0) continue;
    const auto it = observed.find(label);
    const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    const double e = p * static_cast<double>(n);
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  for (const auto& [label, count] : observed) {
    if (count > 0 && (!expected.contains(label) || expected.at(label) <= 0.0)) return 0.0;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace testing
