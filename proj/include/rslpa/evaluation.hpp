#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rslpa/cost_model.hpp"
#include "rslpa/cover.hpp"
#include "rslpa/graph.hpp"
#include "rslpa/incremental.hpp"

namespace rslpa {

struct NmiReport {
  double score = 0.0;
  // Mean over communities of H(X_i|Y) / H(X_i), and the reverse direction.
  double x_given_y = 0.0;
  double y_given_x = 0.0;
  // Set when either cover is empty; the score is then 0 (or 1 when both
  // are empty).
  bool degenerate = false;
};

// Overlapping NMI in the best-match form: every community is a binary
// membership variable over `universe`, each community is matched with the
// community of the other cover that leaves the least conditional entropy
// (subject to h(a)+h(d) > h(b)+h(c)), unmatched communities count as
// fully unexplained, and score = 1 - (x_given_y + y_given_x) / 2.
NmiReport nmi_overlapping(const Cover& a, const Cover& b, std::span<const VertexId> universe);

// Degree-0 vertices are excluded from the universe.
std::vector<VertexId> active_universe(const Graph& graph);

struct EtaComparison {
  std::uint64_t measured = 0;
  double expected = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool in_bounds = false;
  // (measured - expected) / expected, 0 when both are 0.
  double relative_error = 0.0;
};

EtaComparison compare_eta(const UpdateMetrics& measured, const CostPrediction& predicted);

struct ConvergenceRow {
  std::uint32_t iterations = 0;
  double mean_nmi = 0.0;
  std::size_t degenerate_runs = 0;
};

// Mean NMI against `truth` of the auto-thresholded cover of run(graph, T,
// seed), for every T over all seeds. T = 0 yields an empty cover, so its
// runs are degenerate with score 0.
std::vector<ConvergenceRow> convergence_probe(const Graph& graph, const Cover& truth,
                                              std::span<const std::uint32_t> iterations,
                                              std::span<const std::uint64_t> seeds);

}  // namespace rslpa
