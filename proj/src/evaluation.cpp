#include "rslpa/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rslpa/error.hpp"
#include "rslpa/label_engine.hpp"
#include "rslpa/postprocess.hpp"

namespace rslpa {
namespace {

struct Entropy {
  double n;
  double h(double w) const { return w <= 0.0 ? 0.0 : -(w / n) * std::log(w / n); }
  double binary(double x) const { return h(x) + h(n - x); }
};

// intersections[i][j] = |X_i ∩ Y_j|
using Matrix = std::vector<std::vector<std::size_t>>;

double normalized_conditional(const std::vector<std::size_t>& x_sizes,
                              const std::vector<std::size_t>& y_sizes, const Matrix& inter,
                              const Entropy& e) {
  double total = 0.0;
  for (std::size_t i = 0; i < x_sizes.size(); ++i) {
    const double x = static_cast<double>(x_sizes[i]);
    const double hx = e.binary(x);
    if (hx <= 0.0) continue;  // constant membership: nothing to explain
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < y_sizes.size(); ++j) {
      const double y = static_cast<double>(y_sizes[j]);
      const double d = static_cast<double>(inter[i][j]);
      const double c = x - d;
      const double b = y - d;
      const double a = e.n - x - y + d;
      if (e.h(a) + e.h(d) <= e.h(b) + e.h(c)) continue;
      const double joint = e.h(a) + e.h(b) + e.h(c) + e.h(d);
      best = std::min(best, joint - e.binary(y));
    }
    total += std::isinf(best) ? 1.0 : std::clamp(best / hx, 0.0, 1.0);
  }
  return total / static_cast<double>(x_sizes.size());
}

}  // namespace

NmiReport nmi_overlapping(const Cover& a, const Cover& b, std::span<const VertexId> universe) {
  if (universe.empty()) throw DomainError("NMI needs a non-empty universe");
  std::vector<VertexId> u(universe.begin(), universe.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const auto index_in = [&](VertexId v) {
    auto it = std::lower_bound(u.begin(), u.end(), v);
    if (it == u.end() || *it != v) {
      throw DomainError("cover vertex " + std::to_string(v) + " outside the NMI universe");
    }
    return static_cast<std::size_t>(it - u.begin());
  };

  NmiReport report;
  if (a.empty() || b.empty()) {
    report.degenerate = true;
    report.score = (a.empty() && b.empty()) ? 1.0 : 0.0;
    report.x_given_y = report.y_given_x = 1.0 - report.score;
    return report;
  }

  // Dense membership lists, then pairwise intersections by vertex.
  std::vector<std::vector<std::size_t>> in_a(u.size());
  std::vector<std::vector<std::size_t>> in_b(u.size());
  std::vector<std::size_t> a_sizes;
  std::vector<std::size_t> b_sizes;
  for (std::size_t c = 0; c < a.communities.size(); ++c) {
    std::vector<VertexId> members = a.communities[c];
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (VertexId v : members) in_a[index_in(v)].push_back(c);
    a_sizes.push_back(members.size());
  }
  for (std::size_t c = 0; c < b.communities.size(); ++c) {
    std::vector<VertexId> members = b.communities[c];
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (VertexId v : members) in_b[index_in(v)].push_back(c);
    b_sizes.push_back(members.size());
  }
  Matrix ab(a_sizes.size(), std::vector<std::size_t>(b_sizes.size(), 0));
  for (std::size_t v = 0; v < u.size(); ++v) {
    for (std::size_t i : in_a[v]) {
      for (std::size_t j : in_b[v]) ++ab[i][j];
    }
  }
  Matrix ba(b_sizes.size(), std::vector<std::size_t>(a_sizes.size(), 0));
  for (std::size_t i = 0; i < a_sizes.size(); ++i) {
    for (std::size_t j = 0; j < b_sizes.size(); ++j) ba[j][i] = ab[i][j];
  }

  const Entropy e{static_cast<double>(u.size())};
  report.x_given_y = normalized_conditional(a_sizes, b_sizes, ab, e);
  report.y_given_x = normalized_conditional(b_sizes, a_sizes, ba, e);
  report.score = 1.0 - 0.5 * (report.x_given_y + report.y_given_x);
  return report;
}

std::vector<VertexId> active_universe(const Graph& graph) {
  std::vector<VertexId> out;
  const auto ids = graph.vertices();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!graph.neighbors_at(i).empty()) out.push_back(ids[i]);
  }
  return out;
}

EtaComparison compare_eta(const UpdateMetrics& measured, const CostPrediction& predicted) {
  EtaComparison out;
  out.measured = measured.eta;
  out.expected = predicted.eta_expected;
  out.lower = predicted.eta_lower;
  out.upper = predicted.eta_upper;
  const double m = static_cast<double>(measured.eta);
  // Bounds are real-valued; allow for rounding in the closed forms.
  const double slack = 1e-9 * std::max(1.0, out.upper);
  out.in_bounds = m >= out.lower - slack && m <= out.upper + slack;
  if (out.expected > 0.0) {
    out.relative_error = (m - out.expected) / out.expected;
  } else {
    out.relative_error = m == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<ConvergenceRow> convergence_probe(const Graph& graph, const Cover& truth,
                                              std::span<const std::uint32_t> iterations,
                                              std::span<const std::uint64_t> seeds) {
  const auto universe = active_universe(graph);
  std::vector<ConvergenceRow> rows;
  for (std::uint32_t T : iterations) {
    ConvergenceRow row;
    row.iterations = T;
    double sum = 0.0;
    for (std::uint64_t seed : seeds) {
      // Without propagation no label is shared, so there is no community
      // to extract; thresholding all-zero weights at 0 would instead merge
      // every connected component.
      Cover found;
      if (T > 0) found = postprocess(graph, run(graph, T, seed)).extraction.cover;
      const NmiReport nmi = nmi_overlapping(found, truth, universe);
      row.degenerate_runs += nmi.degenerate ? 1 : 0;
      sum += nmi.score;
    }
    row.mean_nmi = seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rslpa
