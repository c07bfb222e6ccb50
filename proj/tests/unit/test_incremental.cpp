#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "rslpa/error.hpp"
#include "rslpa/incremental.hpp"

using namespace rslpa;
using testing::graph_of;

namespace {

VertexDelta delta_of(VertexId v, std::vector<VertexId> kept, std::vector<VertexId> removed,
                     std::vector<VertexId> added) {
  return VertexDelta{v, std::move(kept), std::move(removed), std::move(added)};
}

// 6-cycle with a hand-built propagation chain hanging off slot (2,1):
// (2,1) <- 1, then (3,2) <- (2,1), (4,3) <- (3,2), (5,4) <- (4,3).
// Every other slot copies an initial label from a neighbor that survives
// the deletion of edge 1-2.
struct Chain {
  Graph graph;
  LabelState state;
};

Chain chain_fixture() {
  Chain c;
  c.graph = graph_of({{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}});
  testing::Provenance p;
  for (std::uint32_t t = 1; t <= 4; ++t) {
    p[{1, t}] = {6, 0};
    p[{2, t}] = {3, 0};
    p[{3, t}] = {4, 0};
    p[{4, t}] = {5, 0};
    p[{5, t}] = {6, 0};
    p[{6, t}] = {5, 0};
  }
  p[{2, 1}] = {1, 0};
  p[{3, 2}] = {2, 1};
  p[{4, 3}] = {3, 2};
  p[{5, 4}] = {4, 3};
  c.state = testing::state_from_provenance(c.graph, 4, p);
  return c;
}

// Per-slot label histograms over many trials.
using Marginals = std::map<std::pair<VertexId, std::uint32_t>, std::map<Label, double>>;

void accumulate(Marginals& m, const LabelState& s) {
  for (const auto& v : s.vertices) {
    for (std::uint32_t t = 1; t < v.labels.size(); ++t) m[{v.id, t}][v.labels[t]] += 1.0;
  }
}

double max_tv(const Marginals& a, const Marginals& b, double trials) {
  double worst = 0.0;
  for (const auto& [slot, ha] : a) {
    std::map<Label, double> all = ha;
    const auto& hb = b.at(slot);
    for (const auto& [l, c] : hb) all[l] += 0.0;
    double tv = 0.0;
    for (const auto& [l, unused] : all) {
      const double pa = ha.contains(l) ? ha.at(l) / trials : 0.0;
      const double pb = hb.contains(l) ? hb.at(l) / trials : 0.0;
      tv += std::abs(pa - pb);
    }
    worst = std::max(worst, tv / 2.0);
  }
  return worst;
}

}  // namespace

TEST_CASE("decide_repick by category") {
  const RngStream rng(5);
  SUBCASE("unchanged keeps") {
    const auto d = delta_of(1, {2, 3}, {}, {});
    for (std::uint32_t t = 1; t < 20; ++t) CHECK_FALSE(decide_repick(d, t, 2, rng, 0).repick);
  }
  SUBCASE("lost-only with a kept source keeps") {
    const auto d = delta_of(1, {2, 3}, {4}, {});
    for (std::uint64_t e = 0; e < 100000; ++e) {
      REQUIRE_FALSE(decide_repick(d, 3, 3, rng, e).repick);
    }
  }
  SUBCASE("lost-only with a removed source repicks uniformly over kept") {
    const auto d = delta_of(1, {2, 3, 5}, {4}, {});
    std::map<Label, std::size_t> src;
    std::map<Label, std::size_t> pos;
    const std::size_t n = 30000;
    for (std::uint64_t e = 0; e < n; ++e) {
      const auto r = decide_repick(d, 4, 4, rng, e);
      REQUIRE(r.repick);
      ++src[r.source];
      ++pos[r.position];
    }
    CHECK(testing::chi_square_p(src, {{2, 1.0 / 3}, {3, 1.0 / 3}, {5, 1.0 / 3}}, n) > 1e-3);
    CHECK(testing::chi_square_p(pos, {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}}, n) > 1e-3);
  }
  SUBCASE("has-new with a kept source repicks one time in three") {
    // Two kept neighbors, one new: keep with probability 2/3.
    const auto d = delta_of(1, {2, 3}, {}, {7});
    const std::size_t n = 60000;
    std::size_t repicks = 0;
    for (std::uint64_t e = 0; e < n; ++e) {
      const auto r = decide_repick(d, 2, 2, rng, e);
      if (r.repick) {
        ++repicks;
        REQUIRE(r.source == 7);
        REQUIRE(r.position < 2);
      }
    }
    const double p = static_cast<double>(repicks) / n;
    CHECK(std::abs(p - 1.0 / 3.0) < 4 * std::sqrt(2.0 / 9.0 / n));
  }
  SUBCASE("has-new with a removed source repicks over kept and added") {
    const auto d = delta_of(1, {2}, {4}, {7, 8});
    std::map<Label, std::size_t> src;
    const std::size_t n = 30000;
    for (std::uint64_t e = 0; e < n; ++e) {
      const auto r = decide_repick(d, 3, 4, rng, e);
      REQUIRE(r.repick);
      ++src[r.source];
    }
    CHECK(testing::chi_square_p(src, {{2, 1.0 / 3}, {7, 1.0 / 3}, {8, 1.0 / 3}}, n) > 1e-3);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(decide_repick(delta_of(1, {2}, {3}, {}), 1, 9, rng, 0), ConsistencyError);
    CHECK_THROWS_AS(decide_repick(delta_of(1, {}, {3}, {}), 1, 3, rng, 0), ConsistencyError);
  }
  SUBCASE("epoch separates draws") {
    const auto d = delta_of(1, {2, 3, 5, 6, 9}, {4}, {});
    std::set<VertexId> seen;
    for (std::uint64_t e = 0; e < 50; ++e) seen.insert(decide_repick(d, 1, 4, rng, e).source);
    CHECK(seen.size() > 1);
  }
}

TEST_CASE("empty batch is a no-op") {
  const Graph g = generate_random_graph(30, 60, 1);
  LabelState s = run(g, 10, 3);
  const LabelState before = s;
  const auto m = correction_propagate(s, g, {}, RngStream(3));
  CHECK(m == UpdateMetrics{});
  CHECK(s == before);
}

TEST_CASE("a repicked chain head corrects its chain one wave per hop") {
  Chain c = chain_fixture();
  REQUIRE_NOTHROW(audit_state(c.state, c.graph));
  REQUIRE(c.state.at(5).labels[4] == 1);

  const auto r = apply_batch(c.graph, EditBatch::make({}, {Edge(1, 2)}));
  std::vector<std::uint32_t> waves_seen;
  const auto m = correction_propagate(c.state, r.graph, r.deltas, RngStream(11),
                                      [&](const LabelState& s, std::uint32_t wave) {
                                        audit_records(s, r.graph);
                                        waves_seen.push_back(wave);
                                      });
  CHECK(m.repicks == 1);
  CHECK(m.fetches == 1);
  CHECK(m.record_removals == 1);
  CHECK(m.waves == 3);
  CHECK(m.wave_messages == std::vector<std::uint64_t>{1, 1, 1});
  CHECK(m.eta == 4);
  CHECK(m.corrections == 4);
  CHECK(waves_seen == std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(c.state.at(2).labels[1] == 3);
  CHECK(c.state.at(3).labels[2] == 3);
  CHECK(c.state.at(4).labels[3] == 3);
  CHECK(c.state.at(5).labels[4] == 3);
  CHECK(c.state.epoch == 1);
  CHECK_NOTHROW(audit_state(c.state, r.graph));
}

TEST_CASE("updates keep every invariant") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::uint32_t T = 1 + seed % 12;
    Graph g = generate_random_graph(40, 70, seed);
    LabelState s = run(g, T, seed);
    for (int round = 0; round < 3; ++round) {
      const auto r = apply_batch(g, generate_random_batch(g, 2 + 6 * round, seed * 7 + round));
      const auto m = correction_propagate(
          s, r.graph, r.deltas, RngStream(seed),
          [&](const LabelState& st, std::uint32_t) { audit_records(st, r.graph); });
      REQUIRE_NOTHROW(audit_state(s, r.graph));
      CHECK(m.waves <= T + 1);
      CHECK(m.eta <= static_cast<std::uint64_t>(T) * r.graph.vertex_count());
      CHECK(m.wave_messages.size() == m.waves);
      // Corrections only ever travel to later iterations.
      for (const auto& v : s.vertices) {
        for (std::uint32_t t = 0; t < v.receivers.size(); ++t) {
          for (const Receiver& rec : v.receivers[t]) CHECK(rec.iteration > t);
        }
      }
      g = r.graph;
    }
  }
}

TEST_CASE("isolation retires and first edges create slots") {
  SUBCASE("deleting every edge") {
    const Graph g = generate_random_graph(20, 35, 4);
    const std::uint32_t T = 7;
    LabelState s = run(g, T, 4);
    const auto edges = g.edges();
    const auto r = apply_batch(g, EditBatch::make({}, edges));
    const auto m = correction_propagate(s, r.graph, r.deltas, RngStream(4));
    CHECK(m.eta == T * g.active_vertex_count());
    CHECK(m.retired == T * g.active_vertex_count());
    CHECK(m.repicks == 0);
    CHECK(m.waves == 0);
    for (const auto& v : s.vertices) {
      CHECK_FALSE(v.active);
      CHECK(v.labels.size() == 1);
    }
    CHECK_NOTHROW(audit_state(s, r.graph));
  }
  SUBCASE("new vertex joins") {
    const Graph g = graph_of({{1, 2}, {2, 3}});
    LabelState s = run(g, 5, 2);
    const auto r = apply_batch(g, EditBatch::make({Edge(3, 4), Edge(1, 4)}, {}));
    const auto m = correction_propagate(s, r.graph, r.deltas, RngStream(2));
    CHECK(m.created == 5);
    CHECK(s.at(4).active);
    CHECK(s.at(4).labels.size() == 6);
    CHECK(m.eta >= 5);
    CHECK_NOTHROW(audit_state(s, r.graph));
  }
  SUBCASE("isolated then reconnected") {
    const Graph g = graph_of({{1, 2}, {2, 3}, {3, 4}});
    LabelState s = run(g, 4, 8);
    auto r = apply_batch(g, EditBatch::make({}, {Edge(3, 4)}));
    correction_propagate(s, r.graph, r.deltas, RngStream(8));
    CHECK_FALSE(s.at(4).active);
    auto r2 = apply_batch(r.graph, EditBatch::make({Edge(4, 1)}, {}));
    correction_propagate(s, r2.graph, r2.deltas, RngStream(8));
    CHECK(s.at(4).active);
    CHECK_NOTHROW(audit_state(s, r2.graph));
    CHECK(s.epoch == 2);
  }
}

TEST_CASE("mismatched inputs are rejected") {
  const Graph g = graph_of({{1, 2}, {2, 3}});
  const auto r = apply_batch(g, EditBatch::make({Edge(1, 3)}, {}));
  SUBCASE("state from another graph") {
    LabelState s = run(graph_of({{1, 2}, {2, 5}}), 3, 1);
    CHECK_THROWS_AS(correction_propagate(s, r.graph, r.deltas, RngStream(1)), ConsistencyError);
  }
  SUBCASE("delta not matching the new graph") {
    LabelState s = run(g, 3, 1);
    DeltaMap bad = r.deltas;
    bad.at(1).added.push_back(9);
    CHECK_THROWS_AS(correction_propagate(s, r.graph, bad, RngStream(1)), ConsistencyError);
  }
  SUBCASE("stale sequence") {
    LabelState s = run(g, 3, 1);
    s.at(1).labels.pop_back();
    CHECK_THROWS_AS(correction_propagate(s, r.graph, r.deltas, RngStream(1)), ConsistencyError);
  }
}

TEST_CASE("incremental path matches from-scratch marginals") {
  // 6 vertices, T = 4, one deletion.
  const Graph g = graph_of({{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}, {1, 4}});
  const auto r = apply_batch(g, EditBatch::make({}, {Edge(2, 3)}));
  const std::uint32_t T = 4;
  const std::size_t trials = 20000;
  Marginals inc;
  Marginals scratch;
  for (std::uint64_t s = 0; s < trials; ++s) {
    LabelState st = run(g, T, s);
    correction_propagate(st, r.graph, r.deltas, RngStream(s));
    accumulate(inc, st);
    accumulate(scratch, run(r.graph, T, s + trials));
  }
  CHECK(max_tv(inc, scratch, trials) <= 0.035);
}
