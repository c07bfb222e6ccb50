#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rslpa/error.hpp"
#include "rslpa/slpa.hpp"

using namespace rslpa;

namespace {

double max_prob(const std::map<Label, double>& d) {
  double m = 0.0;
  for (const auto& [l, p] : d) m = std::max(m, p);
  return m;
}

double total(const std::map<Label, double>& d) {
  double s = 0.0;
  for (const auto& [l, p] : d) s += p;
  return s;
}

}  // namespace

TEST_CASE("slpa run") {
  const Graph k2 = testing::graph_of({{1, 2}});
  const MemoryState m = slpa_run(k2, 1, 3);
  CHECK(m.memory[0] == std::vector<Label>{1, 2});
  CHECK(m.memory[1] == std::vector<Label>{2, 1});

  const Graph g = generate_random_graph(30, 60, 5);
  const MemoryState a = slpa_run(g, 20, 9);
  CHECK(a == slpa_run(g, 20, 9));
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    CHECK(a.memory[i].size() == (g.neighbors_at(i).empty() ? 1u : 21u));
  }
  CHECK(kSlpaDefaultIterations == 100);
  CHECK(kSlpaDefaultTau == 0.2);
}

TEST_CASE("slpa threshold") {
  MemoryState m;
  m.iterations = 3;
  m.ids = {1, 2, 3};
  m.memory = {{1, 1, 1, 2}, {2, 1, 1, 1}, {3, 2, 3, 3}};
  CHECK(slpa_threshold(m, 0.5).communities == std::vector<Community>{{1, 2}});
  // tau = 0: every vertex joins every label it ever held.
  CHECK(slpa_threshold(m, 0.0).communities == std::vector<Community>{{1, 2}, {1, 2, 3}});
  // tau = 1: only constant memories survive, and a lone vertex is dropped.
  MemoryState c = m;
  c.memory = {{5, 5}, {5, 5}, {3, 2}};
  CHECK(slpa_threshold(c, 1.0).communities == std::vector<Community>{{1, 2}});
  CHECK(slpa_threshold(m, 1.0).empty());
  CHECK_THROWS_AS(slpa_threshold(m, 1.5), DomainError);
}

TEST_CASE("voting distribution examples") {
  const auto tie = voting_distribution({{2, 2}, {1, 1}});
  CHECK(tie.at(1) == doctest::Approx(0.5));
  CHECK(tie.at(2) == doctest::Approx(0.5));

  const auto d = voting_distribution({{1, 2}, {1, 2}, {1, 1}});
  CHECK(d.at(1) == doctest::Approx(0.75));
  CHECK(d.at(2) == doctest::Approx(0.25));

  CHECK(voting_distribution({{7}}).at(7) == 1.0);
  CHECK_THROWS_AS(voting_distribution({}), DomainError);
  CHECK_THROWS_AS(voting_distribution({{1, 2}, {}}), DomainError);
  std::vector<std::vector<Label>> big(8, std::vector<Label>(10, 1));
  CHECK_THROWS_AS(voting_distribution(big), DomainError);
  CHECK_NOTHROW(voting_distribution(big, 200'000'000));
}

TEST_CASE("plurality over fixed received labels") {
  // The received multiset from the label-selection figure.
  std::vector<std::vector<Label>> voters;
  for (Label l : {1, 2, 2, 2, 3, 3, 3, 4, 4, 5}) voters.push_back({l});
  const auto vote = voting_distribution(voters);
  CHECK(vote.at(2) == doctest::Approx(0.5));
  CHECK(vote.at(3) == doctest::Approx(0.5));
  CHECK(max_prob(vote) > max_prob(uniform_pick_distribution(voters)));
}

TEST_CASE("voting probabilities sum to one") {
  SequentialRng rng(3, DrawPurpose::kGenerator);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng.uniform(6);
    const std::size_t len = 1 + rng.uniform(3);
    std::vector<std::vector<Label>> v(n);
    for (auto& s : v) {
      for (std::size_t k = 0; k < len; ++k) s.push_back(1 + rng.uniform(4));
    }
    CHECK(std::abs(total(voting_distribution(v)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("plurality concentrates fixed votes") {
  // Each voter holds one label: exhaustively over every multiset of up to
  // six labels from a four-label alphabet.
  std::size_t violations = 0;
  std::size_t cases = 0;
  std::vector<Label> votes;
  const auto visit = [&](auto&& self, Label from) -> void {
    if (!votes.empty()) {
      std::vector<std::vector<Label>> v;
      for (Label l : votes) v.push_back({l});
      if (max_prob(voting_distribution(v)) + 1e-12 < max_prob(uniform_pick_distribution(v))) {
        ++violations;
      }
      ++cases;
    }
    if (votes.size() == 6) return;
    for (Label l = from; l <= 4; ++l) {
      votes.push_back(l);
      self(self, l);
      votes.pop_back();
    }
  };
  visit(visit, 1);
  CHECK(cases == 209);
  CHECK(violations == 0);
}

TEST_CASE("longer sequences can defeat the concentration bound") {
  // Four voters with three labels each: uniform picking gives label 1
  // probability 4/12, while plurality voting gives no label more than 35/108.
  const std::vector<std::vector<Label>> v{{1, 1, 1}, {3, 2, 4}, {4, 3, 4}, {2, 1, 3}};
  const auto vote = voting_distribution(v);
  const auto pick = uniform_pick_distribution(v);
  CHECK(max_prob(pick) == doctest::Approx(1.0 / 3.0));
  CHECK(max_prob(vote) == doctest::Approx(35.0 / 108.0));
  CHECK(max_prob(vote) < max_prob(pick));
}
