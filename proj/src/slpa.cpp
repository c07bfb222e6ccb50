#include "rslpa/slpa.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "rslpa/error.hpp"

namespace rslpa {

Label slpa_spoken_label(const RngStream& rng, VertexId speaker, VertexId listener,
                        std::uint32_t t, const std::vector<Label>& memory) {
  return memory[rng.uniform(memory.size(), speaker, t, DrawPurpose::kSlpaSend, listener)];
}

Label slpa_plurality(const RngStream& rng, VertexId listener, std::uint32_t t,
                     std::vector<Label> received) {
  std::sort(received.begin(), received.end());
  std::vector<Label> winners;
  std::size_t best = 0;
  for (std::size_t i = 0; i < received.size();) {
    std::size_t j = i;
    while (j < received.size() && received[j] == received[i]) ++j;
    const std::size_t count = j - i;
    if (count > best) {
      best = count;
      winners.assign(1, received[i]);
    } else if (count == best) {
      winners.push_back(received[i]);
    }
    i = j;
  }
  if (winners.size() == 1) return winners.front();
  return winners[rng.uniform(winners.size(), listener, t, DrawPurpose::kSlpaTieBreak)];
}

MemoryState slpa_run(const Graph& graph, std::uint32_t iterations, std::uint64_t seed) {
  const RngStream rng(seed);
  MemoryState state;
  const auto ids = graph.vertices();
  state.ids.assign(ids.begin(), ids.end());
  state.memory.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) state.memory[i] = {ids[i]};

  std::vector<Label> received;
  for (std::uint32_t t = 1; t <= iterations; ++t) {
    std::vector<Label> picked(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto nbrs = graph.neighbors_at(i);
      if (nbrs.empty()) continue;
      received.clear();
      for (VertexId n : nbrs) {
        received.push_back(
            slpa_spoken_label(rng, n, ids[i], t, state.memory[*graph.index_of(n)]));
      }
      picked[i] = slpa_plurality(rng, ids[i], t, received);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!graph.neighbors_at(i).empty()) state.memory[i].push_back(picked[i]);
    }
    state.iterations = t;
  }
  return state;
}

Cover slpa_threshold(const MemoryState& state, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0,1]");
  std::map<Label, Community> by_label;
  for (std::size_t i = 0; i < state.ids.size(); ++i) {
    const auto& mem = state.memory[i];
    if (mem.size() < 2) continue;
    std::map<Label, std::size_t> counts;
    for (Label l : mem) ++counts[l];
    for (const auto& [l, c] : counts) {
      if (static_cast<double>(c) / static_cast<double>(mem.size()) >= tau) {
        by_label[l].push_back(state.ids[i]);
      }
    }
  }
  std::set<Community> unique;
  for (auto& [l, members] : by_label) {
    if (members.size() >= 2) unique.insert(members);
  }
  Cover cover;
  cover.communities.assign(unique.begin(), unique.end());
  cover.canonicalize();
  return cover;
}

std::map<Label, double> voting_distribution(const std::vector<std::vector<Label>>& sequences,
                                            std::uint64_t cap) {
  if (sequences.empty()) throw DomainError("need at least one voter");
  std::uint64_t outcomes = 1;
  for (const auto& s : sequences) {
    if (s.empty()) throw DomainError("voter with an empty sequence");
    if (outcomes > cap / s.size()) {
      throw DomainError("voting product space exceeds " + std::to_string(cap) +
                        " outcomes; use a Monte Carlo estimate instead");
    }
    outcomes *= s.size();
  }

  std::vector<Label> alphabet;
  for (const auto& s : sequences) alphabet.insert(alphabet.end(), s.begin(), s.end());
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  const std::size_t L = alphabet.size();
  const std::size_t n = sequences.size();

  std::vector<std::vector<std::size_t>> dense(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (Label l : sequences[v]) {
      dense[v].push_back(static_cast<std::size_t>(
          std::lower_bound(alphabet.begin(), alphabet.end(), l) - alphabet.begin()));
    }
  }

  // wins[l * (n+1) + k]: outcomes in which l ties with k-1 others for first.
  std::vector<std::uint64_t> wins(L * (n + 1), 0);
  std::vector<std::size_t> digit(n, 0);
  std::vector<std::size_t> count(L, 0);
  for (std::uint64_t o = 0; o < outcomes; ++o) {
    std::fill(count.begin(), count.end(), 0);
    std::size_t best = 0;
    for (std::size_t v = 0; v < n; ++v) best = std::max(best, ++count[dense[v][digit[v]]]);
    std::size_t ties = 0;
    for (std::size_t l = 0; l < L; ++l) ties += count[l] == best;
    for (std::size_t l = 0; l < L; ++l) {
      if (count[l] == best) ++wins[l * (n + 1) + ties];
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (++digit[v] < dense[v].size()) break;
      digit[v] = 0;
    }
  }

  std::map<Label, double> dist;
  for (std::size_t l = 0; l < L; ++l) {
    long double p = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) {
      p += static_cast<long double>(wins[l * (n + 1) + k]) / static_cast<long double>(k);
    }
    p /= static_cast<long double>(outcomes);
    if (p > 0.0L) dist[alphabet[l]] = static_cast<double>(p);
  }
  return dist;
}

}  // namespace rslpa
