#include "rslpa/cover.hpp"

#include <algorithm>

namespace rslpa {

void Cover::canonicalize() {
  for (auto& c : communities) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::sort(communities.begin(), communities.end(), [](const Community& a, const Community& b) {
    if (a.empty() || b.empty()) return a.size() < b.size();
    if (a.front() != b.front()) return a.front() < b.front();
    return a < b;
  });
}

std::map<VertexId, std::vector<std::size_t>> Cover::membership() const {
  std::map<VertexId, std::vector<std::size_t>> index;
  for (std::size_t c = 0; c < communities.size(); ++c) {
    for (VertexId v : communities[c]) index[v].push_back(c);
  }
  return index;
}

std::vector<VertexId> Cover::vertices() const {
  std::vector<VertexId> all;
  for (const auto& c : communities) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace rslpa
