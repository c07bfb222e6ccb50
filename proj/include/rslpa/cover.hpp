#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "rslpa/rng.hpp"

namespace rslpa {

using Community = std::vector<VertexId>;

// Possibly overlapping communities. After canonicalize() members are
// ascending and communities are ordered by smallest member, then
// lexicographically.
struct Cover {
  std::vector<Community> communities;

  void canonicalize();
  std::size_t size() const { return communities.size(); }
  bool empty() const { return communities.empty(); }

  // vertex -> indices of the communities containing it
  std::map<VertexId, std::vector<std::size_t>> membership() const;
  std::vector<VertexId> vertices() const;

  bool operator==(const Cover&) const = default;
};

}  // namespace rslpa
