#include "rslpa/rng.hpp"

namespace rslpa {
namespace {

constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::bits(VertexId vertex, std::uint64_t iteration, DrawPurpose purpose,
                              std::uint64_t index) const {
  std::uint64_t h = mix(seed_);
  h = mix(h ^ vertex);
  h = mix(h ^ iteration);
  h = mix(h ^ static_cast<std::uint64_t>(purpose));
  return mix(h ^ index);
}

std::uint64_t RngStream::uniform(std::uint64_t bound, VertexId vertex, std::uint64_t iteration,
                                 DrawPurpose purpose, std::uint64_t index) const {
  // Lemire's multiply-shift with rejection; the retry index is folded into
  // the draw so rejected values never repeat.
  std::uint64_t attempt = 0;
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = bits(vertex, iteration, purpose, index ^ (attempt << 48));
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
    ++attempt;
  }
}

double RngStream::unit(VertexId vertex, std::uint64_t iteration, DrawPurpose purpose,
                       std::uint64_t index) const {
  return static_cast<double>(bits(vertex, iteration, purpose, index) >> 11) * 0x1.0p-53;
}

}  // namespace rslpa
