#pragma once

#include <cstdint>

namespace rslpa {

using VertexId = std::uint64_t;

// Purpose tags keep draws made for different reasons independent even when
// vertex, iteration and index coincide.
enum class DrawPurpose : std::uint32_t {
  kPropagateSource = 1,
  kPropagatePosition = 2,
  kRepickKeep = 3,
  kRepickSource = 4,
  kRepickPosition = 5,
  kSlpaSend = 6,
  kSlpaTieBreak = 7,
  kBatchDelete = 8,
  kBatchInsert = 9,
  kGenerator = 10,
};

// Counter-based random stream: every draw is a pure function of the master
// seed and the draw context, so any slot can be (re)drawn without replaying
// history and results do not depend on evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(VertexId vertex, std::uint64_t iteration, DrawPurpose purpose,
                     std::uint64_t index = 0) const;

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform(std::uint64_t bound, VertexId vertex, std::uint64_t iteration,
                        DrawPurpose purpose, std::uint64_t index = 0) const;

  // Uniform double in [0, 1).
  double unit(VertexId vertex, std::uint64_t iteration, DrawPurpose purpose,
              std::uint64_t index = 0) const;

 private:
  std::uint64_t seed_;
};

// Sequential generator over a counter-based stream, for generators and
// batch sampling where draws are naturally consumed in order.
class SequentialRng {
 public:
  SequentialRng(std::uint64_t seed, DrawPurpose purpose) : stream_(seed), purpose_(purpose) {}

  std::uint64_t next() { return stream_.bits(0, counter_++, purpose_); }
  std::uint64_t uniform(std::uint64_t bound) {
    return stream_.uniform(bound, 0, counter_++, purpose_);
  }
  double unit() { return stream_.unit(0, counter_++, purpose_); }

 private:
  RngStream stream_;
  DrawPurpose purpose_;
  std::uint64_t counter_ = 0;
};

}  // namespace rslpa
