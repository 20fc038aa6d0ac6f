#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nsesmc {

/// Stream domains used when deriving independent streams from one seed.
enum class StreamTag : std::uint64_t {
  kTruth = 1,
  kNoise = 2,
  kInit = 3,
  kMutation = 4,
  kResample = 5,
  kChain = 6,
  kTest = 99,
};

/// A caller-owned random stream. Streams are derived from (seed, tag, indices)
/// through std::seed_seq, whose mixing is fully specified by the standard, so
/// a given tuple always yields the same sequence regardless of which thread
/// consumes it.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  RngStream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> indices = {});

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace nsesmc
