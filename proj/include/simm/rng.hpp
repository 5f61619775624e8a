#pragma once

#include <cstdint>
#include <span>

namespace simm {

/// Identifies which part of a step consumes random numbers. Each phase gets
/// its own substream so adding draws in one phase never shifts another.
enum class Phase : std::uint32_t {
  InitAlive = 1,
  InitGenome = 2,
  Decode = 3,
  Copy = 4,
  ReawakenPick = 5,
  ReawakenGenome = 6,
  FrameIndices = 7,
  ParticleInit = 8,
  ParticleDecode = 9,
  ParticleCopy = 10,
};

/// SplitMix64 sequence. Cheap to construct, so every (step, phase, index)
/// triple gets a fresh one; draws never depend on which worker runs them.
class RandomStream {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  explicit RandomStream(std::uint64_t state) noexcept : state_(state) {}

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal (ziggurat); consumes a variable number of words.
  double normal() noexcept;
  /// out[i] = scale * normal(), drawn in index order.
  void fill_normal(std::span<double> out, double scale) noexcept;
  /// out[i] += scale * normal(), drawn in index order.
  void add_normal(std::span<double> out, double scale) noexcept;
  /// Uniform integer in [0, bound). `bound` must be nonzero.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

RandomStream substream(std::uint64_t seed, std::uint64_t step, Phase phase,
                       std::uint64_t index) noexcept;

}  // namespace simm
