#include "simm/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace simm {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t RandomStream::next_u64() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
  // Boost's ziggurat is a fixed algorithm, so sequences are stable across
  // platforms, unlike std::normal_distribution.
  return boost::random::normal_distribution<double>{}(*this);
}

// Batch forms keep the ziggurat inlined in the loop; mutation draws millions
// of values per step.
void RandomStream::fill_normal(std::span<double> out, double scale) noexcept {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v = scale * dist(*this);
}

void RandomStream::add_normal(std::span<double> out, double scale) noexcept {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v += scale * dist(*this);
}

std::uint64_t RandomStream::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  __uint128_t prod = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      x = next_u64();
      prod = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

RandomStream substream(std::uint64_t seed, std::uint64_t step, Phase phase,
                       std::uint64_t index) noexcept {
  std::uint64_t key = mix64(seed ^ 0x5851f42d4c957f2dULL);
  key = mix64(key ^ (step * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
  key = mix64(key ^ (static_cast<std::uint64_t>(phase) * 0xd6e8feb86659fd93ULL));
  key = mix64(key ^ (index * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
  return RandomStream(key);
}

}  // namespace simm
