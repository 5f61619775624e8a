#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simm/direction.hpp"

namespace simm {

struct World;
class ThreadPool;

/// Four information layers, one per direction, each side x side x width.
/// Storage is layer-major, then row-major cells, then the payload vector:
/// [hidden slice | energy | chemicals | enzymes].
class SignalState {
 public:
  SignalState() = default;
  SignalState(std::size_t side, std::size_t width);

  std::size_t side() const noexcept { return side_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t cells() const noexcept { return side_ * side_; }

  std::span<double> at(Direction layer, std::size_t cell) {
    return {data_.data() + offset(layer, cell), width_};
  }
  std::span<const double> at(Direction layer, std::size_t cell) const {
    return {data_.data() + offset(layer, cell), width_};
  }
  std::span<double> layer(Direction d) {
    return {data_.data() + offset(d, 0), cells() * width_};
  }
  std::span<const double> layer(Direction d) const {
    return {data_.data() + offset(d, 0), cells() * width_};
  }

  std::vector<double>& raw() noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  bool operator==(const SignalState&) const = default;

 private:
  std::size_t offset(Direction d, std::size_t cell) const {
    return (to_index(d) * cells() + cell) * width_;
  }

  std::size_t side_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// Payload width for a run: broadcast hidden units, energy, chemicals, enzymes.
constexpr std::size_t signal_width(std::size_t broadcast_hidden, std::size_t chemicals) {
  return broadcast_hidden + 1 + 2 * chemicals;
}

/// Moves every layer one cell along its direction, wrapping at the edges.
void shift_signals(SignalState& signals, ThreadPool& pool);

/// Cells with energy above the signal threshold overwrite all four layers at
/// their own location with their payload. Other locations keep whatever was
/// shifted in.
void write_signals(World& world, ThreadPool& pool);

/// Network input of one cell: the right, up, left and down layer vectors at
/// its location, concatenated in that order. `out` must hold 4 * width.
void read_input(const SignalState& signals, std::size_t cell, std::span<double> out);

}  // namespace simm
