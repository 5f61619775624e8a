#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace simm {

/// Lattice directions in the order used by signal layers and flow actions.
/// Row 0 is the top of the lattice, so Up decreases the row index.
enum class Direction : std::uint8_t { Right = 0, Up = 1, Left = 2, Down = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::Right, Direction::Up,
                                                      Direction::Left, Direction::Down};

constexpr Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<unsigned>(d) + 2U) % 4U);
}

constexpr std::size_t to_index(Direction d) { return static_cast<std::size_t>(d); }

constexpr int row_step(Direction d) {
  return d == Direction::Up ? -1 : (d == Direction::Down ? 1 : 0);
}

constexpr int col_step(Direction d) {
  return d == Direction::Right ? 1 : (d == Direction::Left ? -1 : 0);
}

/// Toroidal neighbour of `cell` on a side x side lattice.
constexpr std::size_t neighbor(std::size_t cell, Direction d, std::size_t side) {
  const std::size_t row = cell / side;
  const std::size_t col = cell % side;
  const std::size_t r = (row + side + static_cast<std::size_t>(row_step(d) + 1) - 1) % side;
  const std::size_t c = (col + side + static_cast<std::size_t>(col_step(d) + 1) - 1) % side;
  return r * side + c;
}

}  // namespace simm
