#include "simm/signals.hpp"

#include <algorithm>
#include <cassert>

#include "simm/parallel.hpp"
#include "simm/world.hpp"

namespace simm {

SignalState::SignalState(std::size_t side, std::size_t width)
    : side_(side), width_(width), data_(4 * side * side * width, 0.0) {}

void shift_signals(SignalState& signals, ThreadPool& pool) {
  const std::size_t row_len = signals.side() * signals.width();
  const std::size_t width = signals.width();
  if (row_len == 0) return;

  auto right = signals.layer(Direction::Right);
  auto left = signals.layer(Direction::Left);
  pool.for_each(signals.side(), [&](std::size_t row) {
    auto r = right.subspan(row * row_len, row_len);
    std::rotate(r.begin(), r.end() - static_cast<long>(width), r.end());
    auto l = left.subspan(row * row_len, row_len);
    std::rotate(l.begin(), l.begin() + static_cast<long>(width), l.end());
  });

  // Whole rows move for the vertical layers; row 0 is the top edge.
  auto up = signals.layer(Direction::Up);
  std::rotate(up.begin(), up.begin() + static_cast<long>(row_len), up.end());
  auto down = signals.layer(Direction::Down);
  std::rotate(down.begin(), down.end() - static_cast<long>(row_len), down.end());
}

void write_signals(World& world, ThreadPool& pool) {
  const double threshold = world.config.effective_signal_threshold();
  const std::size_t broadcast = static_cast<std::size_t>(world.config.broadcast_hidden);
  const std::size_t n_c = world.chemicals();
  pool.for_each(world.cells(), [&](std::size_t cell) {
    if (!(world.energy[cell] > threshold)) return;
    auto dst = world.signals.at(Direction::Right, cell);
    auto h = world.hidden_of(cell);
    std::copy_n(h.begin(), broadcast, dst.begin());
    dst[broadcast] = world.energy[cell];
    auto chem = world.chem_of(cell);
    std::copy_n(chem.begin(), n_c, dst.begin() + static_cast<long>(broadcast + 1));
    auto enz = world.enzyme_of(cell);
    std::copy_n(enz.begin(), n_c, dst.begin() + static_cast<long>(broadcast + 1 + n_c));
    for (Direction d : {Direction::Up, Direction::Left, Direction::Down}) {
      std::ranges::copy(dst, world.signals.at(d, cell).begin());
    }
  });
}

void read_input(const SignalState& signals, std::size_t cell, std::span<double> out) {
  assert(out.size() == 4 * signals.width());
  auto it = out.begin();
  for (Direction d : kDirections) {
    it = std::ranges::copy(signals.at(d, cell), it).out;
  }
}

}  // namespace simm
