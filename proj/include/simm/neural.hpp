#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simm/direction.hpp"
#include "simm/world.hpp"

namespace simm {

class ThreadPool;

/// Per-step action scratch for every cell. Raw values come straight from the
/// network; the decoded fields are what the physics phases consume.
/// Choice codes: 0 = none, 1 + to_index(direction) otherwise.
struct ActionBuffers {
  std::size_t actions = 0;
  std::size_t chemicals = 0;
  std::vector<double> raw;           // cells * actions
  std::vector<std::uint8_t> copy;    // cells
  std::vector<std::uint8_t> move;    // cells
  std::vector<double> energy_flow;   // cells * 4, in [-1, 1]
  std::vector<double> chem_flow;     // cells * 4 * chemicals, chemical-major
  std::vector<double> enzyme;        // cells * chemicals, in [0, 1]

  void resize(const GenomeLayout& layout, std::size_t cells);
  /// Zeroes every decoded action of `cell` (used when a cell dies mid-step).
  void silence(std::size_t cell);

  double energy_action(std::size_t cell, Direction d) const {
    return energy_flow[cell * 4 + to_index(d)];
  }
  double chem_action(std::size_t cell, std::size_t chemical, Direction d) const {
    return chem_flow[(cell * chemicals + chemical) * 4 + to_index(d)];
  }
};

/// h' = tanh(W_x x + W_h h + b_h), a = W_a h' + b_a for every live cell,
/// with x read from the signal layers. Weights are never written. Dead cells
/// get zero raw actions. Throws NumericFault on a non-finite result.
void rnn_step(World& world, ActionBuffers& actions, ThreadPool& pool);

/// Samples copy (and move) choices from the softmax of their logits using the
/// cell's own substream, squashes flows with tanh and enzyme production with
/// the logistic function. Dead cells decode to "no action".
void decode_actions(const World& world, ActionBuffers& actions, ThreadPool& pool);

/// Index drawn from softmax(logits) using one uniform from `u`.
std::size_t sample_softmax(std::span<const double> logits, double u);
std::size_t argmax(std::span<const double> logits);

struct CopyResult {
  std::size_t copies = 0;
  double cost = 0.0;         // part of e_copy not handed to the newborn
  double dissipated = 0.0;   // newborn energy above e_max
};

/// Copy with mutation into dead neighbours. Sources are visited in raster
/// order; a source needs at least `theta_copy` energy, pays `e_copy`, and the
/// target receives `copy_newborn_fraction * e_copy`. A target claimed by an
/// earlier source is no longer dead, so later sources aiming at it no-op.
CopyResult apply_copy(World& world, const ActionBuffers& actions, ThreadPool& pool);

struct MoveResult {
  std::size_t swaps = 0;
  double cost = 0.0;
};

/// Swaps the full content of a mover and its chosen neighbour (fields too
/// unless `move_fields` is off). Raster order decides conflicts and every
/// cell takes part in at most one swap per step. Identity when moves are
/// disabled.
MoveResult apply_move(World& world, const ActionBuffers& actions, ThreadPool& pool);

/// Debits up to `amount` from `energy` without crossing `floor`; returns the
/// amount actually paid.
inline double pay_protected(double& energy, double amount, double floor) {
  double available = energy - floor;
  if (available < 0.0) available = 0.0;
  const double paid = amount < available ? amount : available;
  energy -= paid;
  return paid;
}

}  // namespace simm
