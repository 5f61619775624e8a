#pragma once

#include <cstddef>

#include "simm/neural.hpp"
#include "simm/world.hpp"

namespace simm {

class ThreadPool;

/// Sets each live cell's enzyme levels from its production actions, rescaled
/// to sum to one when they exceed it, and charges `lambda_enz * sum` without
/// crossing the death threshold. Returns the energy paid.
double produce_enzymes(World& world, const ActionBuffers& actions, ThreadPool& pool);

struct ReactionResult {
  double released = 0.0;
  double dissipated = 0.0;
};

/// Cyclic conversion C_i -> C_(i+1 mod n) at rate kappa_r * Z_i * C_i, all
/// rates taken from the same pre-reaction state. Every conversion except
/// the last releases `e_release` per converted unit (a flat `e_release` with
/// `fixed_release`). Energy above e_max dissipates.
ReactionResult apply_reactions(World& world, ThreadPool& pool);

struct FlowResult {
  double cost = 0.0;
  double dissipated = 0.0;
  std::size_t kills = 0;
};

/// Energy exchange across every lattice edge. For the edge (A, B) along d the
/// net pull is a_A[d] - a_B[opposite d]; the donor loses kappa_e * |net| of
/// its stock, kept above the protective floor and below the recipient's cap.
/// A pull of at least `theta_kill` on a live neighbour drains and kills it.
/// Horizontal edges go first, then vertical ones, each in raster order.
/// Cells killed here have their remaining actions silenced.
FlowResult resolve_energy_flows(World& world, ActionBuffers& actions, ThreadPool& pool);

/// Same edge rule for every chemical, with a zero floor and no cap.
FlowResult resolve_chemical_flows(World& world, const ActionBuffers& actions, ThreadPool& pool);

/// Blends each chemical field toward the mean of its four neighbours.
void diffuse_chemicals(World& world, ThreadPool& pool);

/// Ages live cells and erases those below the death threshold or past the
/// maximum lifetime. Returns the number of deaths.
std::size_t apply_death_and_aging(World& world, ThreadPool& pool);

}  // namespace simm
