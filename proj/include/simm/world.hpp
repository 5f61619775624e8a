#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simm/config.hpp"
#include "simm/signals.hpp"

namespace simm {

class ThreadPool;
class RandomStream;

/// Offsets into one cell's contiguous genome block.
///
/// Matrices are stored source-major so the update accumulates whole columns:
/// input weight (j -> r) lives at `input_weights + j * hidden + r`, recurrent
/// weight (k -> r) at `recurrent_weights + k * hidden + r`, and action weight
/// (r -> a) at `action_weights + r * actions + a`.
struct GenomeLayout {
  std::size_t hidden = 0;
  std::size_t signal = 0;
  std::size_t inputs = 0;
  std::size_t actions = 0;
  std::size_t chemicals = 0;
  bool move = false;

  std::size_t input_weights = 0;
  std::size_t recurrent_weights = 0;
  std::size_t hidden_bias = 0;
  std::size_t action_weights = 0;
  std::size_t action_bias = 0;
  std::size_t size = 0;

  // action vector segments
  std::size_t copy_logits = 0;
  std::size_t move_logits = 0;
  std::size_t energy_flow = 0;
  std::size_t chem_flow = 0;  // chemical c toward direction d at chem_flow + 4 * c + d
  std::size_t enzyme = 0;

  static GenomeLayout for_config(const WorldConfig& config);
  bool operator==(const GenomeLayout&) const = default;
};

/// Genome of a free-moving element: the cell network plus attention
/// projections. Q, K and V map hidden -> attention space and are stored
/// hidden-major (`query + r * attention + a`).
struct ParticleLayout {
  std::size_t hidden = 0;
  std::size_t attention = 0;
  static constexpr std::size_t kActions = 4;  // vx, vy, stay, copy

  std::size_t input_weights = 0;
  std::size_t recurrent_weights = 0;
  std::size_t hidden_bias = 0;
  std::size_t action_weights = 0;
  std::size_t action_bias = 0;
  std::size_t query = 0;
  std::size_t key = 0;
  std::size_t value = 0;
  std::size_t size = 0;

  static ParticleLayout for_config(const WorldConfig& config);
  bool operator==(const ParticleLayout&) const = default;
};

struct ParticleState {
  std::size_t count = 0;
  std::vector<double> x;  // column coordinate in [0, side)
  std::vector<double> y;  // row coordinate in [0, side)
  std::vector<double> energy;
  std::vector<double> genome;  // count * layout.size
  std::vector<double> hidden;  // count * hidden

  bool operator==(const ParticleState&) const = default;
};

/// Complete simulation state. Everything that influences future steps lives
/// here; the random state is (config.seed, step).
struct World {
  WorldConfig config;
  GenomeLayout layout;
  ParticleLayout particle_layout;
  std::uint64_t step = 0;

  // per-cell network state (empty for the particle variant)
  std::vector<double> genome;
  std::vector<double> hidden;
  std::vector<std::int64_t> age;
  std::vector<std::uint8_t> alive;

  // fields
  std::vector<double> energy;
  std::vector<double> chem;
  std::vector<double> enzyme;

  SignalState signals;
  ParticleState particles;

  /// Genome coordinates shown in weight frames and hashed for the species proxy.
  std::array<std::uint32_t, 3> tracked_weights{};

  std::size_t side() const noexcept { return static_cast<std::size_t>(config.side); }
  std::size_t cells() const noexcept { return side() * side(); }
  std::size_t chemicals() const noexcept { return static_cast<std::size_t>(config.chemical_count); }

  std::span<double> genome_of(std::size_t cell) {
    return {genome.data() + cell * layout.size, layout.size};
  }
  std::span<const double> genome_of(std::size_t cell) const {
    return {genome.data() + cell * layout.size, layout.size};
  }
  std::span<double> hidden_of(std::size_t cell) {
    return {hidden.data() + cell * layout.hidden, layout.hidden};
  }
  std::span<const double> hidden_of(std::size_t cell) const {
    return {hidden.data() + cell * layout.hidden, layout.hidden};
  }
  std::span<double> chem_of(std::size_t cell) {
    return {chem.data() + cell * chemicals(), chemicals()};
  }
  std::span<const double> chem_of(std::size_t cell) const {
    return {chem.data() + cell * chemicals(), chemicals()};
  }
  std::span<double> enzyme_of(std::size_t cell) {
    return {enzyme.data() + cell * chemicals(), chemicals()};
  }
  std::span<const double> enzyme_of(std::size_t cell) const {
    return {enzyme.data() + cell * chemicals(), chemicals()};
  }

  bool operator==(const World&) const = default;
};

/// Validates the config and builds the initial lattice: round(p_init * m^2)
/// cells chosen uniformly are alive with Gaussian genomes and `e_init`
/// energy; chemicals start uniform at `chem_init`; enzymes and signals at 0.
World init_world(const WorldConfig& config, ThreadPool& pool);

std::size_t alive_count(const World& world);
double alive_fraction(const World& world);

/// Number of live cells the reawaken floor requires.
std::size_t reawaken_target(const WorldConfig& config);

struct ReawakenResult {
  std::size_t spawned = 0;
  double energy_delta = 0.0;  // total energy change from resetting spawned sites
};

/// Tops the population up to ceil(f_min * m^2) when the alive fraction has
/// fallen below f_min. New cells go to uniformly drawn dead sites and get
/// fresh random genomes, zero activations and `e_init` energy.
ReawakenResult reawaken(World& world, ThreadPool& pool);

/// Erases a cell's network: genome and activations zeroed, age reset,
/// marked dead. Field content stays in place.
void clear_cell(World& world, std::size_t cell);

/// Fills `genome` with i.i.d. Normal(0, std^2) draws.
void fill_gaussian(std::span<double> genome, double std, RandomStream& rng);

}  // namespace simm
