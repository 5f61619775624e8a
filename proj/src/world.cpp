#include "simm/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simm/parallel.hpp"
#include "simm/particles.hpp"
#include "simm/rng.hpp"

namespace simm {

GenomeLayout GenomeLayout::for_config(const WorldConfig& config) {
  GenomeLayout g;
  g.hidden = static_cast<std::size_t>(config.hidden_size);
  g.chemicals = static_cast<std::size_t>(config.chemical_count);
  g.signal = signal_width(static_cast<std::size_t>(config.broadcast_hidden), g.chemicals);
  g.inputs = 4 * g.signal;
  g.move = config.move_enabled;

  std::size_t a = 0;
  g.copy_logits = a;
  a += 5;
  g.move_logits = a;
  if (g.move) a += 5;
  g.energy_flow = a;
  a += 4;
  g.chem_flow = a;
  a += 4 * g.chemicals;
  g.enzyme = a;
  a += g.chemicals;
  g.actions = a;

  std::size_t o = 0;
  g.input_weights = o;
  o += g.inputs * g.hidden;
  g.recurrent_weights = o;
  o += g.hidden * g.hidden;
  g.hidden_bias = o;
  o += g.hidden;
  g.action_weights = o;
  o += g.hidden * g.actions;
  g.action_bias = o;
  o += g.actions;
  g.size = o;
  return g;
}

ParticleLayout ParticleLayout::for_config(const WorldConfig& config) {
  ParticleLayout p;
  p.hidden = static_cast<std::size_t>(config.hidden_size);
  p.attention = static_cast<std::size_t>(config.attention_size);
  std::size_t o = 0;
  p.input_weights = o;
  o += p.attention * p.hidden;
  p.recurrent_weights = o;
  o += p.hidden * p.hidden;
  p.hidden_bias = o;
  o += p.hidden;
  p.action_weights = o;
  o += p.hidden * kActions;
  p.action_bias = o;
  o += kActions;
  p.query = o;
  o += p.hidden * p.attention;
  p.key = o;
  o += p.hidden * p.attention;
  p.value = o;
  o += p.hidden * p.attention;
  p.size = o;
  return p;
}

void fill_gaussian(std::span<double> genome, double std, RandomStream& rng) {
  rng.fill_normal(genome, std);
}

namespace {

std::array<std::uint32_t, 3> draw_tracked_weights(std::uint64_t seed, std::size_t genome_size) {
  auto rng = substream(seed, 0, Phase::FrameIndices, 0);
  std::array<std::uint32_t, 3> picked{};
  for (std::size_t k = 0; k < picked.size(); ++k) {
    for (;;) {
      auto candidate = static_cast<std::uint32_t>(rng.below(genome_size));
      // Genomes smaller than three entries cannot give distinct coordinates.
      const bool repeat = std::find(picked.begin(), picked.begin() + static_cast<long>(k),
                                    candidate) != picked.begin() + static_cast<long>(k);
      if (!repeat || genome_size < picked.size()) {
        picked[k] = candidate;
        break;
      }
    }
  }
  return picked;
}

// First `k` entries of `pool` become a uniform sample without replacement.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t k, RandomStream& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

World init_world(const WorldConfig& config, ThreadPool& pool) {
  config.validate();

  World w;
  w.config = config;
  w.layout = GenomeLayout::for_config(config);
  w.particle_layout = ParticleLayout::for_config(config);
  const std::size_t cells = w.cells();

  if (config.variant == Variant::Particles) {
    w.energy.assign(cells, config.regen_cap);
    w.tracked_weights = draw_tracked_weights(config.seed, w.particle_layout.size);
    init_particles(w, pool);
    return w;
  }

  const std::size_t n_c = w.chemicals();
  w.genome.assign(cells * w.layout.size, 0.0);
  w.hidden.assign(cells * w.layout.hidden, 0.0);
  w.age.assign(cells, 0);
  w.alive.assign(cells, 0);
  w.energy.assign(cells, 0.0);
  const double chem0 = config.variant == Variant::PureEnergy ? 0.0 : config.chem_init;
  w.chem.assign(cells * n_c, chem0);
  w.enzyme.assign(cells * n_c, 0.0);
  w.signals = SignalState(w.side(), w.layout.signal);
  w.tracked_weights = draw_tracked_weights(config.seed, w.layout.size);

  const auto initial = static_cast<std::size_t>(
      std::llround(config.init_alive_fraction * static_cast<double>(cells)));
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto pick = substream(config.seed, 0, Phase::InitAlive, 0);
  partial_shuffle(order, initial, pick);
  for (std::size_t k = 0; k < initial; ++k) {
    w.alive[order[k]] = 1;
    w.energy[order[k]] = config.energy_init;
  }

  pool.for_each(cells, [&](std::size_t cell) {
    if (!w.alive[cell]) return;
    auto rng = substream(config.seed, 0, Phase::InitGenome, cell);
    fill_gaussian(w.genome_of(cell), config.init_std, rng);
  });
  return w;
}

std::size_t alive_count(const World& world) {
  if (world.config.variant == Variant::Particles) return world.particles.count;
  return static_cast<std::size_t>(std::count(world.alive.begin(), world.alive.end(), 1));
}

double alive_fraction(const World& world) {
  if (world.config.variant == Variant::Particles) return 1.0;
  return static_cast<double>(alive_count(world)) / static_cast<double>(world.cells());
}

std::size_t reawaken_target(const WorldConfig& config) {
  const double cells = static_cast<double>(config.side) * static_cast<double>(config.side);
  // The tolerance absorbs representation error in products like 0.1 * 10000.
  return static_cast<std::size_t>(std::ceil(config.reawaken_floor * cells - 1e-9));
}

ReawakenResult reawaken(World& world, ThreadPool& pool) {
  ReawakenResult result;
  const std::size_t alive = alive_count(world);
  const std::size_t target = reawaken_target(world.config);
  if (alive >= target) return result;

  std::vector<std::size_t> dead;
  dead.reserve(world.cells() - alive);
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    if (!world.alive[cell]) dead.push_back(cell);
  }
  const std::size_t spawn = target - alive;
  auto pick = substream(world.config.seed, world.step, Phase::ReawakenPick, 0);
  partial_shuffle(dead, spawn, pick);
  dead.resize(spawn);
  std::sort(dead.begin(), dead.end());

  for (std::size_t cell : dead) {
    result.energy_delta += world.config.energy_init - world.energy[cell];
    world.energy[cell] = world.config.energy_init;
    world.alive[cell] = 1;
    world.age[cell] = 0;
  }
  pool.for_each(dead.size(), [&](std::size_t k) {
    const std::size_t cell = dead[k];
    auto rng = substream(world.config.seed, world.step, Phase::ReawakenGenome, cell);
    fill_gaussian(world.genome_of(cell), world.config.init_std, rng);
    std::ranges::fill(world.hidden_of(cell), 0.0);
  });
  result.spawned = spawn;
  return result;
}

void clear_cell(World& world, std::size_t cell) {
  std::ranges::fill(world.genome_of(cell), 0.0);
  std::ranges::fill(world.hidden_of(cell), 0.0);
  world.age[cell] = 0;
  world.alive[cell] = 0;
}

}  // namespace simm
