#include "simm/engine.hpp"

#include <algorithm>
#include <bit>
#include <bitset>
#include <chrono>
#include <cmath>

#include "simm/physics.hpp"
#include "simm/rng.hpp"
#include "simm/signals.hpp"

namespace simm {

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::ShiftSignals: return "shift_signals";
    case Stage::WriteSignals: return "write_signals";
    case Stage::Think: return "rnn_step";
    case Stage::Decode: return "decode_actions";
    case Stage::Enzymes: return "produce_enzymes";
    case Stage::Reactions: return "apply_reactions";
    case Stage::Regen: return "pure_energy_regen";
    case Stage::EnergyFlow: return "resolve_flows(energy)";
    case Stage::ChemFlow: return "resolve_flows(chemicals)";
    case Stage::Diffuse: return "diffuse_chemicals";
    case Stage::Copy: return "apply_copy";
    case Stage::Move: return "apply_move";
    case Stage::Death: return "apply_death_and_aging";
    case Stage::Reawaken: return "reawaken";
    case Stage::ParticleStep: return "particle_step";
    case Stage::ParticleCopy: return "particle_copy_overwrite";
  }
  return "unknown";
}

namespace {

double sum(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

double total_energy(const World& world) {
  if (world.config.variant == Variant::Particles) {
    return sum(world.particles.energy) + sum(world.energy);
  }
  return sum(world.energy);
}

int bin_of(double value, double lo, double hi) {
  const double t = (value - lo) / (hi - lo);
  return std::clamp(static_cast<int>(std::floor(t * 16.0)), 0, 15);
}

}  // namespace

std::size_t species_proxy(const World& world) {
  const double lo = world.config.frame_lo;
  const double hi = world.config.frame_hi;
  std::bitset<16 * 16 * 16> seen;
  auto visit = [&](const double* genome) {
    const int r = bin_of(genome[world.tracked_weights[0]], lo, hi);
    const int g = bin_of(genome[world.tracked_weights[1]], lo, hi);
    const int b = bin_of(genome[world.tracked_weights[2]], lo, hi);
    seen.set(static_cast<std::size_t>((r * 16 + g) * 16 + b));
  };
  if (world.config.variant == Variant::Particles) {
    const auto& p = world.particles;
    for (std::size_t i = 0; i < p.count; ++i) visit(p.genome.data() + i * world.particle_layout.size);
  } else {
    for (std::size_t cell = 0; cell < world.cells(); ++cell) {
      if (world.alive[cell]) visit(world.genome.data() + cell * world.layout.size);
    }
  }
  return seen.count();
}

MetricsRecord measure(const World& world) {
  MetricsRecord m;
  m.step = world.step;
  m.alive_fraction = alive_fraction(world);
  const std::size_t n_c = world.chemicals();
  m.chem_totals.assign(n_c, 0.0);
  if (world.config.variant == Variant::Particles) {
    m.total_energy = sum(world.particles.energy);
    m.mean_energy = m.total_energy / static_cast<double>(world.particles.count);
  } else {
    m.total_energy = sum(world.energy);
    m.mean_energy = m.total_energy / static_cast<double>(world.cells());
    for (std::size_t cell = 0; cell < world.cells(); ++cell) {
      for (std::size_t c = 0; c < n_c; ++c) m.chem_totals[c] += world.chem[cell * n_c + c];
    }
  }
  m.species_proxy = species_proxy(world);
  return m;
}

namespace {

class Digest {
 public:
  void word(std::uint64_t w) {
    state_ = (state_ ^ w) * 0x100000001b3ULL;
    state_ ^= state_ >> 29;
  }
  template <typename T>
  void array(const std::vector<T>& v) {
    word(v.size());
    for (const T& x : v) {
      if constexpr (std::is_same_v<T, double>) {
        word(std::bit_cast<std::uint64_t>(x));
      } else {
        word(static_cast<std::uint64_t>(x));
      }
    }
  }
  std::uint64_t value() const { return mix64(state_); }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t world_hash(const World& world) {
  Digest d;
  d.word(world.config.seed);
  d.word(world.step);
  d.word(static_cast<std::uint64_t>(world.config.variant));
  for (auto t : world.tracked_weights) d.word(t);
  d.array(world.genome);
  d.array(world.hidden);
  d.array(world.age);
  d.array(world.alive);
  d.array(world.energy);
  d.array(world.chem);
  d.array(world.enzyme);
  d.array(world.signals.raw());
  d.array(world.particles.x);
  d.array(world.particles.y);
  d.array(world.particles.energy);
  d.array(world.particles.genome);
  d.array(world.particles.hidden);
  return d.value();
}

Engine::Engine(World world, std::size_t workers) : world_(std::move(world)), pool_(workers) {
  if (world_.config.variant != Variant::Particles) actions_.resize(world_.layout, world_.cells());
}

Engine::StepReport Engine::step() {
  const auto start = std::chrono::steady_clock::now();
  StepReport report;
  StepLedger& ledger = report.ledger;
  ledger.step = world_.step;
  ledger.before = total_energy(world_);
  if (world_.config.variant == Variant::Particles) {
    particle_step_all(ledger);
  } else {
    grid_step(ledger);
  }
  ledger.after = total_energy(world_);
  ++world_.step;
  const auto elapsed = std::chrono::steady_clock::now() - start;
  report.metrics = measure(world_);
  report.metrics.ms_per_step = std::chrono::duration<double, std::milli>(elapsed).count();
  return report;
}

void Engine::grid_step(StepLedger& ledger) {
  const WorldConfig& cfg = world_.config;
  const bool chemistry = cfg.variant == Variant::Grid;

  shift_signals(world_.signals, pool_);
  notify(Stage::ShiftSignals);
  write_signals(world_, pool_);
  notify(Stage::WriteSignals);
  rnn_step(world_, actions_, pool_);
  notify(Stage::Think);
  decode_actions(world_, actions_, pool_);
  notify(Stage::Decode);

  if (chemistry) {
    ledger.enzyme_cost = produce_enzymes(world_, actions_, pool_);
    notify(Stage::Enzymes);
    const ReactionResult r = apply_reactions(world_, pool_);
    ledger.released += r.released;
    ledger.dissipated += r.dissipated;
    notify(Stage::Reactions);
  } else {
    ledger.released += pure_energy_regen(world_.energy, cfg.regen_rate, cfg.regen_cap);
    notify(Stage::Regen);
  }

  const FlowResult energy = resolve_energy_flows(world_, actions_, pool_);
  ledger.flow_cost += energy.cost;
  ledger.dissipated += energy.dissipated;
  ledger.kills = energy.kills;
  notify(Stage::EnergyFlow);

  if (chemistry) {
    ledger.flow_cost += resolve_chemical_flows(world_, actions_, pool_).cost;
    notify(Stage::ChemFlow);
    if (cfg.diffusion_enabled) {
      diffuse_chemicals(world_, pool_);
      notify(Stage::Diffuse);
    }
  }

  const CopyResult copy = apply_copy(world_, actions_, pool_);
  ledger.copy_cost = copy.cost;
  ledger.dissipated += copy.dissipated;
  ledger.copies = copy.copies;
  notify(Stage::Copy);

  const MoveResult move = apply_move(world_, actions_, pool_);
  ledger.move_cost = move.cost;
  ledger.swaps = move.swaps;
  notify(Stage::Move);

  ledger.deaths = apply_death_and_aging(world_, pool_);
  notify(Stage::Death);

  const ReawakenResult re = reawaken(world_, pool_);
  ledger.injected = re.energy_delta;
  ledger.spawned = re.spawned;
  notify(Stage::Reawaken);
}

void Engine::particle_step_all(StepLedger& ledger) {
  const ParticleStepResult s = particle_step(world_, particle_actions_, pool_);
  ledger.released = s.regenerated;
  notify(Stage::ParticleStep);
  const ParticleCopyResult c = particle_copy_overwrite(world_, particle_actions_, pool_);
  ledger.copy_cost = c.cost;
  ledger.copies = c.copies;
  notify(Stage::ParticleCopy);
}

RunResult run(const WorldConfig& config, const RunOptions& options,
              const RunCallbacks& callbacks) {
  ThreadPool init_pool(options.workers);
  return run_from(init_world(config, init_pool), options, callbacks);
}

RunResult run_from(World world, const RunOptions& options, const RunCallbacks& callbacks) {
  Engine engine(std::move(world), options.workers);
  RunResult result;
  const std::uint64_t start = engine.world().step;
  const std::uint64_t end = start + options.steps;
  const std::uint64_t metrics_every = std::max<std::uint64_t>(1, options.metrics_every);

  auto record = [&](const MetricsRecord& m) {
    result.metrics.push_back(m);
    if (callbacks.on_metrics) callbacks.on_metrics(engine.world(), m);
  };
  record(measure(engine.world()));

  bool final_saved = false;
  while (engine.world().step < end) {
    if (callbacks.stop && callbacks.stop->load()) {
      result.interrupted = true;
      break;
    }
    const Engine::StepReport report = engine.step();
    const std::uint64_t now = engine.world().step;
    if (callbacks.on_ledger) callbacks.on_ledger(engine.world(), report.ledger);
    if ((now - start) % metrics_every == 0) record(report.metrics);
    if (options.frames_every > 0 && now % options.frames_every == 0 && callbacks.on_frame) {
      callbacks.on_frame(engine.world());
    }
    final_saved = false;
    if (options.checkpoint_every > 0 && now % options.checkpoint_every == 0 &&
        callbacks.on_checkpoint) {
      callbacks.on_checkpoint(engine.world());
      final_saved = true;
    }
  }
  if (callbacks.on_checkpoint && !final_saved) callbacks.on_checkpoint(engine.world());
  result.world = std::move(engine).release();
  return result;
}

}  // namespace simm
