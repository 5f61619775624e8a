#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "simm/neural.hpp"
#include "simm/parallel.hpp"
#include "simm/particles.hpp"
#include "simm/world.hpp"

namespace simm {

/// Energy audit of one step. Closure:
///   after = before + released + injected - costs() - dissipated
struct StepLedger {
  std::uint64_t step = 0;
  double before = 0.0;
  double after = 0.0;
  double released = 0.0;  // reactions, or regeneration in the reduced variants
  double injected = 0.0;  // reawakened sites reset to e_init (may be negative)
  double enzyme_cost = 0.0;
  double flow_cost = 0.0;
  double copy_cost = 0.0;
  double move_cost = 0.0;
  double dissipated = 0.0;  // overflow above caps, including kill overflow

  std::size_t copies = 0;
  std::size_t swaps = 0;
  std::size_t kills = 0;
  std::size_t deaths = 0;
  std::size_t spawned = 0;

  double costs() const { return enzyme_cost + flow_cost + copy_cost + move_cost; }
  double residual() const { return after - (before + released + injected - costs() - dissipated); }
};

struct MetricsRecord {
  std::uint64_t step = 0;
  double alive_fraction = 0.0;
  double total_energy = 0.0;
  double mean_energy = 0.0;
  std::vector<double> chem_totals;
  std::size_t species_proxy = 0;
  double ms_per_step = 0.0;
};

/// Pipeline stages in execution order, reported to the stage observer.
enum class Stage {
  ShiftSignals,
  WriteSignals,
  Think,
  Decode,
  Enzymes,
  Reactions,
  Regen,
  EnergyFlow,
  ChemFlow,
  Diffuse,
  Copy,
  Move,
  Death,
  Reawaken,
  ParticleStep,
  ParticleCopy,
};

std::string_view stage_name(Stage s);

/// Observables of the current state; `ms_per_step` is left for the caller.
MetricsRecord measure(const World& world);

/// Distinct occupied bins of the three tracked genome coordinates among live
/// cells (or all particles), 16 bins per coordinate over the frame window.
std::size_t species_proxy(const World& world);

/// Order-stable 64-bit digest of the complete state.
std::uint64_t world_hash(const World& world);

/// Owns the only mutable world and runs the per-step stage pipeline.
class Engine {
 public:
  explicit Engine(World world, std::size_t workers = 1);

  struct StepReport {
    StepLedger ledger;
    MetricsRecord metrics;
  };

  StepReport step();

  const World& world() const noexcept { return world_; }
  World& world() noexcept { return world_; }
  World release() && { return std::move(world_); }
  std::size_t workers() const noexcept { return pool_.workers(); }
  ThreadPool& pool() noexcept { return pool_; }

  using StageObserver = std::function<void(Stage, const World&)>;
  /// Called after every stage with the post-stage state (tests and audits).
  void set_stage_observer(StageObserver observer) { observer_ = std::move(observer); }

 private:
  void grid_step(StepLedger& ledger);
  void particle_step_all(StepLedger& ledger);
  void notify(Stage s) {
    if (observer_) observer_(s, world_);
  }

  World world_;
  ThreadPool pool_;
  ActionBuffers actions_;
  ParticleActions particle_actions_;
  StageObserver observer_;
};

struct RunOptions {
  std::uint64_t steps = 0;
  std::size_t workers = 1;
  std::uint64_t metrics_every = 1;
  std::uint64_t frames_every = 0;      // 0 disables
  std::uint64_t checkpoint_every = 0;  // 0 disables
};

struct RunCallbacks {
  std::function<void(const World&, const MetricsRecord&)> on_metrics;
  std::function<void(const World&, const StepLedger&)> on_ledger;
  std::function<void(const World&)> on_frame;
  std::function<void(const World&)> on_checkpoint;
  /// Polled between steps; when set the run stops and writes a final checkpoint.
  const std::atomic<bool>* stop = nullptr;
};

struct RunResult {
  World world;
  std::vector<MetricsRecord> metrics;
  bool interrupted = false;
};

/// Initializes a world from `config` and advances it `options.steps` steps.
/// Metrics are recorded for the starting state and then every
/// `metrics_every` steps; frames and checkpoints fire on their cadences
/// (never for the starting state). The final state is always checkpointed
/// when a checkpoint callback is given.
RunResult run(const WorldConfig& config, const RunOptions& options,
              const RunCallbacks& callbacks = {});

/// Same as `run` but continues from an existing world (resume).
RunResult run_from(World world, const RunOptions& options, const RunCallbacks& callbacks = {});

}  // namespace simm
