#include "simm/neural.hpp"

#include <algorithm>
#include <cmath>

#include "simm/errors.hpp"
#include "simm/parallel.hpp"
#include "simm/rng.hpp"

namespace simm {

void ActionBuffers::resize(const GenomeLayout& layout, std::size_t cells) {
  actions = layout.actions;
  chemicals = layout.chemicals;
  raw.assign(cells * actions, 0.0);
  copy.assign(cells, 0);
  move.assign(cells, 0);
  energy_flow.assign(cells * 4, 0.0);
  chem_flow.assign(cells * 4 * chemicals, 0.0);
  enzyme.assign(cells * chemicals, 0.0);
}

void ActionBuffers::silence(std::size_t cell) {
  copy[cell] = 0;
  move[cell] = 0;
  std::fill_n(energy_flow.begin() + static_cast<long>(cell * 4), 4, 0.0);
  std::fill_n(chem_flow.begin() + static_cast<long>(cell * 4 * chemicals), 4 * chemicals, 0.0);
  std::fill_n(enzyme.begin() + static_cast<long>(cell * chemicals), chemicals, 0.0);
}

namespace {

inline void axpy(double* __restrict acc, const double* __restrict col, double scale,
                 std::size_t n) {
  for (std::size_t r = 0; r < n; ++r) acc[r] += col[r] * scale;
}

// One cell's forward pass. Every sum is accumulated in the same order on
// every target; the clones only change vector width, never rounding.
__attribute__((target_clones("avx512f", "avx2", "default"))) void cell_forward(
    const GenomeLayout& g, const double* __restrict genome, const double* __restrict x,
    double* __restrict h, double* __restrict pre, double* __restrict out) {
  std::copy_n(genome + g.hidden_bias, g.hidden, pre);
  const double* wx = genome + g.input_weights;
  for (std::size_t j = 0; j < g.inputs; ++j) {
    // Adding 0 * w is an exact no-op for finite weights.
    if (x[j] != 0.0) axpy(pre, wx + j * g.hidden, x[j], g.hidden);
  }
  const double* wh = genome + g.recurrent_weights;
  for (std::size_t k = 0; k < g.hidden; ++k) {
    if (h[k] != 0.0) axpy(pre, wh + k * g.hidden, h[k], g.hidden);
  }
  for (std::size_t r = 0; r < g.hidden; ++r) h[r] = std::tanh(pre[r]);

  std::copy_n(genome + g.action_bias, g.actions, out);
  const double* wa = genome + g.action_weights;
  for (std::size_t r = 0; r < g.hidden; ++r) {
    if (h[r] != 0.0) axpy(out, wa + r * g.actions, h[r], g.actions);
  }
}

}  // namespace

void rnn_step(World& world, ActionBuffers& actions, ThreadPool& pool) {
  const GenomeLayout& g = world.layout;
  const std::size_t side = world.side();
  pool.for_each_range(side, [&](std::size_t row_begin, std::size_t row_end) {
    std::vector<double> x(g.inputs);
    std::vector<double> pre(g.hidden);
    for (std::size_t cell = row_begin * side; cell < row_end * side; ++cell) {
      double* out = actions.raw.data() + cell * g.actions;
      if (!world.alive[cell]) {
        std::fill_n(out, g.actions, 0.0);
        continue;
      }
      read_input(world.signals, cell, x);
      cell_forward(g, world.genome.data() + cell * g.size, x.data(),
                   world.hidden.data() + cell * g.hidden, pre.data(), out);
      for (std::size_t a = 0; a < g.actions; ++a) {
        if (!std::isfinite(out[a])) throw NumericFault("rnn_step", world.step, cell);
      }
    }
  });
}

std::size_t argmax(std::span<const double> logits) {
  return static_cast<std::size_t>(std::distance(logits.begin(), std::ranges::max_element(logits)));
}

std::size_t sample_softmax(std::span<const double> logits, double u) {
  const double top = logits[argmax(logits)];
  double weights[8];
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    weights[k] = std::exp(logits[k] - top);
    total += weights[k];
  }
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    cumulative += weights[k];
    last_positive = k;
    if (target < cumulative) return k;
  }
  return last_positive;
}

namespace {

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void decode_actions(const World& world, ActionBuffers& actions, ThreadPool& pool) {
  const GenomeLayout& g = world.layout;
  const bool use_argmax = world.config.copy_argmax;
  pool.for_each(world.cells(), [&](std::size_t cell) {
    if (!world.alive[cell]) {
      actions.silence(cell);
      return;
    }
    const std::span<const double> raw(actions.raw.data() + cell * g.actions, g.actions);
    auto rng = substream(world.config.seed, world.step, Phase::Decode, cell);

    auto copy_logits = raw.subspan(g.copy_logits, 5);
    actions.copy[cell] = static_cast<std::uint8_t>(
        use_argmax ? argmax(copy_logits) : sample_softmax(copy_logits, rng.uniform()));
    if (g.move) {
      auto move_logits = raw.subspan(g.move_logits, 5);
      actions.move[cell] = static_cast<std::uint8_t>(
          use_argmax ? argmax(move_logits) : sample_softmax(move_logits, rng.uniform()));
    } else {
      actions.move[cell] = 0;
    }

    for (std::size_t d = 0; d < 4; ++d) {
      actions.energy_flow[cell * 4 + d] = std::tanh(raw[g.energy_flow + d]);
    }
    for (std::size_t k = 0; k < 4 * g.chemicals; ++k) {
      actions.chem_flow[cell * 4 * g.chemicals + k] = std::tanh(raw[g.chem_flow + k]);
    }
    for (std::size_t c = 0; c < g.chemicals; ++c) {
      actions.enzyme[cell * g.chemicals + c] = logistic(raw[g.enzyme + c]);
    }
  });
}

CopyResult apply_copy(World& world, const ActionBuffers& actions, ThreadPool& pool) {
  const WorldConfig& cfg = world.config;
  const std::size_t side = world.side();
  CopyResult result;

  struct Birth {
    std::size_t source;
    std::size_t target;
  };
  std::vector<Birth> births;
  const double handed = cfg.copy_energy * cfg.copy_newborn_fraction;
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    const std::uint8_t choice = actions.copy[cell];
    if (choice == 0 || !world.alive[cell]) continue;
    if (world.energy[cell] < cfg.copy_threshold) continue;
    const std::size_t target = neighbor(cell, static_cast<Direction>(choice - 1), side);
    if (world.alive[target]) continue;

    world.energy[cell] -= cfg.copy_energy;
    const double room = std::max(0.0, cfg.energy_max - world.energy[target]);
    const double gained = std::min(handed, room);
    world.energy[target] += gained;
    result.cost += cfg.copy_energy - handed;
    result.dissipated += handed - gained;
    world.alive[target] = 1;
    world.age[target] = 0;
    births.push_back({cell, target});
  }

  const double noise = cfg.evolution_enabled ? cfg.mutation_std : 0.0;
  pool.for_each(births.size(), [&](std::size_t k) {
    const auto [source, target] = births[k];
    auto child = world.genome_of(target);
    std::ranges::copy(world.genome_of(source), child.begin());
    if (noise > 0.0) {
      auto rng = substream(cfg.seed, world.step, Phase::Copy, target);
      rng.add_normal(child, noise);
    }
    std::ranges::fill(world.hidden_of(target), 0.0);
  });
  result.copies = births.size();
  return result;
}

MoveResult apply_move(World& world, const ActionBuffers& actions, ThreadPool& pool) {
  MoveResult result;
  const WorldConfig& cfg = world.config;
  if (!cfg.move_enabled) return result;
  const std::size_t side = world.side();
  const double threshold = cfg.effective_move_threshold();

  std::vector<std::uint8_t> busy(world.cells(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    const std::uint8_t choice = actions.move[cell];
    if (choice == 0 || busy[cell] || !world.alive[cell]) continue;
    if (world.energy[cell] < threshold) continue;
    const std::size_t target = neighbor(cell, static_cast<Direction>(choice - 1), side);
    if (busy[target]) continue;
    busy[cell] = busy[target] = 1;
    swaps.emplace_back(cell, target);
  }

  const std::size_t n_c = world.chemicals();
  pool.for_each(swaps.size(), [&](std::size_t k) {
    const auto [a, b] = swaps[k];
    std::ranges::swap_ranges(world.genome_of(a), world.genome_of(b));
    std::ranges::swap_ranges(world.hidden_of(a), world.hidden_of(b));
    std::swap(world.age[a], world.age[b]);
    std::swap(world.alive[a], world.alive[b]);
    if (cfg.move_fields) {
      std::swap(world.energy[a], world.energy[b]);
      if (n_c > 0) {
        std::ranges::swap_ranges(world.chem_of(a), world.chem_of(b));
        std::ranges::swap_ranges(world.enzyme_of(a), world.enzyme_of(b));
      }
    }
  });

  // The mover now sits at the target location and pays there.
  for (const auto& [mover, target] : swaps) {
    (void)mover;
    result.cost += pay_protected(world.energy[target], cfg.move_cost, cfg.death_threshold);
  }
  result.swaps = swaps.size();
  return result;
}

}  // namespace simm
