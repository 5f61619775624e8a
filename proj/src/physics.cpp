#include "simm/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "simm/parallel.hpp"

namespace simm {

namespace {

// Runs `body(row, partial)` for every row and sums the per-row partials in
// row order, so totals do not depend on the worker count.
template <typename Partial, typename Body>
Partial reduce_rows(std::size_t rows, ThreadPool& pool, Body&& body) {
  std::vector<Partial> partials(rows);
  pool.for_each(rows, [&](std::size_t row) { body(row, partials[row]); });
  Partial total{};
  for (const Partial& p : partials) total += p;
  return total;
}

struct EnergyTally {
  double dissipated = 0.0;
  std::size_t kills = 0;
  EnergyTally& operator+=(const EnergyTally& o) {
    dissipated += o.dissipated;
    kills += o.kills;
    return *this;
  }
};

}  // namespace

double produce_enzymes(World& world, const ActionBuffers& actions, ThreadPool& pool) {
  const std::size_t side = world.side();
  const std::size_t n_c = world.chemicals();
  const double rate = world.config.enzyme_cost;
  const double floor = world.config.death_threshold;
  return reduce_rows<double>(side, pool, [&](std::size_t row, double& paid) {
    for (std::size_t cell = row * side; cell < (row + 1) * side; ++cell) {
      if (!world.alive[cell]) continue;
      const double* wanted = actions.enzyme.data() + cell * n_c;
      auto enz = world.enzyme_of(cell);
      double total = 0.0;
      for (std::size_t c = 0; c < n_c; ++c) total += wanted[c];
      const double scale = total > 1.0 ? 1.0 / total : 1.0;
      double level = 0.0;
      for (std::size_t c = 0; c < n_c; ++c) {
        enz[c] = wanted[c] * scale;
        level += enz[c];
      }
      paid += pay_protected(world.energy[cell], rate * level, floor);
    }
  });
}

ReactionResult apply_reactions(World& world, ThreadPool& pool) {
  const std::size_t side = world.side();
  const std::size_t n_c = world.chemicals();
  const WorldConfig& cfg = world.config;

  struct Tally {
    double released = 0.0;
    double dissipated = 0.0;
    Tally& operator+=(const Tally& o) {
      released += o.released;
      dissipated += o.dissipated;
      return *this;
    }
  };
  const Tally t = reduce_rows<Tally>(side, pool, [&](std::size_t row, Tally& tally) {
    std::vector<double> converted(n_c);
    for (std::size_t cell = row * side; cell < (row + 1) * side; ++cell) {
      auto chem = world.chem_of(cell);
      auto enz = world.enzyme_of(cell);
      double gain = 0.0;
      for (std::size_t c = 0; c < n_c; ++c) {
        converted[c] = cfg.reaction_rate * enz[c] * chem[c];
        if (c + 1 < n_c) {
          if (cfg.fixed_release) {
            if (converted[c] > 0.0) gain += cfg.reaction_energy;
          } else {
            gain += cfg.reaction_energy * converted[c];
          }
        }
      }
      for (std::size_t c = 0; c < n_c; ++c) {
        chem[c] -= converted[c];
        chem[(c + 1) % n_c] += converted[c];
      }
      if (gain == 0.0) continue;
      double& e = world.energy[cell];
      e += gain;
      tally.released += gain;
      if (e > cfg.energy_max) {
        tally.dissipated += e - cfg.energy_max;
        e = cfg.energy_max;
      }
    }
  });
  return {t.released, t.dissipated};
}

namespace {

struct EdgeContext {
  World& world;
  ActionBuffers& actions;
  double rate;
  double kill_threshold;
  double cap;
  double floor_alive;
  bool push_own_stock;
};

double stock_base(const EdgeContext& ctx, double a_action, double b_action, double a_stock,
                  double b_stock, double donor_stock) {
  if (!ctx.push_own_stock) return donor_stock;
  return std::abs(a_action) >= std::abs(b_action) ? a_stock : b_stock;
}

void energy_edge(const EdgeContext& ctx, std::size_t a, std::size_t b, Direction d,
                 EnergyTally& tally) {
  World& w = ctx.world;
  const double pull_a = ctx.actions.energy_action(a, d);
  const double pull_b = ctx.actions.energy_action(b, opposite(d));

  auto kill = [&](std::size_t killer, std::size_t victim) {
    const double room = std::max(0.0, ctx.cap - w.energy[killer]);
    const double taken = std::min(w.energy[victim], room);
    tally.dissipated += w.energy[victim] - taken;
    w.energy[killer] += taken;
    w.energy[victim] = 0.0;
    clear_cell(w, victim);
    ctx.actions.silence(victim);
    ++tally.kills;
  };
  if (w.alive[a] && w.alive[b]) {
    if (pull_a >= ctx.kill_threshold) {
      kill(a, b);
      return;
    }
    if (pull_b >= ctx.kill_threshold) {
      kill(b, a);
      return;
    }
  }

  const double net = pull_a - pull_b;
  if (net == 0.0) return;
  const std::size_t donor = net > 0.0 ? b : a;
  const std::size_t recipient = net > 0.0 ? a : b;
  const double base = stock_base(ctx, pull_a, pull_b, w.energy[a], w.energy[b], w.energy[donor]);
  double amount = ctx.rate * std::abs(net) * base;
  const double floor = w.alive[donor] ? ctx.floor_alive : 0.0;
  amount = std::min(amount, std::max(0.0, w.energy[donor] - floor));
  amount = std::min(amount, std::max(0.0, ctx.cap - w.energy[recipient]));
  w.energy[donor] -= amount;
  w.energy[recipient] += amount;
}

}  // namespace

FlowResult resolve_energy_flows(World& world, ActionBuffers& actions, ThreadPool& pool) {
  const std::size_t side = world.side();
  const WorldConfig& cfg = world.config;
  FlowResult result;

  result.cost = reduce_rows<double>(side, pool, [&](std::size_t row, double& paid) {
    for (std::size_t cell = row * side; cell < (row + 1) * side; ++cell) {
      if (!world.alive[cell]) continue;
      double push = 0.0;
      for (std::size_t d = 0; d < 4; ++d) push += std::abs(actions.energy_flow[cell * 4 + d]);
      paid += pay_protected(world.energy[cell], cfg.flow_cost * push, cfg.death_threshold);
    }
  });

  const EdgeContext ctx{world,
                        actions,
                        cfg.energy_flow_rate,
                        cfg.kill_threshold,
                        cfg.energy_max,
                        cfg.death_threshold,
                        cfg.push_own_stock};
  // Each row (then each column) is an independent chain of edges.
  const EnergyTally across = reduce_rows<EnergyTally>(side, pool, [&](std::size_t row, EnergyTally& t) {
    for (std::size_t col = 0; col < side; ++col) {
      energy_edge(ctx, row * side + col, row * side + (col + 1) % side, Direction::Right, t);
    }
  });
  const EnergyTally down = reduce_rows<EnergyTally>(side, pool, [&](std::size_t col, EnergyTally& t) {
    for (std::size_t row = 0; row < side; ++row) {
      energy_edge(ctx, row * side + col, ((row + 1) % side) * side + col, Direction::Down, t);
    }
  });
  result.dissipated = across.dissipated + down.dissipated;
  result.kills = across.kills + down.kills;
  return result;
}

namespace {

void chemical_edge(World& w, const ActionBuffers& actions, double rate, bool own_stock,
                   std::size_t a, std::size_t b, Direction d) {
  auto chem_a = w.chem_of(a);
  auto chem_b = w.chem_of(b);
  for (std::size_t c = 0; c < chem_a.size(); ++c) {
    const double pull_a = actions.chem_action(a, c, d);
    const double pull_b = actions.chem_action(b, c, opposite(d));
    const double net = pull_a - pull_b;
    if (net == 0.0) continue;
    double& donor = net > 0.0 ? chem_b[c] : chem_a[c];
    double& recipient = net > 0.0 ? chem_a[c] : chem_b[c];
    double base = donor;
    if (own_stock) base = std::abs(pull_a) >= std::abs(pull_b) ? chem_a[c] : chem_b[c];
    const double amount = std::min(rate * std::abs(net) * base, donor);
    donor -= amount;
    recipient += amount;
  }
}

}  // namespace

FlowResult resolve_chemical_flows(World& world, const ActionBuffers& actions, ThreadPool& pool) {
  const std::size_t side = world.side();
  const WorldConfig& cfg = world.config;
  const std::size_t per_cell = 4 * world.chemicals();
  FlowResult result;

  result.cost = reduce_rows<double>(side, pool, [&](std::size_t row, double& paid) {
    for (std::size_t cell = row * side; cell < (row + 1) * side; ++cell) {
      if (!world.alive[cell]) continue;
      const double* flows = actions.chem_flow.data() + cell * per_cell;
      double push = 0.0;
      for (std::size_t k = 0; k < per_cell; ++k) push += std::abs(flows[k]);
      paid += pay_protected(world.energy[cell], cfg.flow_cost * push, cfg.death_threshold);
    }
  });

  pool.for_each(side, [&](std::size_t row) {
    for (std::size_t col = 0; col < side; ++col) {
      chemical_edge(world, actions, cfg.chem_flow_rate, cfg.push_own_stock, row * side + col,
                    row * side + (col + 1) % side, Direction::Right);
    }
  });
  pool.for_each(side, [&](std::size_t col) {
    for (std::size_t row = 0; row < side; ++row) {
      chemical_edge(world, actions, cfg.chem_flow_rate, cfg.push_own_stock, row * side + col,
                    ((row + 1) % side) * side + col, Direction::Down);
    }
  });
  return result;
}

void diffuse_chemicals(World& world, ThreadPool& pool) {
  const std::size_t side = world.side();
  const std::size_t n_c = world.chemicals();
  const double rate = world.config.diffusion_rate;
  const std::vector<double> before = world.chem;
  pool.for_each(side, [&](std::size_t row) {
    const std::size_t up = (row + side - 1) % side;
    const std::size_t down = (row + 1) % side;
    for (std::size_t col = 0; col < side; ++col) {
      const std::size_t left = (col + side - 1) % side;
      const std::size_t right = (col + 1) % side;
      const std::size_t cell = row * side + col;
      for (std::size_t c = 0; c < n_c; ++c) {
        const double around = before[(row * side + left) * n_c + c] +
                              before[(row * side + right) * n_c + c] +
                              before[(up * side + col) * n_c + c] +
                              before[(down * side + col) * n_c + c];
        world.chem[cell * n_c + c] = (1.0 - rate) * before[cell * n_c + c] + rate * 0.25 * around;
      }
    }
  });
}

std::size_t apply_death_and_aging(World& world, ThreadPool& pool) {
  const std::size_t side = world.side();
  const double threshold = world.config.death_threshold;
  const std::int64_t lifetime = world.config.max_lifetime;
  return reduce_rows<std::size_t>(side, pool, [&](std::size_t row, std::size_t& deaths) {
    for (std::size_t cell = row * side; cell < (row + 1) * side; ++cell) {
      if (!world.alive[cell]) continue;
      ++world.age[cell];
      if (world.energy[cell] < threshold || world.age[cell] > lifetime) {
        clear_cell(world, cell);
        ++deaths;
      }
    }
  });
}

}  // namespace simm
