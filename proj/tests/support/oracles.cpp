#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace simm::oracle {

namespace {

constexpr Direction kOrder[4] = {Direction::Right, Direction::Up, Direction::Left, Direction::Down};

std::size_t wrap(long v, std::size_t side) {
  const long s = static_cast<long>(side);
  return static_cast<std::size_t>(((v % s) + s) % s);
}

double debit(double& energy, double amount, double floor) {
  const double room = energy > floor ? energy - floor : 0.0;
  const double paid = amount < room ? amount : room;
  energy -= paid;
  return paid;
}

void erase(World& w, std::size_t cell) {
  for (std::size_t k = 0; k < w.layout.size; ++k) w.genome[cell * w.layout.size + k] = 0.0;
  for (std::size_t k = 0; k < w.layout.hidden; ++k) w.hidden[cell * w.layout.hidden + k] = 0.0;
  w.age[cell] = 0;
  w.alive[cell] = 0;
}

}  // namespace

void shift(SignalState& signals) {
  const std::size_t side = signals.side();
  const std::size_t width = signals.width();
  const SignalState before = signals;
  for (Direction d : kOrder) {
    long dr = 0;
    long dc = 0;
    if (d == Direction::Right) dc = 1;
    if (d == Direction::Left) dc = -1;
    if (d == Direction::Up) dr = -1;
    if (d == Direction::Down) dr = 1;
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        const std::size_t to = wrap(static_cast<long>(r) + dr, side) * side +
                               wrap(static_cast<long>(c) + dc, side);
        for (std::size_t k = 0; k < width; ++k) {
          signals.at(d, to)[k] = before.at(d, r * side + c)[k];
        }
      }
    }
  }
}

std::vector<double> input_of(const SignalState& signals, std::size_t cell) {
  std::vector<double> x;
  const std::size_t cells = signals.side() * signals.side();
  for (std::size_t layer = 0; layer < 4; ++layer) {
    for (std::size_t k = 0; k < signals.width(); ++k) {
      x.push_back(signals.raw()[(layer * cells + cell) * signals.width() + k]);
    }
  }
  return x;
}

std::vector<double> rnn_cell(const World& world, std::size_t cell, std::vector<double>& h) {
  const GenomeLayout& g = world.layout;
  const double* w = world.genome.data() + cell * g.size;
  const std::vector<double> x = input_of(world.signals, cell);
  const std::vector<double> h_prev = h;
  for (std::size_t r = 0; r < g.hidden; ++r) {
    double s = w[g.hidden_bias + r];
    for (std::size_t j = 0; j < g.inputs; ++j) s += w[g.input_weights + j * g.hidden + r] * x[j];
    for (std::size_t k = 0; k < g.hidden; ++k) {
      s += w[g.recurrent_weights + k * g.hidden + r] * h_prev[k];
    }
    h[r] = std::tanh(s);
  }
  std::vector<double> a(g.actions);
  for (std::size_t i = 0; i < g.actions; ++i) {
    double s = w[g.action_bias + i];
    for (std::size_t r = 0; r < g.hidden; ++r) s += w[g.action_weights + r * g.actions + i] * h[r];
    a[i] = s;
  }
  return a;
}

void rnn(World& world, std::vector<double>& raw) {
  const GenomeLayout& g = world.layout;
  raw.assign(world.cells() * g.actions, 0.0);
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    if (!world.alive[cell]) continue;
    std::vector<double> h(world.hidden.begin() + static_cast<long>(cell * g.hidden),
                          world.hidden.begin() + static_cast<long>((cell + 1) * g.hidden));
    const std::vector<double> a = rnn_cell(world, cell, h);
    std::copy(h.begin(), h.end(), world.hidden.begin() + static_cast<long>(cell * g.hidden));
    std::copy(a.begin(), a.end(), raw.begin() + static_cast<long>(cell * g.actions));
  }
}

FlowTotals energy_flows(World& world, ActionBuffers& actions) {
  const WorldConfig& cfg = world.config;
  const std::size_t side = world.side();
  FlowTotals t;
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    if (!world.alive[cell]) continue;
    double push = 0.0;
    for (int d = 0; d < 4; ++d) push += std::fabs(actions.energy_flow[cell * 4 + d]);
    t.cost += debit(world.energy[cell], cfg.flow_cost * push, cfg.death_threshold);
  }

  auto edge = [&](std::size_t a, std::size_t b, int d_ab, int d_ba) {
    const double pa = actions.energy_flow[a * 4 + d_ab];
    const double pb = actions.energy_flow[b * 4 + d_ba];
    auto kill = [&](std::size_t winner, std::size_t loser) {
      double gain = world.energy[loser];
      if (world.energy[winner] + gain > cfg.energy_max) {
        const double fits = std::max(0.0, cfg.energy_max - world.energy[winner]);
        t.dissipated += gain - fits;
        gain = fits;
      }
      world.energy[winner] += gain;
      world.energy[loser] = 0.0;
      erase(world, loser);
      actions.silence(loser);
      ++t.kills;
    };
    if (world.alive[a] && world.alive[b] && pa >= cfg.kill_threshold) return kill(a, b);
    if (world.alive[a] && world.alive[b] && pb >= cfg.kill_threshold) return kill(b, a);
    const double net = pa - pb;
    if (net == 0.0) return;
    const std::size_t from = net > 0.0 ? b : a;
    const std::size_t to = net > 0.0 ? a : b;
    double stock = world.energy[from];
    if (cfg.push_own_stock) stock = std::fabs(pa) >= std::fabs(pb) ? world.energy[a] : world.energy[b];
    double move = cfg.energy_flow_rate * std::fabs(net) * stock;
    const double keep = world.alive[from] ? cfg.death_threshold : 0.0;
    if (move > world.energy[from] - keep) move = std::max(0.0, world.energy[from] - keep);
    if (move > cfg.energy_max - world.energy[to]) move = std::max(0.0, cfg.energy_max - world.energy[to]);
    world.energy[from] -= move;
    world.energy[to] += move;
  };

  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) edge(r * side + c, r * side + (c + 1) % side, 0, 2);
  }
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) edge(r * side + c, ((r + 1) % side) * side + c, 3, 1);
  }
  return t;
}

FlowTotals chemical_flows(World& world, const ActionBuffers& actions) {
  const WorldConfig& cfg = world.config;
  const std::size_t side = world.side();
  const std::size_t n = world.chemicals();
  FlowTotals t;
  auto act = [&](std::size_t cell, std::size_t c, int d) {
    return actions.chem_flow[cell * 4 * n + 4 * c + static_cast<std::size_t>(d)];
  };
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    if (!world.alive[cell]) continue;
    double push = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      for (int d = 0; d < 4; ++d) push += std::fabs(act(cell, c, d));
    }
    t.cost += debit(world.energy[cell], cfg.flow_cost * push, cfg.death_threshold);
  }
  auto edge = [&](std::size_t a, std::size_t b, int d_ab, int d_ba) {
    for (std::size_t c = 0; c < n; ++c) {
      const double pa = act(a, c, d_ab);
      const double pb = act(b, c, d_ba);
      const double net = pa - pb;
      if (net == 0.0) continue;
      double& ca = world.chem[a * n + c];
      double& cb = world.chem[b * n + c];
      double& from = net > 0.0 ? cb : ca;
      double& to = net > 0.0 ? ca : cb;
      double stock = from;
      if (cfg.push_own_stock) stock = std::fabs(pa) >= std::fabs(pb) ? ca : cb;
      double move = cfg.chem_flow_rate * std::fabs(net) * stock;
      if (move > from) move = from;
      from -= move;
      to += move;
    }
  };
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) edge(r * side + c, r * side + (c + 1) % side, 0, 2);
  }
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) edge(r * side + c, ((r + 1) % side) * side + c, 3, 1);
  }
  return t;
}

std::size_t count_alive(const World& world) {
  std::size_t n = 0;
  for (std::size_t cell = 0; cell < world.alive.size(); ++cell) {
    if (world.alive[cell] != 0) ++n;
  }
  return n;
}

std::size_t reawaken_spawn(double floor_fraction, std::size_t cells, std::size_t alive) {
  // Smallest k with k / cells >= floor_fraction, by integer search.
  std::size_t need = 0;
  while (static_cast<double>(need) < floor_fraction * static_cast<double>(cells) - 1e-9) ++need;
  return alive >= need ? 0 : need - alive;
}

double regen_closed_form(double rate, double cap, std::size_t steps) {
  return std::min(rate * static_cast<double>(steps), cap);
}

double chem_mass(const World& world) {
  long double total = 0.0L;
  for (double c : world.chem) total += c;
  return static_cast<double>(total);
}

double energy_mass(const World& world) {
  long double total = 0.0L;
  for (double e : world.energy) total += e;
  for (double e : world.particles.energy) total += e;
  return static_cast<double>(total);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

WorldConfig small_config(int side, std::uint64_t seed) {
  WorldConfig c;
  c.side = side;
  c.hidden_size = 8;
  c.chemical_count = 3;
  c.broadcast_hidden = 3;
  c.seed = seed;
  return c;
}

}  // namespace simm::oracle
