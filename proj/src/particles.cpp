#include "simm/particles.hpp"

#include <algorithm>
#include <cmath>

#include "simm/neural.hpp"
#include "simm/parallel.hpp"
#include "simm/rng.hpp"

namespace simm {

double pure_energy_regen(std::span<double> energy, double rate, double cap) {
  double added = 0.0;
  for (double& e : energy) {
    if (e >= cap) continue;
    const double next = std::min(e + rate, cap);
    added += next - e;
    e = next;
  }
  return added;
}

void init_particles(World& world, ThreadPool& pool) {
  const WorldConfig& cfg = world.config;
  const ParticleLayout& g = world.particle_layout;
  ParticleState& p = world.particles;
  p.count = static_cast<std::size_t>(cfg.particle_count);
  p.x.assign(p.count, 0.0);
  p.y.assign(p.count, 0.0);
  p.energy.assign(p.count, cfg.particle_energy_init);
  p.genome.assign(p.count * g.size, 0.0);
  p.hidden.assign(p.count * g.hidden, 0.0);
  const double side = static_cast<double>(cfg.side);
  pool.for_each(p.count, [&](std::size_t i) {
    auto rng = substream(cfg.seed, 0, Phase::ParticleInit, i);
    p.x[i] = wrap_coordinate(rng.uniform() * side, side);
    p.y[i] = wrap_coordinate(rng.uniform() * side, side);
    fill_gaussian(std::span<double>(p.genome.data() + i * g.size, g.size), cfg.init_std, rng);
  });
}

double wrap_coordinate(double v, double side) {
  double r = std::fmod(v, side);
  if (r < 0.0) r += side;
  // fmod of a tiny negative can round back up to exactly `side`.
  if (r >= side) r = 0.0;
  return r;
}

double torus_distance_sq(double x0, double y0, double x1, double y1, double side) {
  double dx = std::abs(x0 - x1);
  double dy = std::abs(y0 - y1);
  dx = std::min(dx, side - dx);
  dy = std::min(dy, side - dy);
  return dx * dx + dy * dy;
}

SpatialHash::SpatialHash(double side, double radius)
    : side_(side),
      radius_(radius),
      buckets_(std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(side / radius)))),
      bucket_size_(side / static_cast<double>(buckets_)),
      grid_(buckets_ * buckets_) {}

std::size_t SpatialHash::bucket_of(double coord) const {
  return std::min(buckets_ - 1, static_cast<std::size_t>(coord / bucket_size_));
}

void SpatialHash::rebuild(std::span<const double> x, std::span<const double> y) {
  for (auto& b : grid_) b.clear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    grid_[bucket_of(y[i]) * buckets_ + bucket_of(x[i])].push_back(i);
  }
}

void SpatialHash::neighbors(std::size_t self, std::span<const double> x, std::span<const double> y,
                            std::vector<std::size_t>& out) const {
  out.clear();
  const std::size_t bx = bucket_of(x[self]);
  const std::size_t by = bucket_of(y[self]);
  const std::size_t reach = std::min<std::size_t>(3, buckets_);
  std::size_t cols[3];
  std::size_t rows[3];
  for (std::size_t k = 0; k < reach; ++k) {
    cols[k] = (bx + buckets_ - 1 + k) % buckets_;
    rows[k] = (by + buckets_ - 1 + k) % buckets_;
  }
  const double r2 = radius_ * radius_;
  for (std::size_t kr = 0; kr < reach; ++kr) {
    for (std::size_t kc = 0; kc < reach; ++kc) {
      for (std::size_t j : grid_[rows[kr] * buckets_ + cols[kc]]) {
        if (j == self) continue;
        if (torus_distance_sq(x[self], y[self], x[j], y[j], side_) <= r2) out.push_back(j);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

namespace {

// hidden-major projection: out[a] = sum_r M[r * d + a] * h[r]
void project(const double* matrix, const double* h, std::size_t hidden, std::size_t d,
             double* out) {
  std::fill_n(out, d, 0.0);
  for (std::size_t r = 0; r < hidden; ++r) {
    const double hr = h[r];
    const double* row = matrix + r * d;
    for (std::size_t a = 0; a < d; ++a) out[a] += row[a] * hr;
  }
}

struct Projections {
  std::size_t d = 0;
  std::vector<double> query;
  std::vector<double> key;
  std::vector<double> value;
};

void attend(const Projections& proj, std::size_t self, std::span<const std::size_t> neighbors,
            std::span<double> out, std::vector<double>* weights) {
  std::ranges::fill(out, 0.0);
  if (weights) weights->clear();
  if (neighbors.empty()) return;
  const std::size_t d = proj.d;
  const double* q = proj.query.data() + self * d;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> score(neighbors.size());
  double top = -INFINITY;
  for (std::size_t n = 0; n < neighbors.size(); ++n) {
    const double* k = proj.key.data() + neighbors[n] * d;
    double dot = 0.0;
    for (std::size_t a = 0; a < d; ++a) dot += q[a] * k[a];
    score[n] = dot * scale;
    top = std::max(top, score[n]);
  }
  double total = 0.0;
  for (double& s : score) {
    s = std::exp(s - top);
    total += s;
  }
  for (std::size_t n = 0; n < neighbors.size(); ++n) {
    const double w = score[n] / total;
    const double* v = proj.value.data() + neighbors[n] * d;
    for (std::size_t a = 0; a < d; ++a) out[a] += w * v[a];
    if (weights) weights->push_back(w);
  }
}

Projections compute_projections(const World& world, std::span<const std::size_t> which,
                                ThreadPool* pool) {
  const ParticleLayout& g = world.particle_layout;
  const ParticleState& p = world.particles;
  Projections proj;
  proj.d = g.attention;
  proj.query.assign(p.count * g.attention, 0.0);
  proj.key.assign(p.count * g.attention, 0.0);
  proj.value.assign(p.count * g.attention, 0.0);
  auto fill = [&](std::size_t i) {
    const double* genome = p.genome.data() + i * g.size;
    const double* h = p.hidden.data() + i * g.hidden;
    project(genome + g.query, h, g.hidden, g.attention, proj.query.data() + i * g.attention);
    project(genome + g.key, h, g.hidden, g.attention, proj.key.data() + i * g.attention);
    project(genome + g.value, h, g.hidden, g.attention, proj.value.data() + i * g.attention);
  };
  if (pool) {
    pool->for_each(p.count, fill);
  } else {
    for (std::size_t i : which) fill(i);
  }
  return proj;
}

}  // namespace

void particle_attention_read(const World& world, std::size_t self,
                             std::span<const std::size_t> neighbors, std::span<double> out,
                             std::vector<double>* weights) {
  std::vector<std::size_t> involved(neighbors.begin(), neighbors.end());
  involved.push_back(self);
  const Projections proj = compute_projections(world, involved, nullptr);
  attend(proj, self, neighbors, out, weights);
}

ParticleStepResult particle_step(World& world, ParticleActions& actions, ThreadPool& pool) {
  const WorldConfig& cfg = world.config;
  const ParticleLayout& g = world.particle_layout;
  ParticleState& p = world.particles;
  const double side = static_cast<double>(cfg.side);
  ParticleStepResult result;

  SpatialHash hash(side, cfg.particle_radius);
  hash.rebuild(p.x, p.y);
  const Projections proj = compute_projections(world, {}, &pool);

  std::vector<double> vx(p.count);
  std::vector<double> vy(p.count);
  actions.copy_intent.assign(p.count, 0);
  pool.for_each_range(p.count, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> near;
    std::vector<double> x(g.attention);
    std::vector<double> pre(g.hidden);
    double act[ParticleLayout::kActions];
    for (std::size_t i = begin; i < end; ++i) {
      hash.neighbors(i, p.x, p.y, near);
      attend(proj, i, near, x, nullptr);
      const double* genome = p.genome.data() + i * g.size;
      double* h = p.hidden.data() + i * g.hidden;
      std::copy_n(genome + g.hidden_bias, g.hidden, pre.data());
      for (std::size_t j = 0; j < g.attention; ++j) {
        const double* col = genome + g.input_weights + j * g.hidden;
        for (std::size_t r = 0; r < g.hidden; ++r) pre[r] += col[r] * x[j];
      }
      for (std::size_t k = 0; k < g.hidden; ++k) {
        const double* col = genome + g.recurrent_weights + k * g.hidden;
        for (std::size_t r = 0; r < g.hidden; ++r) pre[r] += col[r] * h[k];
      }
      for (std::size_t r = 0; r < g.hidden; ++r) h[r] = std::tanh(pre[r]);
      std::copy_n(genome + g.action_bias, ParticleLayout::kActions, act);
      for (std::size_t r = 0; r < g.hidden; ++r) {
        const double* col = genome + g.action_weights + r * ParticleLayout::kActions;
        for (std::size_t a = 0; a < ParticleLayout::kActions; ++a) act[a] += col[a] * h[r];
      }
      vx[i] = cfg.particle_max_speed * std::tanh(act[0]);
      vy[i] = cfg.particle_max_speed * std::tanh(act[1]);
      auto rng = substream(cfg.seed, world.step, Phase::ParticleDecode, i);
      const std::span<const double> copy_logits(act + 2, 2);
      const std::size_t pick =
          cfg.copy_argmax ? argmax(copy_logits) : sample_softmax(copy_logits, rng.uniform());
      actions.copy_intent[i] = static_cast<std::uint8_t>(pick == 1);
    }
  });

  pool.for_each(p.count, [&](std::size_t i) {
    p.x[i] = wrap_coordinate(p.x[i] + vx[i], side);
    p.y[i] = wrap_coordinate(p.y[i] + vy[i], side);
  });

  const std::size_t cells = world.side();
  for (std::size_t i = 0; i < p.count; ++i) {
    const auto col = std::min(cells - 1, static_cast<std::size_t>(p.x[i]));
    const auto row = std::min(cells - 1, static_cast<std::size_t>(p.y[i]));
    double& site = world.energy[row * cells + col];
    p.energy[i] += site;
    result.absorbed += site;
    site = 0.0;
  }
  result.regenerated = pure_energy_regen(world.energy, cfg.regen_rate, cfg.regen_cap);
  return result;
}

ParticleCopyResult particle_copy_overwrite(World& world, const ParticleActions& actions,
                                           ThreadPool& pool) {
  (void)pool;
  const WorldConfig& cfg = world.config;
  const ParticleLayout& g = world.particle_layout;
  ParticleState& p = world.particles;
  ParticleCopyResult result;

  SpatialHash hash(static_cast<double>(cfg.side), cfg.particle_radius);
  hash.rebuild(p.x, p.y);
  std::vector<std::uint8_t> overwritten(p.count, 0);
  std::vector<std::size_t> near;
  std::vector<std::size_t> targets;
  const double noise = cfg.evolution_enabled ? cfg.mutation_std : 0.0;

  for (std::size_t i = 0; i < p.count; ++i) {
    if (i >= actions.copy_intent.size() || !actions.copy_intent[i]) continue;
    hash.neighbors(i, p.x, p.y, near);
    if (near.empty()) continue;
    targets.clear();
    if (cfg.copy_all_lower) {
      for (std::size_t j : near) {
        if (p.energy[j] < p.energy[i]) targets.push_back(j);
      }
    } else {
      std::size_t lowest = near.front();
      for (std::size_t j : near) {
        if (p.energy[j] < p.energy[lowest]) lowest = j;
      }
      if (p.energy[lowest] < p.energy[i]) targets.push_back(lowest);
    }
    for (std::size_t j : targets) {
      if (overwritten[j]) continue;
      if (p.energy[i] < cfg.particle_copy_cost) break;
      p.energy[i] -= cfg.particle_copy_cost;
      result.cost += cfg.particle_copy_cost;
      double* child = p.genome.data() + j * g.size;
      const double* parent = p.genome.data() + i * g.size;
      std::copy_n(parent, g.size, child);
      if (noise > 0.0) {
        auto rng = substream(cfg.seed, world.step, Phase::ParticleCopy, j);
        rng.add_normal({child, g.size}, noise);
      }
      std::fill_n(p.hidden.data() + j * g.hidden, g.hidden, 0.0);
      overwritten[j] = 1;
      ++result.copies;
    }
  }
  return result;
}

}  // namespace simm
