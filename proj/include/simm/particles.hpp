#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simm/world.hpp"

namespace simm {

class ThreadPool;

/// Raises every location toward `cap` by `rate`; locations at or above the
/// cap are left alone. Returns the total energy added.
double pure_energy_regen(std::span<double> energy, double rate, double cap);

/// Places `n_particles` elements uniformly on the torus with Gaussian genomes,
/// zero activations and `particle_e_init` energy.
void init_particles(World& world, ThreadPool& pool);

/// Uniform bucket grid over the torus with buckets at least `radius` wide.
/// Neighbour queries return indices in increasing order.
class SpatialHash {
 public:
  SpatialHash(double side, double radius);

  void rebuild(std::span<const double> x, std::span<const double> y);
  /// Particles within `radius` (toroidal distance) of particle `self`,
  /// excluding it, sorted by index.
  void neighbors(std::size_t self, std::span<const double> x, std::span<const double> y,
                 std::vector<std::size_t>& out) const;

 private:
  std::size_t bucket_of(double coord) const;

  double side_;
  double radius_;
  std::size_t buckets_;
  double bucket_size_;
  std::vector<std::vector<std::size_t>> grid_;
};

double torus_distance_sq(double x0, double y0, double x1, double y1, double side);

/// Wraps a coordinate into [0, side).
double wrap_coordinate(double v, double side);

/// Attention read for particle `self`: softmax over neighbours of
/// (Q h_self . K h_j) / sqrt(d_a), applied to V h_j. Zero with no
/// neighbours. `weights` receives the attention weights when non-null.
void particle_attention_read(const World& world, std::size_t self,
                             std::span<const std::size_t> neighbors, std::span<double> out,
                             std::vector<double>* weights = nullptr);

/// Per-step scratch of the particle variant.
struct ParticleActions {
  std::vector<std::uint8_t> copy_intent;
};

struct ParticleStepResult {
  double absorbed = 0.0;
  double regenerated = 0.0;
};

/// Attention, recurrent update, velocity action, toroidal motion, absorption
/// of the background energy at the new grid cell (particle-index order), then
/// background regeneration.
ParticleStepResult particle_step(World& world, ParticleActions& actions, ThreadPool& pool);

struct ParticleCopyResult {
  std::size_t copies = 0;
  double cost = 0.0;
};

/// Particles with a copy intent overwrite a lower-energy neighbour's genome
/// with a mutated copy of their own (the lowest-energy neighbour, or every
/// lower one with `copy_all_lower`). Lower indices copy first and each target
/// is overwritten at most once per step.
ParticleCopyResult particle_copy_overwrite(World& world, const ParticleActions& actions,
                                           ThreadPool& pool);

}  // namespace simm
