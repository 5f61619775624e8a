#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace simm {

enum class Variant { Grid, PureEnergy, Particles };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

/// Raised for invalid configuration values. `key()` names the offending
/// setting and `line()` is its 1-based line in the source text (0 if the
/// value did not come from a file).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what);

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Every tunable of a run. Defaults are engineering choices; the config text
/// format (see io/config_io.hpp) names each field by its key.
struct WorldConfig {
  Variant variant = Variant::Grid;
  std::uint64_t seed = 0;

  // lattice and network shape
  int side = 100;
  int hidden_size = 16;
  int chemical_count = 4;
  int broadcast_hidden = 4;

  // energy bookkeeping
  double energy_max = 10.0;
  double energy_init = 2.0;
  double death_threshold = 0.1;
  double copy_threshold = 2.0;
  double copy_energy = 1.0;
  /// Fraction of `copy_energy` that reaches the newborn; the rest is a copy cost.
  double copy_newborn_fraction = 1.0;
  double kill_threshold = 0.9;
  double energy_flow_rate = 0.25;
  double chem_flow_rate = 0.25;
  double reaction_rate = 0.1;
  double flow_cost = 0.01;
  double enzyme_cost = 0.01;
  double reaction_energy = 1.0;
  double chem_init = 1.0;
  /// Signals are written by cells whose energy exceeds this; unset means
  /// `death_threshold`.
  std::optional<double> signal_threshold;

  // evolution
  double mutation_std = 0.05;
  double init_std = 0.3;
  bool evolution_enabled = true;
  std::int64_t max_lifetime = 2000;
  double init_alive_fraction = 1.0;
  double reawaken_floor = 0.1;

  // movement
  bool move_enabled = false;
  /// Unset means `copy_threshold / 2`.
  std::optional<double> move_threshold;
  double move_cost = 0.1;
  bool move_fields = true;

  // diffusion
  bool diffusion_enabled = false;
  double diffusion_rate = 0.5;

  // rule variants
  bool copy_argmax = false;
  bool fixed_release = false;
  bool push_own_stock = false;

  // pure-energy grid and particle background
  double regen_rate = 0.05;
  double regen_cap = 10.0;

  // particle variant
  int particle_count = 1600;
  double particle_radius = 10.0;
  int attention_size = 8;
  double particle_max_speed = 1.0;
  double particle_copy_cost = 1.0;
  double particle_energy_init = 1.0;
  bool copy_all_lower = false;

  // rendering window for weight frames
  double frame_lo = -1.0;
  double frame_hi = 1.0;

  double effective_signal_threshold() const {
    return signal_threshold.value_or(death_threshold);
  }
  double effective_move_threshold() const {
    return move_threshold.value_or(copy_threshold / 2.0);
  }

  /// Throws ConfigError naming the first violated bound.
  void validate() const;

  /// Small grid with fast chemical diffusion and frozen weights, used to
  /// study population oscillations.
  static WorldConfig oscillation_preset();

  bool operator==(const WorldConfig&) const = default;
};

}  // namespace simm
