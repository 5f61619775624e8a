#include "simm/config.hpp"

#include <cmath>

namespace simm {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Grid: return "grid";
    case Variant::PureEnergy: return "pure_energy";
    case Variant::Particles: return "particles";
  }
  return "grid";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "grid") return Variant::Grid;
  if (name == "pure_energy") return Variant::PureEnergy;
  if (name == "particles") return Variant::Particles;
  return std::nullopt;
}

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + key + ": " + what
                                  : key + ": " + what),
      key_(std::move(key)),
      line_(line) {}

namespace {

void require(bool ok, const char* key, const char* bound) {
  if (!ok) throw ConfigError(key, 0, std::string("must satisfy ") + bound);
}

void require_rate(double v, const char* key) {
  require(std::isfinite(v) && v >= 0.0, key, ">= 0");
}

}  // namespace

void WorldConfig::validate() const {
  require(side >= 2, "m", "m >= 2");
  require(hidden_size >= 1, "n_h", "n_h >= 1");
  require(chemical_count >= 1, "n_c", "n_c >= 1");
  require(broadcast_hidden >= 0 && broadcast_hidden <= hidden_size, "n_sig_h", "0 <= n_sig_h <= n_h");
  require(std::isfinite(energy_max) && energy_max > 0.0, "e_max", "e_max > 0");
  require_rate(energy_init, "e_init");
  require(energy_init <= energy_max, "e_init", "e_init <= e_max");
  require_rate(death_threshold, "theta_death");
  require_rate(copy_threshold, "theta_copy");
  require_rate(copy_energy, "e_copy");
  require(copy_energy <= copy_threshold, "e_copy", "e_copy <= theta_copy");
  require(copy_newborn_fraction >= 0.0 && copy_newborn_fraction <= 1.0, "copy_newborn_fraction",
          "0 <= copy_newborn_fraction <= 1");
  require_rate(kill_threshold, "theta_kill");
  require_rate(energy_flow_rate, "kappa_e");
  require_rate(chem_flow_rate, "kappa_c");
  require_rate(reaction_rate, "kappa_r");
  require(reaction_rate <= 1.0, "kappa_r", "kappa_r <= 1");
  require_rate(flow_cost, "lambda_flow");
  require_rate(enzyme_cost, "lambda_enz");
  require_rate(reaction_energy, "e_release");
  require_rate(chem_init, "chem_init");
  if (signal_threshold) require_rate(*signal_threshold, "theta_sig");
  require_rate(mutation_std, "sigma_mut");
  require_rate(init_std, "sigma_init");
  require(max_lifetime >= 0, "l_max", "l_max >= 0");
  require(init_alive_fraction >= 0.0 && init_alive_fraction <= 1.0, "p_init", "0 <= p_init <= 1");
  require(reawaken_floor > 0.0 && reawaken_floor < 1.0, "f_min", "0 < f_min < 1");
  if (move_threshold) require_rate(*move_threshold, "theta_move");
  require_rate(move_cost, "e_move");
  require(diffusion_rate >= 0.0 && diffusion_rate <= 1.0, "d_chem", "0 <= d_chem <= 1");
  require_rate(regen_rate, "regen_rate");
  require(std::isfinite(regen_cap) && regen_cap > 0.0, "e_cap", "e_cap > 0");
  require(particle_count >= 1, "n_particles", "n_particles >= 1");
  require(std::isfinite(particle_radius) && particle_radius > 0.0, "particle_radius",
          "particle_radius > 0");
  require(attention_size >= 1, "d_a", "d_a >= 1");
  require_rate(particle_max_speed, "v_max");
  require_rate(particle_copy_cost, "e_copy_p");
  require_rate(particle_energy_init, "particle_e_init");
  require(std::isfinite(frame_lo) && std::isfinite(frame_hi) && frame_lo < frame_hi, "frame_hi",
          "frame_lo < frame_hi");
}

WorldConfig WorldConfig::oscillation_preset() {
  WorldConfig c;
  c.side = 100;
  c.diffusion_enabled = true;
  c.diffusion_rate = 0.5;
  c.evolution_enabled = false;
  return c;
}

}  // namespace simm
