#include "simm/io/config_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "simm/errors.hpp"

namespace simm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

struct Field {
  std::string_view key;
  std::function<bool(WorldConfig&, std::string_view)> parse;
  std::function<std::string(const WorldConfig&)> format;
};

template <typename T>
Field number(std::string_view key, T WorldConfig::*member) {
  return {key,
          [member](WorldConfig& c, std::string_view v) { return parse_number(v, c.*member); },
          [member](const WorldConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field flag(std::string_view key, bool WorldConfig::*member) {
  return {key,
          [member](WorldConfig& c, std::string_view v) {
            if (v == "true" || v == "1") {
              c.*member = true;
            } else if (v == "false" || v == "0") {
              c.*member = false;
            } else {
              return false;
            }
            return true;
          },
          [member](const WorldConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

Field optional_number(std::string_view key, std::optional<double> WorldConfig::*member) {
  return {key,
          [member](WorldConfig& c, std::string_view v) {
            if (v == "auto") {
              (c.*member).reset();
              return true;
            }
            double d = 0.0;
            if (!parse_number(v, d)) return false;
            c.*member = d;
            return true;
          },
          [member](const WorldConfig& c) {
            return (c.*member) ? format_double(*(c.*member)) : std::string("auto");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"variant",
       [](WorldConfig& c, std::string_view v) {
         auto parsed = parse_variant(v);
         if (!parsed) return false;
         c.variant = *parsed;
         return true;
       },
       [](const WorldConfig& c) { return std::string(variant_name(c.variant)); }},
      number("seed", &WorldConfig::seed),
      number("m", &WorldConfig::side),
      number("n_h", &WorldConfig::hidden_size),
      number("n_c", &WorldConfig::chemical_count),
      number("n_sig_h", &WorldConfig::broadcast_hidden),
      number("e_max", &WorldConfig::energy_max),
      number("e_init", &WorldConfig::energy_init),
      number("theta_death", &WorldConfig::death_threshold),
      number("theta_copy", &WorldConfig::copy_threshold),
      number("e_copy", &WorldConfig::copy_energy),
      number("copy_newborn_fraction", &WorldConfig::copy_newborn_fraction),
      number("theta_kill", &WorldConfig::kill_threshold),
      number("kappa_e", &WorldConfig::energy_flow_rate),
      number("kappa_c", &WorldConfig::chem_flow_rate),
      number("kappa_r", &WorldConfig::reaction_rate),
      number("lambda_flow", &WorldConfig::flow_cost),
      number("lambda_enz", &WorldConfig::enzyme_cost),
      number("e_release", &WorldConfig::reaction_energy),
      number("chem_init", &WorldConfig::chem_init),
      optional_number("theta_sig", &WorldConfig::signal_threshold),
      number("sigma_mut", &WorldConfig::mutation_std),
      number("sigma_init", &WorldConfig::init_std),
      flag("evolution_enabled", &WorldConfig::evolution_enabled),
      number("l_max", &WorldConfig::max_lifetime),
      number("p_init", &WorldConfig::init_alive_fraction),
      number("f_min", &WorldConfig::reawaken_floor),
      flag("move_enabled", &WorldConfig::move_enabled),
      optional_number("theta_move", &WorldConfig::move_threshold),
      number("e_move", &WorldConfig::move_cost),
      flag("move_fields", &WorldConfig::move_fields),
      flag("diffusion_enabled", &WorldConfig::diffusion_enabled),
      number("d_chem", &WorldConfig::diffusion_rate),
      flag("copy_argmax", &WorldConfig::copy_argmax),
      flag("fixed_release", &WorldConfig::fixed_release),
      flag("push_own_stock", &WorldConfig::push_own_stock),
      number("regen_rate", &WorldConfig::regen_rate),
      number("e_cap", &WorldConfig::regen_cap),
      number("n_particles", &WorldConfig::particle_count),
      number("particle_radius", &WorldConfig::particle_radius),
      number("d_a", &WorldConfig::attention_size),
      number("v_max", &WorldConfig::particle_max_speed),
      number("e_copy_p", &WorldConfig::particle_copy_cost),
      number("particle_e_init", &WorldConfig::particle_energy_init),
      flag("copy_all_lower", &WorldConfig::copy_all_lower),
      number("frame_lo", &WorldConfig::frame_lo),
      number("frame_hi", &WorldConfig::frame_hi),
  };
  return table;
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

}  // namespace

WorldConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), line_no, "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("(empty)", line_no, "missing key");
    if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
      throw ConfigError(key, line_no, "repeated key (first on line " + std::to_string(it->second) + ")");
    }
    entries.push_back({key, value, line_no});
  }

  WorldConfig config;
  for (const Entry& e : entries) {
    if (e.key != "preset") continue;
    if (e.value != "oscillation") throw ConfigError(e.key, e.line, "unknown preset '" + e.value + "'");
    config = WorldConfig::oscillation_preset();
  }
  for (const Entry& e : entries) {
    if (e.key == "preset") continue;
    const auto& table = fields();
    auto field = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == e.key; });
    if (field == table.end()) throw ConfigError(e.key, e.line, "unknown key");
    if (!field->parse(config, e.value)) {
      throw ConfigError(e.key, e.line, "cannot parse value '" + e.value + "'");
    }
  }

  try {
    config.validate();
  } catch (const ConfigError& err) {
    auto where = seen.find(err.key());
    throw ConfigError(err.key(), where == seen.end() ? 0 : where->second,
                      std::string(err.what()).substr(err.key().size() + 2));
  }
  return config;
}

std::string format_config(const WorldConfig& config) {
  std::ostringstream out;
  out << "# stage order: shift_signals, write_signals, rnn_step, decode_actions, "
         "produce_enzymes, apply_reactions, resolve_flows(energy), resolve_flows(chemicals), "
         "diffuse_chemicals, apply_copy, apply_move, apply_death_and_aging, reawaken\n";
  for (const Field& f : fields()) out << f.key << " = " << f.format(config) << '\n';
  return out.str();
}

WorldConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace simm
