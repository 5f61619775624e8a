#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simm/world.hpp"

namespace simm {

enum class FrameMode { WeightsRgb, ChemRgb, EnergyGray, AliveMask };

std::string_view frame_mode_name(FrameMode mode);
std::optional<FrameMode> parse_frame_mode(std::string_view name);

/// What to draw and the value window mapped onto [0, 255].
struct FrameSpec {
  FrameMode mode = FrameMode::WeightsRgb;
  std::array<std::uint32_t, 3> weights{};
  double lo = -1.0;
  double hi = 1.0;

  /// Window and tracked coordinates a run uses for `mode`: the configured
  /// frame window for weights, [0, 2 * chem_init] for chemicals (at least
  /// [0, 1]), [0, e_max] for energy.
  static FrameSpec for_world(const World& world, FrameMode mode);
};

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::array<std::uint8_t, 3> pixel(std::size_t row, std::size_t col) const {
    const std::size_t o = (row * width + col) * 3;
    return {rgb[o], rgb[o + 1], rgb[o + 2]};
  }
};

/// clamp(round(255 * (v - lo) / (hi - lo)), 0, 255)
std::uint8_t to_channel(double value, double lo, double hi);

/// side x side RGB image of the world. Dead cells render black in weight
/// frames. Particle worlds draw each particle at its grid cell in index
/// order over a black background (energy frames show the background field).
Image render_frame(const World& world, const FrameSpec& spec);

/// 8-bit RGB PNG, written atomically.
void write_png(const Image& image, const std::string& path);

}  // namespace simm
