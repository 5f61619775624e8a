#include "simm/io/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "simm/errors.hpp"

namespace simm {

std::string_view frame_mode_name(FrameMode mode) {
  switch (mode) {
    case FrameMode::WeightsRgb: return "weights-rgb";
    case FrameMode::ChemRgb: return "chem-rgb";
    case FrameMode::EnergyGray: return "energy-gray";
    case FrameMode::AliveMask: return "alive-mask";
  }
  return "weights-rgb";
}

std::optional<FrameMode> parse_frame_mode(std::string_view name) {
  for (FrameMode m : {FrameMode::WeightsRgb, FrameMode::ChemRgb, FrameMode::EnergyGray,
                      FrameMode::AliveMask}) {
    if (frame_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

FrameSpec FrameSpec::for_world(const World& world, FrameMode mode) {
  FrameSpec spec;
  spec.mode = mode;
  spec.weights = world.tracked_weights;
  switch (mode) {
    case FrameMode::WeightsRgb:
      spec.lo = world.config.frame_lo;
      spec.hi = world.config.frame_hi;
      break;
    case FrameMode::ChemRgb:
      spec.lo = 0.0;
      spec.hi = std::max(1.0, 2.0 * world.config.chem_init);
      break;
    case FrameMode::EnergyGray:
      spec.lo = 0.0;
      spec.hi = world.config.variant == Variant::Grid ? world.config.energy_max
                                                      : world.config.regen_cap;
      break;
    case FrameMode::AliveMask:
      spec.lo = 0.0;
      spec.hi = 1.0;
      break;
  }
  return spec;
}

std::uint8_t to_channel(double value, double lo, double hi) {
  const double scaled = std::round(255.0 * (value - lo) / (hi - lo));
  if (!(scaled > 0.0)) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<std::uint8_t>(scaled);
}

Image render_frame(const World& world, const FrameSpec& spec) {
  Image img;
  img.width = img.height = world.side();
  img.rgb.assign(img.width * img.height * 3, 0);
  auto put = [&](std::size_t cell, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    img.rgb[cell * 3] = r;
    img.rgb[cell * 3 + 1] = g;
    img.rgb[cell * 3 + 2] = b;
  };
  auto gray = [&](std::size_t cell, double v) {
    const std::uint8_t c = to_channel(v, spec.lo, spec.hi);
    put(cell, c, c, c);
  };

  if (world.config.variant == Variant::Particles) {
    const ParticleState& p = world.particles;
    const std::size_t side = world.side();
    if (spec.mode == FrameMode::EnergyGray) {
      for (std::size_t cell = 0; cell < world.cells(); ++cell) gray(cell, world.energy[cell]);
      return img;
    }
    for (std::size_t i = 0; i < p.count; ++i) {
      const std::size_t cell = std::min(side - 1, static_cast<std::size_t>(p.y[i])) * side +
                               std::min(side - 1, static_cast<std::size_t>(p.x[i]));
      const double* genome = p.genome.data() + i * world.particle_layout.size;
      if (spec.mode == FrameMode::WeightsRgb) {
        put(cell, to_channel(genome[spec.weights[0]], spec.lo, spec.hi),
            to_channel(genome[spec.weights[1]], spec.lo, spec.hi),
            to_channel(genome[spec.weights[2]], spec.lo, spec.hi));
      } else if (spec.mode == FrameMode::AliveMask) {
        put(cell, 255, 255, 255);
      }
    }
    return img;
  }

  const std::size_t n_c = world.chemicals();
  for (std::size_t cell = 0; cell < world.cells(); ++cell) {
    switch (spec.mode) {
      case FrameMode::WeightsRgb: {
        if (!world.alive[cell]) break;
        auto g = world.genome_of(cell);
        put(cell, to_channel(g[spec.weights[0]], spec.lo, spec.hi),
            to_channel(g[spec.weights[1]], spec.lo, spec.hi),
            to_channel(g[spec.weights[2]], spec.lo, spec.hi));
        break;
      }
      case FrameMode::ChemRgb: {
        std::uint8_t c[3] = {0, 0, 0};
        for (std::size_t k = 0; k < std::min<std::size_t>(3, n_c); ++k) {
          c[k] = to_channel(world.chem[cell * n_c + k], spec.lo, spec.hi);
        }
        put(cell, c[0], c[1], c[2]);
        break;
      }
      case FrameMode::EnergyGray:
        gray(cell, world.energy[cell]);
        break;
      case FrameMode::AliveMask:
        if (world.alive[cell]) put(cell, 255, 255, 255);
        break;
    }
  }
  return img;
}

void write_png(const Image& image, const std::string& path) {
  const std::string tmp = path + ".tmp";
  std::FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) throw IoError("cannot write '" + tmp + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng initialisation failed for '" + path + "'");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("PNG encoding failed for '" + path + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t row = 0; row < image.height; ++row) {
    png_write_row(png, image.rgb.data() + row * image.width * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("write failed for '" + tmp + "'");

  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace simm
