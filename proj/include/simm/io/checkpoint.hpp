#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "simm/world.hpp"

namespace simm {

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Binary checkpoint layout (all integers and floats little-endian):
///
///   "SIMM"                      magic
///   u16                         format version
///   u32 + bytes                 effective config text
///   u64                         step
///   u32 x 3                     tracked genome coordinates
///   for each state array, in a fixed order:
///     u64 element count, then raw elements (f64, i64 or u8)
///   u64                         FNV-1a 64 checksum of every preceding byte
///
/// Array order: genome, hidden, age, alive, energy, chem, enzyme, signals,
/// particle x, particle y, particle energy, particle genome, particle hidden.
std::vector<std::uint8_t> encode_checkpoint(const World& world);
World decode_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Atomic write: the file appears complete or not at all.
void save_checkpoint(const World& world, const std::string& path);
World load_checkpoint(const std::string& path);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view bytes);

}  // namespace simm
