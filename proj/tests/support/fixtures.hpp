#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "simm/engine.hpp"

namespace simm::testing {

/// A lattice with no live cells: fields at their initial values, genomes zero.
inline World blank_world(WorldConfig config) {
  config.init_alive_fraction = 0.0;
  ThreadPool pool(1);
  return init_world(config, pool);
}

/// Marks `cell` alive with a zero genome and the given energy.
inline void place_cell(World& world, std::size_t cell, double energy) {
  world.alive[cell] = 1;
  world.age[cell] = 0;
  world.energy[cell] = energy;
}

inline ActionBuffers idle_actions(const World& world) {
  ActionBuffers a;
  a.resize(world.layout, world.cells());
  return a;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("simm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace simm::testing
