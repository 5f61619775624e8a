#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace simm {

/// A non-finite value appeared in the simulation state.
class NumericFault : public std::runtime_error {
 public:
  NumericFault(std::string phase, std::uint64_t step, std::size_t cell)
      : std::runtime_error("non-finite value in phase '" + phase + "' at step " +
                           std::to_string(step) + ", cell " + std::to_string(cell)),
        phase_(std::move(phase)),
        step_(step),
        cell_(cell) {}

  const std::string& phase() const noexcept { return phase_; }
  std::uint64_t step() const noexcept { return step_; }
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::string phase_;
  std::uint64_t step_;
  std::size_t cell_;
};

/// File-system failure while reading or writing an artifact.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simm
