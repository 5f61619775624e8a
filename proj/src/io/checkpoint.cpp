#include "simm/io/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "simm/errors.hpp"
#include "simm/io/config_io.hpp"

namespace simm {

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }

  void array(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) u64(std::bit_cast<std::uint64_t>(x));
  }
  void array(const std::vector<std::int64_t>& v) {
    u64(v.size());
    for (auto x : v) u64(static_cast<std::uint64_t>(x));
  }
  void array(const std::vector<std::uint8_t>& v) {
    u64(v.size());
    out_.insert(out_.end(), v.begin(), v.end());
  }

  std::vector<std::uint8_t>& data() { return out_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw IoError("checkpoint truncated");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t count(std::size_t expected, const char* what) {
    const std::uint64_t n = le(8);
    if (n != expected) {
      throw IoError(std::string("checkpoint array '") + what + "' has " + std::to_string(n) +
                    " elements, expected " + std::to_string(expected));
    }
    return static_cast<std::size_t>(n);
  }
  void array(std::vector<double>& v, std::size_t expected, const char* what) {
    v.resize(count(expected, what));
    need(v.size() * 8);
    for (double& x : v) x = std::bit_cast<double>(le(8));
  }
  void array(std::vector<std::int64_t>& v, std::size_t expected, const char* what) {
    v.resize(count(expected, what));
    need(v.size() * 8);
    for (auto& x : v) x = static_cast<std::int64_t>(le(8));
  }
  void array(std::vector<std::uint8_t>& v, std::size_t expected, const char* what) {
    v.resize(count(expected, what));
    need(v.size());
    std::memcpy(v.data(), data_ + pos_, v.size());
    pos_ += v.size();
  }
  std::size_t position() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const World& world) {
  Writer w;
  w.bytes("SIMM", 4);
  w.u16(kCheckpointVersion);
  const std::string config = format_config(world.config);
  w.u32(static_cast<std::uint32_t>(config.size()));
  w.bytes(config.data(), config.size());
  w.u64(world.step);
  for (auto t : world.tracked_weights) w.u32(t);
  w.array(world.genome);
  w.array(world.hidden);
  w.array(world.age);
  w.array(world.alive);
  w.array(world.energy);
  w.array(world.chem);
  w.array(world.enzyme);
  w.array(world.signals.raw());
  w.array(world.particles.x);
  w.array(world.particles.y);
  w.array(world.particles.energy);
  w.array(world.particles.genome);
  w.array(world.particles.hidden);
  const std::uint64_t checksum = fnv1a64(w.data().data(), w.data().size());
  w.u64(checksum);
  return std::move(w.data());
}

World decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 + 2 + 8 || std::memcmp(bytes.data(), "SIMM", 4) != 0) {
    throw IoError("not a checkpoint (bad magic)");
  }
  const std::size_t payload = bytes.size() - 8;
  Reader tail(bytes.data() + payload, 8);
  if (tail.le(8) != fnv1a64(bytes.data(), payload)) throw IoError("checkpoint checksum mismatch");

  Reader r(bytes.data(), payload);
  r.text(4);
  const auto version = static_cast<std::uint16_t>(r.le(2));
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  World world;
  world.config = parse_config(r.text(static_cast<std::size_t>(r.le(4))));
  world.layout = GenomeLayout::for_config(world.config);
  world.particle_layout = ParticleLayout::for_config(world.config);
  world.step = r.le(8);
  for (auto& t : world.tracked_weights) t = static_cast<std::uint32_t>(r.le(4));

  const bool particles = world.config.variant == Variant::Particles;
  const std::size_t cells = world.cells();
  const std::size_t lattice = particles ? 0 : cells;
  const std::size_t n_c = world.chemicals();
  r.array(world.genome, lattice * world.layout.size, "genome");
  r.array(world.hidden, lattice * world.layout.hidden, "hidden");
  r.array(world.age, lattice, "age");
  r.array(world.alive, lattice, "alive");
  r.array(world.energy, cells, "energy");
  r.array(world.chem, lattice * n_c, "chem");
  r.array(world.enzyme, lattice * n_c, "enzyme");
  if (particles) {
    r.array(world.signals.raw(), 0, "signals");
  } else {
    world.signals = SignalState(world.side(), world.layout.signal);
    r.array(world.signals.raw(), world.signals.raw().size(), "signals");
  }
  const std::size_t n = particles ? static_cast<std::size_t>(world.config.particle_count) : 0;
  world.particles.count = n;
  r.array(world.particles.x, n, "particle x");
  r.array(world.particles.y, n, "particle y");
  r.array(world.particles.energy, n, "particle energy");
  r.array(world.particles.genome, n * world.particle_layout.size, "particle genome");
  r.array(world.particles.hidden, n * world.particle_layout.hidden, "particle hidden");
  if (r.position() != payload) throw IoError("checkpoint has trailing bytes");
  return world;
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void save_checkpoint(const World& world, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(world);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

World load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace simm
