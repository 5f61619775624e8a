#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "simm/engine.hpp"
#include "simm/errors.hpp"
#include "simm/io/checkpoint.hpp"
#include "simm/io/config_io.hpp"
#include "simm/io/metrics_csv.hpp"
#include "simm/io/render.hpp"

namespace simm {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void request_stop(int) { g_stop.store(true); }

struct OutputOptions {
  std::uint64_t steps = 0;
  std::string out_dir;
  std::uint64_t frames_every = 100;
  std::uint64_t checkpoint_every = 0;
  std::size_t threads = 1;
};

std::string numbered(const std::string& dir, const char* pattern, std::uint64_t step,
                     std::string_view suffix = {}) {
  char name[64];
  std::snprintf(name, sizeof name, pattern, static_cast<unsigned long long>(step));
  return (std::filesystem::path(dir) / (std::string(name) + std::string(suffix))).string();
}

std::vector<FrameMode> frame_modes(const World& world) {
  if (world.config.variant == Variant::Particles) return {FrameMode::WeightsRgb, FrameMode::EnergyGray};
  if (world.config.variant == Variant::PureEnergy) return {FrameMode::WeightsRgb, FrameMode::EnergyGray};
  return {FrameMode::WeightsRgb, FrameMode::ChemRgb};
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int execute(World world, const OutputOptions& opt, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path root(opt.out_dir);
  const std::string frames = (root / "frames").string();
  const std::string checkpoints = (root / "checkpoints").string();
  std::error_code ec;
  fs::create_directories(frames, ec);
  if (!ec) fs::create_directories(checkpoints, ec);
  if (ec) throw IoError("cannot create output directory '" + opt.out_dir + "': " + ec.message());

  write_file_atomic((root / "config.effective").string(), format_config(world.config));
  MetricsWriter metrics((root / "metrics.csv").string(), world.chemicals());

  RunOptions run_opt;
  run_opt.steps = opt.steps;
  run_opt.workers = opt.threads;
  run_opt.frames_every = opt.frames_every;
  run_opt.checkpoint_every = opt.checkpoint_every;

  RunCallbacks cb;
  std::uint64_t flushed_at = world.step;
  cb.on_metrics = [&](const World& w, const MetricsRecord& m) {
    metrics.append(m);
    if (w.step - flushed_at >= 100) {
      metrics.flush();
      flushed_at = w.step;
    }
  };
  cb.on_frame = [&](const World& w) {
    for (FrameMode mode : frame_modes(w)) {
      const Image img = render_frame(w, FrameSpec::for_world(w, mode));
      write_png(img, numbered(frames, "step_%08llu_", w.step, frame_mode_name(mode)) + ".png");
    }
  };
  cb.on_checkpoint = [&](const World& w) {
    save_checkpoint(w, numbered(checkpoints, "step_%08llu", w.step, ".simm"));
  };
  cb.stop = &g_stop;

  auto prev_int = std::signal(SIGINT, request_stop);
  auto prev_term = std::signal(SIGTERM, request_stop);
  RunResult result;
  try {
    result = run_from(std::move(world), run_opt, cb);
  } catch (...) {
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    throw;
  }
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  metrics.flush();

  out << "step " << result.world.step << " hash " << hex(world_hash(result.world))
      << (result.interrupted ? " (interrupted)" : "") << '\n';
  return 0;
}

void add_output_options(CLI::App* cmd, OutputOptions& opt) {
  cmd->add_option("--steps", opt.steps, "Steps to run")->required();
  cmd->add_option("--out", opt.out_dir, "Output directory")->required();
  cmd->add_option("--frames-every", opt.frames_every, "Frame cadence in steps (0 disables)");
  cmd->add_option("--checkpoint-every", opt.checkpoint_every,
                  "Checkpoint cadence in steps (0: final checkpoint only)");
  cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid simulator of self-organizing neural matter"};
  app.require_subcommand(1);

  OutputOptions run_opt;
  std::string config_path;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Start a new run from a config file");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--seed", seed, "64-bit seed")->required();
  add_output_options(run_cmd, run_opt);

  OutputOptions resume_opt;
  std::string resume_path;
  auto* resume_cmd = app.add_subcommand("resume", "Continue a run from a checkpoint");
  resume_cmd->add_option("--checkpoint", resume_path, "Checkpoint file")->required();
  add_output_options(resume_cmd, resume_opt);

  std::string render_path;
  std::string render_mode;
  std::string render_out;
  auto* render_cmd = app.add_subcommand("render", "Render a checkpoint to PNG");
  render_cmd->add_option("--checkpoint", render_path, "Checkpoint file")->required();
  render_cmd->add_option("--mode", render_mode, "weights-rgb | chem-rgb | energy-gray | alive-mask")
      ->required()
      ->check(CLI::IsMember({"weights-rgb", "chem-rgb", "energy-gray", "alive-mask"}));
  render_cmd->add_option("--out", render_out, "Output PNG path")->required();

  std::string hash_path;
  auto* hash_cmd = app.add_subcommand("hash", "Print the state digest of a checkpoint");
  hash_cmd->add_option("--checkpoint", hash_path, "Checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*run_cmd) {
      WorldConfig config = load_config_file(config_path);
      config.seed = seed;
      ThreadPool pool(run_opt.threads);
      return execute(init_world(config, pool), run_opt, out);
    }
    if (*resume_cmd) return execute(load_checkpoint(resume_path), resume_opt, out);
    if (*render_cmd) {
      const World world = load_checkpoint(render_path);
      const FrameMode mode = *parse_frame_mode(render_mode);
      write_png(render_frame(world, FrameSpec::for_world(world, mode)), render_out);
      return 0;
    }
    if (*hash_cmd) {
      out << hex(world_hash(load_checkpoint(hash_path))) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace simm
