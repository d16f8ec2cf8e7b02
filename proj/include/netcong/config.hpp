#pragma once

// Flat "key = value" run configuration. Lines starting with '#' are
// comments; unknown keys are rejected so typos do not pass silently.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "netcong/baselines.hpp"
#include "netcong/embed.hpp"
#include "netcong/gnn.hpp"
#include "netcong/graph_build.hpp"
#include "netcong/synth.hpp"

namespace netcong {

struct RunConfig {
  // Design base paths (<base>.nodes, .nets, .pl, .congmap).
  std::vector<std::filesystem::path> train_designs;
  std::filesystem::path validation_design;
  std::vector<std::filesystem::path> test_designs;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path out_dir = "out";

  std::size_t max_net_degree = 10;
  double macro_height_factor = 4.0;
  LabelMode label_mode = LabelMode::raw;
  LayerMode layer_mode = LayerMode::lower_half;  // training target
  std::size_t target_size = 5000;

  PmiConfig pmi{};
  Architecture arch{};
  TrainConfig train{};
  BaselineConfig baseline{};
  SyntheticSpec synth{};
  std::size_t synth_count = 4;
  std::size_t bench_cells = 50000;
  std::size_t bench_epochs = 2;

  std::uint64_t seed = 1;

  /// Re-derives seeds of the sub-configs from the global seed.
  void apply_seed(std::uint64_t s);
  void validate() const;
  /// Fails unless every referenced design file exists.
  void check_inputs() const;
};

/// Relative design paths are resolved against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string write_config(const RunConfig& cfg);

}  // namespace netcong
