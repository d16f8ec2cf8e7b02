#pragma once

// Synthetic placed netlists with a planted congestion map.
//
// Nets are grown around drivers drawn from a smooth intensity field, with
// members taken from the driver's spatial neighborhood, so cells in busy
// regions have both high clique degree and busy graph neighbors. The planted
// grid value is the summed clique degree of the cells in each grid cell plus
// Gaussian noise.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netcong/netlist_io.hpp"

namespace netcong {

struct SyntheticSpec {
  std::size_t n_cells = 3000;
  std::size_t n_nets = 0;          // 0 picks n_cells
  std::size_t max_net_size = 10;   // sizes drawn from 2..max_net_size
  double board_w = 1000.0;
  double board_h = 1000.0;
  std::uint32_t grid_x = 0;        // 0 picks about 12 cells per grid cell
  std::uint32_t grid_y = 0;
  std::uint32_t n_layers = 6;
  std::size_t n_bumps = 8;
  double noise = 0.2;              // in units of the planted signal's std
  double terminal_fraction = 0.01;
  double macro_fraction = 0.002;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticDesign {
  Netlist netlist;
  Placement placement;
  CongestionMap congestion;
  std::vector<double> planted;  // [gy][gx], before layer synthesis
};

SyntheticDesign synthesize(const SyntheticSpec& spec);

/// Writes <dir>/<name>.nodes, .nets, .pl and .congmap.
void write_design(const SyntheticDesign& d, const std::filesystem::path& dir, const std::string& name);

}  // namespace netcong
