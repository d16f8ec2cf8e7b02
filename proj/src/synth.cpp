#include "netcong/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

void SyntheticSpec::validate() const {
  if (max_net_size < 2 || max_net_size > 10) raise(ErrorKind::invalid_input, "net sizes must lie in 2..10");
  if (!(board_w > 0.0) || !(board_h > 0.0)) raise(ErrorKind::invalid_input, "board dimensions must be positive");
  if (n_layers < 2) raise(ErrorKind::invalid_input, "need at least two layers");
  if (!(noise >= 0.0)) raise(ErrorKind::invalid_input, "noise must be non-negative");
  if (!(terminal_fraction >= 0.0 && terminal_fraction < 1.0) || !(macro_fraction >= 0.0 && macro_fraction < 1.0))
    raise(ErrorKind::invalid_input, "cell fractions must lie in [0, 1)");
}

namespace {

struct Bump {
  double x, y, sigma, amp;
};

std::uint32_t auto_grid(std::size_t n) {
  return std::max<std::uint32_t>(4, static_cast<std::uint32_t>(std::lround(std::sqrt(n / 12.0))));
}

double clamp01(double v, double hi) { return std::clamp(v, 0.0, std::nextafter(hi, 0.0)); }

}  // namespace

SyntheticDesign synthesize(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = spec.n_cells;
  const double W = spec.board_w, H = spec.board_h;

  SyntheticDesign d;
  d.netlist.name = "synth" + std::to_string(spec.seed);
  auto& cells = d.netlist.cells;
  std::vector<Point> pos(n);
  const auto n_term = static_cast<std::size_t>(std::floor(spec.terminal_fraction * n));
  const auto n_macro = static_cast<std::size_t>(std::floor(spec.macro_fraction * n));
  for (std::size_t i = 0; i < n; ++i) {
    Cell c;
    if (i < n_term) {
      c.name = "p" + std::to_string(i);
      c.kind = CellKind::terminal;
      c.width = c.height = 1.0;
      // Pads sit on the board boundary.
      double t = unit(rng) * 2.0 * (W + H);
      if (t < W) pos[i] = {t, 0.0};
      else if (t < 2 * W) pos[i] = {t - W, H - 1e-6 * H};
      else if (t < 2 * W + H) pos[i] = {0.0, t - 2 * W};
      else pos[i] = {W - 1e-6 * W, t - 2 * W - H};
    } else {
      c.name = "c" + std::to_string(i - n_term);
      bool macro = i < n_term + n_macro;
      c.kind = macro ? CellKind::macro : CellKind::standard;
      c.width = macro ? 16.0 : static_cast<double>(1 + rng() % 4);
      c.height = macro ? 16.0 : 1.0;
      pos[i] = {unit(rng) * W, unit(rng) * H};
    }
    cells.push_back(std::move(c));
  }

  std::vector<Bump> bumps;
  for (std::size_t b = 0; b < spec.n_bumps; ++b) {
    double s = (0.06 + 0.1 * unit(rng)) * std::min(W, H);
    bumps.push_back({unit(rng) * W, unit(rng) * H, s, 1.0 + 3.0 * unit(rng)});
  }
  auto intensity = [&](Point p) {
    double v = 0.15;
    for (const auto& b : bumps) {
      double dx = p.x - b.x, dy = p.y - b.y;
      v += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
    }
    return v;
  };

  // Spatial bins sized so a 3x3 block holds about 30 cells.
  const double density = n > 0 ? static_cast<double>(n) / (W * H) : 1.0;
  const double bin = std::sqrt(30.0 / (9.0 * density));
  const auto bx = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(W / bin)));
  const auto by = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(H / bin)));
  std::vector<std::vector<std::uint32_t>> bins(bx * by);
  auto bin_of = [&](Point p) {
    auto ix = std::min(bx - 1, static_cast<std::size_t>(p.x / bin));
    auto iy = std::min(by - 1, static_cast<std::size_t>(p.y / bin));
    return std::pair{ix, iy};
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto [ix, iy] = bin_of(pos[i]);
    bins[iy * bx + ix].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<double> cum(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += intensity(pos[i]);
    cum[i] = acc;
  }

  const std::size_t n_nets = n == 0 ? 0 : (spec.n_nets > 0 ? spec.n_nets : n);
  std::vector<std::uint32_t> local;
  for (std::size_t k = 0; k < n_nets; ++k) {
    auto drv = static_cast<std::uint32_t>(std::upper_bound(cum.begin(), cum.end(), unit(rng) * acc) - cum.begin());
    drv = std::min<std::uint32_t>(drv, static_cast<std::uint32_t>(n - 1));
    std::size_t size = 2;
    while (size < spec.max_net_size && unit(rng) < 0.55) ++size;
    local.clear();
    auto [ix, iy] = bin_of(pos[drv]);
    for (std::size_t y = iy > 0 ? iy - 1 : 0; y <= std::min(by - 1, iy + 1); ++y)
      for (std::size_t x = ix > 0 ? ix - 1 : 0; x <= std::min(bx - 1, ix + 1); ++x)
        for (auto c : bins[y * bx + x])
          if (c != drv) local.push_back(c);
    Net net;
    net.name = "n" + std::to_string(k);
    net.members.push_back(cells[drv].name);
    ++cells[drv].pin_count;
    for (std::size_t j = 0; j + 1 < size && !local.empty(); ++j) {
      std::size_t pick = rng() % local.size();
      std::uint32_t c = local[pick];
      local[pick] = local.back();
      local.pop_back();
      net.members.push_back(cells[c].name);
      ++cells[c].pin_count;
    }
    d.netlist.nets.push_back(std::move(net));
  }
  for (std::size_t i = 0; i < n; ++i) d.placement.add(cells[i].name, pos[i]);

  // Clique-degree proxy per standard cell, restricted like the graph builder.
  std::unordered_map<std::string_view, std::uint32_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(cells[i].name, static_cast<std::uint32_t>(i));
  std::vector<double> proxy(n, 0.0);
  for (const auto& net : d.netlist.nets) {
    std::size_t std_members = 0;
    for (const auto& m : net.members) std_members += cells[index.at(m)].kind == CellKind::standard;
    if (std_members < 2 || std_members > 10) continue;
    for (const auto& m : net.members) {
      auto i = index.at(m);
      if (cells[i].kind == CellKind::standard) proxy[i] += static_cast<double>(std_members - 1);
    }
  }

  auto& map = d.congestion;
  map.nx = spec.grid_x > 0 ? spec.grid_x : auto_grid(n);
  map.ny = spec.grid_y > 0 ? spec.grid_y : auto_grid(n);
  map.cell_w = W / map.nx;
  map.cell_h = H / map.ny;
  map.n_layers = spec.n_layers;
  const std::size_t ncell = std::size_t{map.nx} * map.ny;
  std::vector<double> signal(ncell, 0.0);
  auto cell_of = [&](Point p) {
    auto gx = static_cast<std::size_t>(clamp01(p.x, W) / map.cell_w);
    auto gy = static_cast<std::size_t>(clamp01(p.y, H) / map.cell_h);
    return std::min<std::size_t>(gy, map.ny - 1) * map.nx + std::min<std::size_t>(gx, map.nx - 1);
  };
  for (std::size_t i = 0; i < n; ++i)
    if (cells[i].kind == CellKind::standard) signal[cell_of(pos[i])] += proxy[i];

  double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(ncell);
  double var = 0.0;
  for (double s : signal) var += (s - mean) * (s - mean);
  double sd = std::sqrt(var / static_cast<double>(ncell));
  std::normal_distribution<double> gauss(0.0, 1.0);
  d.planted.resize(ncell);
  for (std::size_t c = 0; c < ncell; ++c) {
    double z = sd > 0.0 ? (signal[c] - mean) / sd : 0.0;
    d.planted[c] = z + spec.noise * gauss(rng);
  }
  double lo = ncell ? *std::min_element(d.planted.begin(), d.planted.end()) : 0.0;
  for (double& v : d.planted) v -= lo;

  // Layer 0 is unrelated noise; the lower half carries the planted signal at
  // decreasing strength; the upper layers carry a smooth board-wide trend
  // that only reaches the overall reduction.
  const std::uint32_t half = map.n_layers / 2;
  double peak = ncell ? *std::max_element(d.planted.begin(), d.planted.end()) : 0.0;
  map.values.assign(std::size_t{map.n_layers} * ncell, 0.0);
  double phase = unit(rng) * 6.283185307179586;
  for (std::uint32_t l = 0; l < map.n_layers; ++l) {
    for (std::uint32_t gy = 0; gy < map.ny; ++gy) {
      for (std::uint32_t gx = 0; gx < map.nx; ++gx) {
        std::size_t c = std::size_t{gy} * map.nx + gx;
        double v;
        if (l == 0) {
          v = 10.0 * unit(rng);
        } else if (l <= half) {
          v = d.planted[c] * (1.0 - 0.15 * (l - 1));
        } else {
          double u = (gx + 0.5) / map.nx, w = (gy + 0.5) / map.ny;
          v = peak * (0.45 + 0.4 * std::sin(3.0 * u + 2.0 * w + phase));
        }
        map.at(l, gy, gx) = std::max(0.0, v);
      }
    }
  }
  return d;
}

void write_design(const SyntheticDesign& d, const std::filesystem::path& dir, const std::string& name) {
  auto path = [&](const char* ext) { return dir / (name + ext); };
  write_file_atomic(path(".nodes"), write_nodes(d.netlist.cells));
  write_file_atomic(path(".nets"), write_nets(d.netlist.nets));
  write_file_atomic(path(".pl"), write_placement(d.placement));
  write_file_atomic(path(".congmap"), write_congestion_map(d.congestion));
}

}  // namespace netcong
