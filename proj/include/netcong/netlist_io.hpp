#pragma once

// Netlist data model and the text/binary formats the toolkit reads and
// writes: Bookshelf .nodes/.nets/.pl, CONGMAP v1 congestion maps and the
// EMB v1 embedding cache.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netcong/matrix.hpp"

namespace netcong {

enum class CellKind { standard, terminal, macro };

struct Cell {
  std::string name;
  double width = 0.0;
  double height = 0.0;
  std::uint32_t pin_count = 0;
  CellKind kind = CellKind::standard;

  bool operator==(const Cell&) const = default;
};

struct Net {
  std::string name;
  std::vector<std::string> members;  // distinct cell names, first-seen order

  bool operator==(const Net&) const = default;
};

struct Netlist {
  std::string name;
  std::vector<Cell> cells;
  std::vector<Net> nets;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

class Placement {
 public:
  /// Inserts or fails with a duplicate error.
  void add(std::string name, Point p);
  const Point* find(std::string_view name) const;
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Point>& points() const { return points_; }

 private:
  std::vector<std::string> names_;
  std::vector<Point> points_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct CongestionMap {
  std::uint32_t nx = 1;
  std::uint32_t ny = 1;
  double cell_w = 1.0;
  double cell_h = 1.0;
  std::uint32_t n_layers = 1;
  std::vector<double> values;  // [layer][gy][gx]

  double& at(std::uint32_t layer, std::uint32_t gy, std::uint32_t gx) {
    return values[(std::size_t{layer} * ny + gy) * nx + gx];
  }
  double at(std::uint32_t layer, std::uint32_t gy, std::uint32_t gx) const {
    return values[(std::size_t{layer} * ny + gy) * nx + gx];
  }
  bool operator==(const CongestionMap&) const = default;
};

// Bookshelf readers. Comment lines ('#') and the "UCLA ..." banner are
// skipped; structural problems raise ParseError with the line number.
std::vector<Cell> parse_nodes(std::string_view text);
/// Parses nets against `cells`, incrementing pin_count once per pin record.
std::vector<Net> parse_nets(std::string_view text, std::vector<Cell>& cells);
Placement parse_placement(std::string_view text);

std::string write_nodes(const std::vector<Cell>& cells);
std::string write_nets(const std::vector<Net>& nets);
std::string write_placement(const Placement& placement);

CongestionMap parse_congestion_map(std::string_view text);
std::string write_congestion_map(const CongestionMap& map);
void validate(const CongestionMap& map);

/// Checks name uniqueness and that every net member names a cell.
void validate(const Netlist& netlist);

/// Reclassifies standard cells taller than `height_factor` times the most
/// common cell height as macros. A factor <= 0 disables the rule.
void classify_macros(std::vector<Cell>& cells, double height_factor);

/// Loads <base>.nodes and <base>.nets.
Netlist load_netlist(const std::filesystem::path& base, double macro_height_factor);

// EMB v1: "NCEMB1", u32 rows, u32 dim, rows*dim f32 (row-major), then one
// length-prefixed UTF-8 name per row.
struct EmbeddingFile {
  std::vector<std::string> names;
  Matrix values;  // each entry exactly representable as float
};

std::string encode_embedding(const EmbeddingFile& emb);
EmbeddingFile decode_embedding(std::string_view bytes);

}  // namespace netcong
