#include "netcong/netlist_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_set>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {
namespace {

bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#' || line.starts_with("UCLA");
}

/// Parses "Key : value" header lines; returns nullopt if `line` is not the
/// header `key`.
std::optional<std::int64_t> header_value(std::string_view line, std::string_view key,
                                         std::size_t lineno) {
  line = trim(line);
  if (!line.starts_with(key)) return std::nullopt;
  auto rest = trim(line.substr(key.size()));
  if (rest.empty() || rest.front() != ':')
    throw ParseError(lineno, "expected ':' after " + std::string(key));
  auto v = parse_int(trim(rest.substr(1)));
  if (!v || *v < 0) throw ParseError(lineno, "bad value for " + std::string(key));
  return v;
}

double parse_length(std::string_view tok, std::size_t lineno, const char* what) {
  auto v = parse_double(tok);
  if (!v || !std::isfinite(*v)) throw ParseError(lineno, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return *v;
}

}  // namespace

void Placement::add(std::string name, Point p) {
  if (index_.contains(name)) raise(ErrorKind::duplicate, "duplicate placement for " + name);
  index_.emplace(name, names_.size());
  names_.push_back(std::move(name));
  points_.push_back(p);
}

const Point* Placement::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &points_[it->second];
}

std::vector<Cell> parse_nodes(std::string_view text) {
  std::vector<Cell> cells;
  std::unordered_set<std::string> seen;
  std::optional<std::int64_t> num_nodes, num_terminals;
  std::size_t num_nodes_line = 0, num_terminals_line = 0;
  std::size_t terminals = 0;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto line = lines[i];
    if (skippable(line)) continue;
    if (auto v = header_value(line, "NumNodes", lineno)) {
      num_nodes = v;
      num_nodes_line = lineno;
      continue;
    }
    if (auto v = header_value(line, "NumTerminals", lineno)) {
      num_terminals = v;
      num_terminals_line = lineno;
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.size() != 3 && tok.size() != 4)
      throw ParseError(lineno, "expected 'name width height [terminal]'");
    Cell c;
    c.name = std::string(tok[0]);
    c.width = parse_length(tok[1], lineno, "width");
    c.height = parse_length(tok[2], lineno, "height");
    if (c.width < 0 || c.height < 0) throw ParseError(lineno, "negative cell dimension");
    if (tok.size() == 4) {
      if (tok[3] != "terminal" && tok[3] != "terminal_NI")
        throw ParseError(lineno, "unknown node keyword '" + std::string(tok[3]) + "'");
      c.kind = CellKind::terminal;
      ++terminals;
    }
    if (!seen.insert(c.name).second)
      raise(ErrorKind::duplicate, "line " + std::to_string(lineno) + ": duplicate cell " + c.name);
    cells.push_back(std::move(c));
  }
  if (num_nodes && static_cast<std::size_t>(*num_nodes) != cells.size())
    throw ParseError(num_nodes_line, "NumNodes " + std::to_string(*num_nodes) + " but " +
                                         std::to_string(cells.size()) + " records");
  if (num_terminals && static_cast<std::size_t>(*num_terminals) != terminals)
    throw ParseError(num_terminals_line, "NumTerminals " + std::to_string(*num_terminals) +
                                             " but " + std::to_string(terminals) + " terminals");
  return cells;
}

std::vector<Net> parse_nets(std::string_view text, std::vector<Cell>& cells) {
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) index.emplace(cells[i].name, i);

  std::vector<Net> nets;
  std::unordered_set<std::string> net_names;
  std::optional<std::int64_t> num_nets, num_pins;
  std::size_t num_nets_line = 0, num_pins_line = 0, pins = 0;
  // Pin increments are applied only after the whole file parses, so a
  // failed parse leaves `cells` untouched.
  std::vector<std::uint32_t> pin_delta(cells.size(), 0);

  const auto lines = split_lines(text);
  std::size_t i = 0;
  auto next_content = [&]() -> std::optional<std::size_t> {
    while (i < lines.size() && skippable(lines[i])) ++i;
    if (i >= lines.size()) return std::nullopt;
    return i++;
  };

  while (auto at = next_content()) {
    const std::size_t lineno = *at + 1;
    const auto line = lines[*at];
    if (auto v = header_value(line, "NumNets", lineno)) {
      num_nets = v;
      num_nets_line = lineno;
      continue;
    }
    if (auto v = header_value(line, "NumPins", lineno)) {
      num_pins = v;
      num_pins_line = lineno;
      continue;
    }
    auto t = trim(line);
    if (!t.starts_with("NetDegree")) throw ParseError(lineno, "expected NetDegree header");
    auto rest = trim(t.substr(9));
    if (rest.empty() || rest.front() != ':') throw ParseError(lineno, "expected ':' after NetDegree");
    auto tok = split_ws(rest.substr(1));
    if (tok.empty() || tok.size() > 2) throw ParseError(lineno, "expected 'NetDegree : d [name]'");
    auto degree = parse_int(tok[0]);
    if (!degree || *degree < 1) throw ParseError(lineno, "net degree must be a positive integer");

    Net net;
    net.name = tok.size() == 2 ? std::string(tok[1]) : "net" + std::to_string(nets.size());
    if (!net_names.insert(net.name).second)
      raise(ErrorKind::duplicate, "line " + std::to_string(lineno) + ": duplicate net " + net.name);

    std::unordered_set<std::size_t> members;
    for (std::int64_t p = 0; p < *degree; ++p) {
      auto pin_at = next_content();
      if (!pin_at)
        throw ParseError(lineno, "net " + net.name + " declares " + std::to_string(*degree) +
                                     " pins but file ends after " + std::to_string(p));
      const std::size_t pin_lineno = *pin_at + 1;
      auto ptok = split_ws(lines[*pin_at]);
      if (!ptok.empty() && (ptok[0] == "NetDegree" || ptok[0].starts_with("NetDegree:")))
        throw ParseError(pin_lineno, "net " + net.name + " declares " + std::to_string(*degree) +
                                         " pins but lists " + std::to_string(p));
      if (ptok.empty()) throw ParseError(pin_lineno, "empty pin record");
      auto it = index.find(ptok[0]);
      if (it == index.end())
        raise(ErrorKind::reference, "line " + std::to_string(pin_lineno) + ": net " + net.name +
                                        " references unknown cell " + std::string(ptok[0]));
      ++pin_delta[it->second];
      ++pins;
      if (members.insert(it->second).second) net.members.push_back(cells[it->second].name);
    }
    nets.push_back(std::move(net));
  }
  if (num_nets && static_cast<std::size_t>(*num_nets) != nets.size())
    throw ParseError(num_nets_line, "NumNets " + std::to_string(*num_nets) + " but " +
                                        std::to_string(nets.size()) + " nets");
  if (num_pins && static_cast<std::size_t>(*num_pins) != pins)
    throw ParseError(num_pins_line, "NumPins " + std::to_string(*num_pins) + " but " +
                                        std::to_string(pins) + " pins");
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c].pin_count += pin_delta[c];
  return nets;
}

Placement parse_placement(std::string_view text) {
  Placement pl;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (skippable(lines[i])) continue;
    auto tok = split_ws(lines[i]);
    if (tok.size() < 3) throw ParseError(lineno, "expected 'name x y [: orientation]'");
    const double x = parse_length(tok[1], lineno, "x coordinate");
    const double y = parse_length(tok[2], lineno, "y coordinate");
    if (tok.size() > 3 && !tok[3].starts_with(":"))
      throw ParseError(lineno, "expected ':' before orientation");
    try {
      pl.add(std::string(tok[0]), {x, y});
    } catch (const Error& e) {
      raise(ErrorKind::duplicate, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pl;
}

std::string write_nodes(const std::vector<Cell>& cells) {
  std::size_t terminals = 0;
  for (const auto& c : cells) terminals += c.kind == CellKind::terminal;
  std::string out = "UCLA nodes 1.0\n\n";
  out += "NumNodes : " + std::to_string(cells.size()) + "\n";
  out += "NumTerminals : " + std::to_string(terminals) + "\n";
  for (const auto& c : cells) {
    out += "\t" + c.name + " " + format_double(c.width) + " " + format_double(c.height);
    if (c.kind == CellKind::terminal) out += " terminal";
    out += "\n";
  }
  return out;
}

std::string write_nets(const std::vector<Net>& nets) {
  std::size_t pins = 0;
  for (const auto& n : nets) pins += n.members.size();
  std::string out = "UCLA nets 1.0\n\n";
  out += "NumNets : " + std::to_string(nets.size()) + "\n";
  out += "NumPins : " + std::to_string(pins) + "\n";
  for (const auto& n : nets) {
    out += "NetDegree : " + std::to_string(n.members.size()) + " " + n.name + "\n";
    for (const auto& m : n.members) out += "\t" + m + " B\n";
  }
  return out;
}

std::string write_placement(const Placement& placement) {
  std::string out = "UCLA pl 1.0\n\n";
  for (std::size_t i = 0; i < placement.size(); ++i) {
    const auto& p = placement.points()[i];
    out += placement.names()[i] + " " + format_double(p.x) + " " + format_double(p.y) + " : N\n";
  }
  return out;
}

void validate(const CongestionMap& map) {
  if (map.nx < 1 || map.ny < 1 || map.n_layers < 1)
    raise(ErrorKind::validation, "congestion map dimensions must be >= 1");
  if (!(map.cell_w > 0) || !(map.cell_h > 0) || !std::isfinite(map.cell_w) ||
      !std::isfinite(map.cell_h))
    raise(ErrorKind::validation, "congestion grid spacing must be positive");
  if (map.values.size() != std::size_t{map.nx} * map.ny * map.n_layers)
    raise(ErrorKind::validation, "congestion value count does not match dimensions");
  for (double v : map.values)
    if (!std::isfinite(v) || v < 0)
      raise(ErrorKind::validation, "congestion values must be finite and >= 0");
}

CongestionMap parse_congestion_map(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ParseError(1, "missing CONGMAP header");
  auto head = split_ws(lines[i]);
  if (head.size() != 7 || head[0] != "CONGMAP" || head[1] != "v1")
    throw ParseError(i + 1, "expected 'CONGMAP v1 nx ny cw ch n_layers'");
  auto nx = parse_int(head[2]), ny = parse_int(head[3]), nl = parse_int(head[6]);
  auto cw = parse_double(head[4]), ch = parse_double(head[5]);
  if (!nx || !ny || !nl || !cw || !ch) throw ParseError(i + 1, "bad CONGMAP header field");
  if (*nx < 1 || *ny < 1 || *nl < 1 || *nx > (1 << 24) || *ny > (1 << 24) || *nl > 1024)
    raise(ErrorKind::validation, "congestion map dimensions out of range");

  CongestionMap map;
  map.nx = static_cast<std::uint32_t>(*nx);
  map.ny = static_cast<std::uint32_t>(*ny);
  map.n_layers = static_cast<std::uint32_t>(*nl);
  map.cell_w = *cw;
  map.cell_h = *ch;
  const std::size_t rows_expected = std::size_t{map.ny} * map.n_layers;
  // Every value takes at least two bytes of text.
  if (rows_expected * map.nx > text.size() / 2 + 1)
    throw ParseError(i + 1, "CONGMAP header declares more values than the file holds");
  map.values.reserve(rows_expected * map.nx);
  std::size_t rows = 0;
  for (++i; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto tok = split_ws(lines[i]);
    if (rows == rows_expected) throw ParseError(i + 1, "more rows than the header declares");
    if (tok.size() != map.nx)
      throw ParseError(i + 1, "expected " + std::to_string(map.nx) + " values, got " +
                                  std::to_string(tok.size()));
    for (auto t : tok) {
      auto v = parse_double(t);
      if (!v) throw ParseError(i + 1, "bad value '" + std::string(t) + "'");
      map.values.push_back(*v);
    }
    ++rows;
  }
  if (rows != rows_expected)
    throw ParseError(lines.size(), "expected " + std::to_string(rows_expected) + " rows, got " +
                                       std::to_string(rows));
  validate(map);
  return map;
}

std::string write_congestion_map(const CongestionMap& map) {
  validate(map);
  std::string out = "CONGMAP v1 " + std::to_string(map.nx) + " " + std::to_string(map.ny) + " " +
                    format_double(map.cell_w) + " " + format_double(map.cell_h) + " " +
                    std::to_string(map.n_layers) + "\n";
  for (std::uint32_t l = 0; l < map.n_layers; ++l) {
    if (l) out += "\n";
    for (std::uint32_t gy = 0; gy < map.ny; ++gy) {
      for (std::uint32_t gx = 0; gx < map.nx; ++gx) {
        if (gx) out += ' ';
        out += format_double(map.at(l, gy, gx));
      }
      out += '\n';
    }
  }
  return out;
}

void validate(const Netlist& netlist) {
  std::unordered_set<std::string_view> cells;
  for (const auto& c : netlist.cells) {
    if (!cells.insert(c.name).second) raise(ErrorKind::duplicate, "duplicate cell " + c.name);
    if (!(c.width >= 0) || !(c.height >= 0))
      raise(ErrorKind::validation, "negative dimension on cell " + c.name);
  }
  std::unordered_set<std::string_view> nets;
  for (const auto& n : netlist.nets) {
    if (!nets.insert(n.name).second) raise(ErrorKind::duplicate, "duplicate net " + n.name);
    if (n.members.empty()) raise(ErrorKind::validation, "net " + n.name + " has no members");
    std::unordered_set<std::string_view> members;
    for (const auto& m : n.members) {
      if (!cells.contains(m))
        raise(ErrorKind::reference, "net " + n.name + " references unknown cell " + m);
      if (!members.insert(m).second)
        raise(ErrorKind::validation, "net " + n.name + " lists " + m + " twice");
    }
  }
}

void classify_macros(std::vector<Cell>& cells, double height_factor) {
  if (height_factor <= 0) return;
  std::map<double, std::size_t> freq;
  for (const auto& c : cells)
    if (c.kind == CellKind::standard) ++freq[c.height];
  if (freq.empty()) return;
  // Most common height; ties resolve to the smaller height.
  auto row = std::max_element(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  const double limit = height_factor * row->first;
  for (auto& c : cells)
    if (c.kind == CellKind::standard && c.height > limit) c.kind = CellKind::macro;
}

Netlist load_netlist(const std::filesystem::path& base, double macro_height_factor) {
  auto with_ext = [&](const char* ext) {
    auto p = base;
    p += ext;
    return p;
  };
  Netlist nl;
  nl.name = base.filename().string();
  nl.cells = parse_nodes(read_file(with_ext(".nodes")));
  nl.nets = parse_nets(read_file(with_ext(".nets")), nl.cells);
  classify_macros(nl.cells, macro_height_factor);
  validate(nl);
  return nl;
}

std::string encode_embedding(const EmbeddingFile& emb) {
  if (emb.names.size() != emb.values.rows)
    raise(ErrorKind::invalid_input, "embedding name table does not match row count");
  ByteWriter w;
  w.put_bytes("NCEMB1");
  w.put_u32(static_cast<std::uint32_t>(emb.values.rows));
  w.put_u32(static_cast<std::uint32_t>(emb.values.cols));
  for (double v : emb.values.data) w.put_f32(static_cast<float>(v));
  for (const auto& n : emb.names) w.put_string(n);
  return w.take();
}

EmbeddingFile decode_embedding(std::string_view bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 6 || r.get_bytes(6) != "NCEMB1")
    raise(ErrorKind::format, "not an EMB v1 file (bad magic)");
  const std::uint32_t rows = r.get_u32();
  const std::uint32_t dim = r.get_u32();
  // Each row carries dim floats and a name with a 4-byte length prefix.
  if (std::uint64_t{rows} * (std::uint64_t{dim} + 1) * 4 > r.remaining())
    raise(ErrorKind::format, "EMB v1 payload shorter than header declares");
  EmbeddingFile emb;
  emb.values = Matrix(rows, dim);
  for (auto& v : emb.values.data) v = r.get_f32();
  emb.names.reserve(rows);
  for (std::uint32_t i = 0; i < rows; ++i) emb.names.push_back(r.get_string());
  r.expect_end();
  return emb;
}

}  // namespace netcong
