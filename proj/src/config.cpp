#include "netcong/config.hpp"

#include <functional>
#include <map>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

namespace fs = std::filesystem;

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  train.seed = mix_seed(s, 1);
  synth.seed = mix_seed(s, 2);
}

void RunConfig::validate() const {
  pmi.validate();
  arch.validate();
  train.validate();
  baseline.validate();
  synth.validate();
  if (target_size == 0) raise(ErrorKind::validation, "target_size must be positive");
  if (max_net_degree < 2) raise(ErrorKind::validation, "max_net_degree must be at least 2");
  if (arch.embed_dim > 0 && arch.embed_dim != pmi.dim)
    raise(ErrorKind::validation, "model embedding width differs from the PMI dimension");
  if (bench_epochs == 0) raise(ErrorKind::validation, "bench_epochs must be positive");
}

void RunConfig::check_inputs() const {
  auto check = [](const fs::path& base) {
    for (const char* ext : {".nodes", ".nets", ".pl", ".congmap"}) {
      fs::path p = base;
      p += ext;
      if (!fs::exists(p)) raise(ErrorKind::io, "missing input file " + p.string());
    }
  };
  for (const auto& p : train_designs) check(p);
  if (!validation_design.empty()) check(validation_design);
  for (const auto& p : test_designs) check(p);
}

namespace {

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view, const fs::path&)> set;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view v) {
  raise(ErrorKind::validation, "bad value '" + std::string(v) + "' for " + std::string(key));
}

double to_double(std::string_view key, std::string_view v) {
  auto d = parse_double(v);
  if (!d) bad_value(key, v);
  return *d;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  auto i = parse_int(v);
  if (!i || *i < 0) bad_value(key, v);
  return static_cast<std::uint64_t>(*i);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  bad_value(key, v);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_same_v<T, fs::path>) out += x.string();
    else if constexpr (std::is_floating_point_v<T>) out += format_double(x);
    else out += std::to_string(x);
  }
  return out;
}

std::vector<std::string_view> list(std::string_view v) {
  std::vector<std::string_view> out;
  if (trim(v).empty()) return out;
  for (auto p : split_char(v, ',')) out.push_back(trim(p));
  return out;
}

fs::path resolve(std::string_view v, const fs::path& base) {
  fs::path p{std::string(v)};
  return p.is_relative() && !base.empty() ? base / p : p;
}

const std::map<std::string, Field, std::less<>>& fields() {
  using C = RunConfig;
  using P = const fs::path&;
  auto num = [](auto member) {
    return Field{[member](const C& c) { return format_double(std::invoke(member, const_cast<C&>(c))); },
                 [member](C& c, std::string_view v, P) { std::invoke(member, c) = to_double("value", v); }};
  };
  auto uint = [](auto member) {
    return Field{[member](const C& c) { return std::to_string(std::invoke(member, const_cast<C&>(c))); },
                 [member](C& c, std::string_view v, P) {
                   std::invoke(member, c) = static_cast<std::remove_reference_t<decltype(std::invoke(member, c))>>(to_uint("value", v));
                 }};
  };
  auto flag = [](auto member) {
    return Field{[member](const C& c) { return std::string(std::invoke(member, const_cast<C&>(c)) ? "1" : "0"); },
                 [member](C& c, std::string_view v, P) { std::invoke(member, c) = to_bool("value", v); }};
  };
  static const std::map<std::string, Field, std::less<>> table = {
      {"train_designs",
       {[](const C& c) { return join(c.train_designs); },
        [](C& c, std::string_view v, P b) {
          c.train_designs.clear();
          for (auto x : list(v)) c.train_designs.push_back(resolve(x, b));
        }}},
      {"validation_design",
       {[](const C& c) { return c.validation_design.string(); },
        [](C& c, std::string_view v, P b) { c.validation_design = v.empty() ? fs::path{} : resolve(v, b); }}},
      {"test_designs",
       {[](const C& c) { return join(c.test_designs); },
        [](C& c, std::string_view v, P b) {
          c.test_designs.clear();
          for (auto x : list(v)) c.test_designs.push_back(resolve(x, b));
        }}},
      {"cache_dir",
       {[](const C& c) { return c.cache_dir.string(); }, [](C& c, std::string_view v, P b) { c.cache_dir = resolve(v, b); }}},
      {"out_dir",
       {[](const C& c) { return c.out_dir.string(); }, [](C& c, std::string_view v, P b) { c.out_dir = resolve(v, b); }}},
      {"max_net_degree", uint([](C& c) -> std::size_t& { return c.max_net_degree; })},
      {"macro_height_factor", num([](C& c) -> double& { return c.macro_height_factor; })},
      {"label_mode",
       {[](const C& c) { return std::string(c.label_mode == LabelMode::raw ? "raw" : "average"); },
        [](C& c, std::string_view v, P) {
          if (v == "raw") c.label_mode = LabelMode::raw;
          else if (v == "average") c.label_mode = LabelMode::average;
          else bad_value("label_mode", v);
        }}},
      {"layer_mode",
       {[](const C& c) { return std::string(c.layer_mode == LayerMode::lower_half ? "lower_half" : "overall"); },
        [](C& c, std::string_view v, P) {
          if (v == "lower_half") c.layer_mode = LayerMode::lower_half;
          else if (v == "overall") c.layer_mode = LayerMode::overall;
          else bad_value("layer_mode", v);
        }}},
      {"target_size", uint([](C& c) -> std::size_t& { return c.target_size; })},
      {"pmi.T", num([](C& c) -> double& { return c.pmi.T; })},
      {"pmi.L", num([](C& c) -> double& { return c.pmi.L; })},
      {"pmi.H", num([](C& c) -> double& { return c.pmi.H; })},
      {"pmi.dim", uint([](C& c) -> std::size_t& { return c.pmi.dim; })},
      {"eigen.tol", num([](C& c) -> double& { return c.pmi.eigen.tol; })},
      {"eigen.block", uint([](C& c) -> std::size_t& { return c.pmi.eigen.block; })},
      {"eigen.seed", uint([](C& c) -> std::uint64_t& { return c.pmi.eigen.seed; })},
      {"model.embed_dim", uint([](C& c) -> std::size_t& { return c.arch.embed_dim; })},
      {"model.constant_attributes", flag([](C& c) -> bool& { return c.arch.constant_attributes; })},
      {"model.sage_hidden",
       {[](const C& c) { return join(c.arch.sage_hidden); },
        [](C& c, std::string_view v, P) {
          c.arch.sage_hidden.clear();
          for (auto x : list(v)) c.arch.sage_hidden.push_back(to_uint("model.sage_hidden", x));
        }}},
      {"model.mlp_hidden",
       {[](const C& c) { return join(c.arch.mlp_hidden); },
        [](C& c, std::string_view v, P) {
          c.arch.mlp_hidden.clear();
          for (auto x : list(v)) c.arch.mlp_hidden.push_back(to_uint("model.mlp_hidden", x));
        }}},
      {"model.activation",
       {[](const C& c) { return std::string(c.arch.activation == Activation::relu ? "relu" : "tanh"); },
        [](C& c, std::string_view v, P) {
          if (v == "relu") c.arch.activation = Activation::relu;
          else if (v == "tanh") c.arch.activation = Activation::tanh;
          else bad_value("model.activation", v);
        }}},
      {"train.lr", num([](C& c) -> double& { return c.train.lr; })},
      {"train.beta1", num([](C& c) -> double& { return c.train.beta1; })},
      {"train.beta2", num([](C& c) -> double& { return c.train.beta2; })},
      {"train.eps", num([](C& c) -> double& { return c.train.eps; })},
      {"train.epochs", uint([](C& c) -> std::size_t& { return c.train.epochs; })},
      {"train.full_batch", flag([](C& c) -> bool& { return c.train.full_batch; })},
      {"baseline.k_range",
       {[](const C& c) { return join(c.baseline.k_range); },
        [](C& c, std::string_view v, P) {
          c.baseline.k_range.clear();
          for (auto x : list(v)) c.baseline.k_range.push_back(static_cast<int>(to_uint("baseline.k_range", x)));
        }}},
      {"baseline.rent_exponents",
       {[](const C& c) { return join(c.baseline.rent_exponents); },
        [](C& c, std::string_view v, P) {
          c.baseline.rent_exponents.clear();
          for (auto x : list(v)) c.baseline.rent_exponents.push_back(to_double("baseline.rent_exponents", x));
        }}},
      {"baseline.gtl_radius",
       {[](const C& c) { return std::to_string(c.baseline.gtl_radius); },
        [](C& c, std::string_view v, P) { c.baseline.gtl_radius = static_cast<int>(to_uint("baseline.gtl_radius", v)); }}},
      {"baseline.adhesion_cap", uint([](C& c) -> std::size_t& { return c.baseline.adhesion_cap; })},
      {"synth.n_cells", uint([](C& c) -> std::size_t& { return c.synth.n_cells; })},
      {"synth.n_nets", uint([](C& c) -> std::size_t& { return c.synth.n_nets; })},
      {"synth.max_net_size", uint([](C& c) -> std::size_t& { return c.synth.max_net_size; })},
      {"synth.board_w", num([](C& c) -> double& { return c.synth.board_w; })},
      {"synth.board_h", num([](C& c) -> double& { return c.synth.board_h; })},
      {"synth.grid_x", uint([](C& c) -> std::uint32_t& { return c.synth.grid_x; })},
      {"synth.grid_y", uint([](C& c) -> std::uint32_t& { return c.synth.grid_y; })},
      {"synth.n_layers", uint([](C& c) -> std::uint32_t& { return c.synth.n_layers; })},
      {"synth.n_bumps", uint([](C& c) -> std::size_t& { return c.synth.n_bumps; })},
      {"synth.noise", num([](C& c) -> double& { return c.synth.noise; })},
      {"synth.terminal_fraction", num([](C& c) -> double& { return c.synth.terminal_fraction; })},
      {"synth.macro_fraction", num([](C& c) -> double& { return c.synth.macro_fraction; })},
      {"synth.count", uint([](C& c) -> std::size_t& { return c.synth_count; })},
      {"bench.cells", uint([](C& c) -> std::size_t& { return c.bench_cells; })},
      {"bench.epochs", uint([](C& c) -> std::size_t& { return c.bench_epochs; })},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
  RunConfig cfg;
  cfg.apply_seed(cfg.seed);
  bool seed_set = false;
  std::uint64_t seed = cfg.seed;
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t lineno = 0;
  for (auto raw : split_lines(text)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "seed") {
      seed = to_uint("seed", value);
      seed_set = true;
      continue;
    }
    if (!fields().count(key)) throw ParseError(lineno, "unknown key '" + std::string(key) + "'");
    entries.emplace_back(std::string(key), std::string(value));
  }
  // The seed is applied first so explicit sub-seeds in the file win.
  if (seed_set) cfg.apply_seed(seed);
  for (const auto& [k, v] : entries) {
    // Relative paths inside the file are anchored at the file's directory.
    try {
      fields().find(k)->second.set(cfg, v, base_dir);
    } catch (const Error& e) {
      raise(ErrorKind::validation, k + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string write_config(const RunConfig& cfg) {
  std::string out = "seed = " + std::to_string(cfg.seed) + "\n";
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace netcong
