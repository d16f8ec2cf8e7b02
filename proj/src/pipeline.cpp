#include "netcong/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"

namespace netcong {

namespace fs = std::filesystem;

namespace {

fs::path with_ext(const fs::path& base, const char* ext) {
  fs::path p = base;
  p += ext;
  return p;
}

std::vector<fs::path> all_designs(const RunConfig& cfg) {
  std::vector<fs::path> out = cfg.train_designs;
  if (!cfg.validation_design.empty()) out.push_back(cfg.validation_design);
  out.insert(out.end(), cfg.test_designs.begin(), cfg.test_designs.end());
  return out;
}

fs::path cache_file(const RunConfig& cfg, const std::string& name, const char* ext) {
  return cfg.cache_dir / (name + ext);
}

Partition partition_for(const CellGraph& g, const RunConfig& cfg) {
  if (g.nodes() == 0) return make_partition({}, 1);
  return kway_partition(g, choose_k(g.nodes(), cfg.target_size), cfg.seed);
}

double mean_epoch_seconds(const TrainResult& r) {
  double s = 0.0;
  for (const auto& h : r.history) s += h.seconds;
  return s / static_cast<double>(r.history.size());
}

}  // namespace

Design prepare_design(std::string name, const Netlist& netlist, const Placement& placement,
                      const CongestionMap& map, const RunConfig& cfg) {
  Design d;
  d.name = std::move(name);
  auto g = std::make_shared<const CellGraph>(build_graph(netlist, cfg.max_net_degree));
  d.graph = g;
  d.lower_half = attach_labels(g, placement, reduce_layers(map, LayerMode::lower_half), cfg.label_mode);
  d.overall = attach_labels(g, placement, reduce_layers(map, LayerMode::overall), cfg.label_mode);
  return d;
}

Design load_design(const fs::path& base, const RunConfig& cfg) {
  Netlist nl = load_netlist(base, cfg.macro_height_factor);
  Placement pl = parse_placement(read_file(with_ext(base, ".pl")));
  CongestionMap map = parse_congestion_map(read_file(with_ext(base, ".congmap")));
  return prepare_design(base.filename().string(), nl, pl, map, cfg);
}

CellGraph load_graph(const fs::path& base, const RunConfig& cfg) {
  return build_graph(load_netlist(base, cfg.macro_height_factor), cfg.max_net_degree);
}

TrainGraph make_train_graph(const Design& d, const RunConfig& cfg, const fs::path& cache) {
  TrainGraph tg;
  tg.labeled = d.target(cfg.layer_mode);
  tg.partition = partition_for(*d.graph, cfg);
  if (cfg.arch.embed_dim > 0) tg.embedding = embed_graph(*d.graph, tg.partition, cfg.pmi, cache);
  return tg;
}

InferenceConfig inference_config(const RunConfig& cfg, const fs::path& cache) {
  InferenceConfig ic;
  ic.target_size = cfg.target_size;
  ic.pmi = cfg.pmi;
  ic.seed = cfg.seed;
  ic.embedding_cache = cache;
  return ic;
}

std::string labels_csv(const Design& d) {
  std::string out = "name,gx,gy,has_label,label_lower_half,label_overall\n";
  const auto& g = *d.graph;
  for (std::size_t v = 0; v < g.nodes(); ++v) {
    const auto& gi = d.lower_half.grid_index[v];
    out += g.names[v];
    out += ',' + std::to_string(gi.gx) + ',' + std::to_string(gi.gy) + ',';
    out += d.lower_half.has_label[v] ? '1' : '0';
    out += ',' + format_double(d.lower_half.labels[v]) + ',' + format_double(d.overall.labels[v]) + '\n';
  }
  return out;
}

LabelTable parse_labels_csv(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != "name,gx,gy,has_label,label_lower_half,label_overall")
    throw ParseError(1, "bad labels header");
  LabelTable t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto f = split_char(lines[i], ',');
    if (f.size() != 6) throw ParseError(i + 1, "expected 6 fields");
    auto gx = parse_int(f[1]), gy = parse_int(f[2]), has = parse_int(f[3]);
    auto lo = parse_double(f[4]), ov = parse_double(f[5]);
    if (!gx || !gy || !has || !lo || !ov || *gx < 0 || *gy < 0 || *gx > UINT32_MAX || *gy > UINT32_MAX ||
        (*has != 0 && *has != 1) || !std::isfinite(*lo) || !std::isfinite(*ov))
      throw ParseError(i + 1, "bad label row");
    t.names.emplace_back(f[0]);
    GridIndex gi{static_cast<std::uint32_t>(*gx), static_cast<std::uint32_t>(*gy)};
    for (auto* lg : {&t.lower_half, &t.overall}) {
      lg->grid_index.push_back(gi);
      lg->has_label.push_back(static_cast<std::uint8_t>(*has));
    }
    t.lower_half.labels.push_back(*lo);
    t.overall.labels.push_back(*ov);
  }
  return t;
}

std::string predictions_csv(std::span<const std::string> names, std::span<const double> values) {
  if (names.size() != values.size()) raise(ErrorKind::invalid_input, "prediction count does not match names");
  std::string out = "name,prediction\n";
  for (std::size_t i = 0; i < names.size(); ++i) out += names[i] + ',' + format_double(values[i]) + '\n';
  return out;
}

NamedValues parse_predictions_csv(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, "missing header");
  auto header = split_char(trim(lines[0]), ',');
  if (header.size() != 2 || header[0] != "name") throw ParseError(1, "bad header");
  NamedValues nv;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto f = split_char(lines[i], ',');
    auto v = f.size() == 2 ? parse_double(trim(f[1])) : std::nullopt;
    if (!v || !std::isfinite(*v)) throw ParseError(i + 1, "expected name,value");
    nv.names.emplace_back(trim(f[0]));
    nv.values.push_back(*v);
  }
  return nv;
}

BenchReport run_bench(const RunConfig& cfg) {
  SyntheticSpec spec = cfg.synth;
  spec.n_cells = cfg.bench_cells;
  spec.seed = mix_seed(cfg.synth.seed, 0xbe4c);
  auto sd = synthesize(spec);
  Design d = prepare_design("bench", sd.netlist, sd.placement, sd.congestion, cfg);
  TrainGraph tg = make_train_graph(d, cfg);

  TrainConfig tc = cfg.train;
  tc.epochs = cfg.bench_epochs;
  BenchReport r;
  r.nodes = d.graph->nodes();
  r.clusters = tg.partition.k;
  tc.full_batch = false;
  r.minibatch_epoch_seconds = mean_epoch_seconds(train({&tg, 1}, nullptr, cfg.arch, tc));
  tc.full_batch = true;
  r.full_batch_epoch_seconds = mean_epoch_seconds(train({&tg, 1}, nullptr, cfg.arch, tc));
  return r;
}

void cmd_ingest(const RunConfig& cfg) {
  cfg.check_inputs();
  for (const auto& base : all_designs(cfg)) {
    Design d = load_design(base, cfg);
    write_file_atomic(cfg.out_dir / (d.name + ".graph"), write_graph_text(*d.graph));
    write_file_atomic(cfg.out_dir / (d.name + ".labels.csv"), labels_csv(d));
  }
}

void cmd_embed(const RunConfig& cfg) {
  cfg.check_inputs();
  for (const auto& base : all_designs(cfg)) {
    CellGraph g = load_graph(base, cfg);
    std::string name = base.filename().string();
    Partition p = partition_for(g, cfg);
    write_file_atomic(cache_file(cfg, name, ".part"), write_partition_text(p));
    embed_graph(g, p, cfg.pmi, cache_file(cfg, name, ".emb"));
  }
}

void cmd_train(const RunConfig& cfg) {
  cfg.check_inputs();
  if (cfg.train_designs.empty()) raise(ErrorKind::validation, "no train_designs configured");
  std::vector<TrainGraph> graphs;
  for (const auto& base : cfg.train_designs) {
    Design d = load_design(base, cfg);
    graphs.push_back(make_train_graph(d, cfg, cache_file(cfg, d.name, ".emb")));
  }
  std::unique_ptr<TrainGraph> val;
  if (!cfg.validation_design.empty()) {
    Design d = load_design(cfg.validation_design, cfg);
    val = std::make_unique<TrainGraph>(make_train_graph(d, cfg, cache_file(cfg, d.name, ".emb")));
  }
  TrainResult r = train(graphs, val.get(), cfg.arch, cfg.train);
  write_file_atomic(cfg.out_dir / "model.bin", encode_model(r.model));
  write_file_atomic(cfg.out_dir / "history.csv", history_csv(r.history));
}

void cmd_predict(const RunConfig& cfg, const fs::path& model, const fs::path& design) {
  Model m = decode_model(read_file(model));
  CellGraph g = load_graph(design, cfg);
  std::string name = design.filename().string();
  auto pred = infer(m, g, inference_config(cfg, cache_file(cfg, name, ".emb")));
  write_file_atomic(cfg.out_dir / (name + ".predictions.csv"), predictions_csv(g.names, pred));
}

MetricsReport cmd_eval(const RunConfig& cfg, const fs::path& predictions, const fs::path& labels) {
  NamedValues pv = parse_predictions_csv(read_file(predictions));
  LabelTable lt = parse_labels_csv(read_file(labels));
  std::unordered_map<std::string_view, double> by_name;
  for (std::size_t i = 0; i < pv.names.size(); ++i)
    if (!by_name.emplace(pv.names[i], pv.values[i]).second)
      raise(ErrorKind::duplicate, "duplicate prediction for " + pv.names[i]);
  std::vector<double> aligned;
  for (const auto& n : lt.names) {
    auto it = by_name.find(n);
    if (it == by_name.end()) raise(ErrorKind::reference, "no prediction for node " + n);
    aligned.push_back(it->second);
  }
  MetricsReport r = evaluate(aligned, lt.lower_half, lt.overall, cfg.seed);
  write_file_atomic(cfg.out_dir / "metrics.txt", report_table(r));
  write_file_atomic(cfg.out_dir / "metrics.csv", report_csv(r));
  return r;
}

void cmd_baseline(const RunConfig& cfg, BaselineKind kind) {
  cfg.check_inputs();
  if (cfg.validation_design.empty()) raise(ErrorKind::validation, "baseline selection needs validation_design");
  Design val = load_design(cfg.validation_design, cfg);
  CvResult cv = cross_validate(kind, val.lower_half, cfg.baseline, cfg.seed);
  std::string tag = to_string(kind);
  write_file_atomic(cfg.out_dir / (tag + ".cv.csv"), cv_report_csv(kind, cv));
  for (const auto& base : cfg.test_designs) {
    Design d = load_design(base, cfg);
    auto scores = baseline_scores(kind, *d.graph, cv.best_param, cfg.baseline);
    write_file_atomic(cfg.out_dir / (d.name + "." + tag + ".scores.csv"), score_csv(*d.graph, scores));
    MetricsReport r = evaluate(scores, d.lower_half, d.overall, cfg.seed);
    write_file_atomic(cfg.out_dir / (d.name + "." + tag + ".metrics.csv"), report_csv(r));
  }
}

void cmd_synth(const RunConfig& cfg) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cfg.synth_count; ++i) {
    SyntheticSpec spec = cfg.synth;
    spec.seed = mix_seed(cfg.synth.seed, i);
    std::string name = "synth" + std::to_string(i);
    write_design(synthesize(spec), cfg.out_dir, name);
    names.push_back(name);
  }
  // A ready-to-use config next to the designs: last design for test, the
  // one before it for validation, the rest for training.
  RunConfig out = cfg;
  out.train_designs.clear();
  out.validation_design.clear();
  out.test_designs.clear();
  out.cache_dir = "cache";
  out.out_dir = "out";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names.size() >= 3 && i + 1 == names.size()) out.test_designs.push_back(names[i]);
    else if (names.size() >= 3 && i + 2 == names.size()) out.validation_design = names[i];
    else out.train_designs.push_back(names[i]);
  }
  std::string conf = write_config(out);
  write_file_atomic(cfg.out_dir / "synth.conf", conf);
}

BenchReport cmd_bench(const RunConfig& cfg) {
  BenchReport r = run_bench(cfg);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "nodes %zu\nclusters %zu\nminibatch_epoch_s %.6f\nfull_batch_epoch_s %.6f\nratio %.4f\n",
                r.nodes, r.clusters, r.minibatch_epoch_seconds, r.full_batch_epoch_seconds, r.ratio());
  write_file_atomic(cfg.out_dir / "bench.txt", buf);
  return r;
}

}  // namespace netcong
