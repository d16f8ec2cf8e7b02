#pragma once

// End-to-end commands behind the CLI.

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netcong/config.hpp"
#include "netcong/eval.hpp"
#include "netcong/gnn.hpp"
#include "netcong/synth.hpp"

namespace netcong {

struct Design {
  std::string name;
  std::shared_ptr<const CellGraph> graph;
  LabeledGraph lower_half;
  LabeledGraph overall;

  const LabeledGraph& target(LayerMode m) const { return m == LayerMode::lower_half ? lower_half : overall; }
};

Design prepare_design(std::string name, const Netlist& netlist, const Placement& placement,
                      const CongestionMap& map, const RunConfig& cfg);
Design load_design(const std::filesystem::path& base, const RunConfig& cfg);
/// Unlabeled graph from <base>.nodes and <base>.nets only.
CellGraph load_graph(const std::filesystem::path& base, const RunConfig& cfg);

/// Partitions and embeds a design. `cache` may be empty.
TrainGraph make_train_graph(const Design& d, const RunConfig& cfg, const std::filesystem::path& cache = {});

InferenceConfig inference_config(const RunConfig& cfg, const std::filesystem::path& cache = {});

// name,gx,gy,has_label,label_lower_half,label_overall
std::string labels_csv(const Design& d);
struct LabelTable {
  std::vector<std::string> names;
  LabeledGraph lower_half;  // graph pointer left empty
  LabeledGraph overall;
};
LabelTable parse_labels_csv(std::string_view text);

// name,prediction
std::string predictions_csv(std::span<const std::string> names, std::span<const double> values);
struct NamedValues {
  std::vector<std::string> names;
  std::vector<double> values;
};
NamedValues parse_predictions_csv(std::string_view text);

struct BenchReport {
  std::size_t nodes = 0;
  std::size_t clusters = 0;
  double minibatch_epoch_seconds = 0.0;
  double full_batch_epoch_seconds = 0.0;
  double ratio() const { return minibatch_epoch_seconds / full_batch_epoch_seconds; }
};

/// Per-epoch wall time of one-cluster minibatches against whole-graph
/// full-batch training on one synthetic design of cfg.bench_cells cells.
BenchReport run_bench(const RunConfig& cfg);

// Subcommands. Outputs go to cfg.out_dir, caches to cfg.cache_dir.
void cmd_ingest(const RunConfig& cfg);
void cmd_embed(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_predict(const RunConfig& cfg, const std::filesystem::path& model,
                 const std::filesystem::path& design);
MetricsReport cmd_eval(const RunConfig& cfg, const std::filesystem::path& predictions,
                       const std::filesystem::path& labels);
void cmd_baseline(const RunConfig& cfg, BaselineKind kind);
void cmd_synth(const RunConfig& cfg);
BenchReport cmd_bench(const RunConfig& cfg);

}  // namespace netcong
