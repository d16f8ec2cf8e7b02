// netcong: congestion prediction toolkit command line.
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error,
// 3 numeric failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "netcong/error.hpp"
#include "netcong/pipeline.hpp"

namespace {

int exit_code(netcong::ErrorKind k) { return k == netcong::ErrorKind::numeric ? 3 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Netlist congestion prediction with embedding-enhanced GNNs"};
  app.require_subcommand(1);

  std::string config_path, cache_dir, out_dir, model, design, predictions, labels, which;
  std::optional<std::uint64_t> seed;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (key = value)");
    sub->add_option("--seed", seed, "Global seed, overrides the config");
    sub->add_option("--cache-dir", cache_dir, "Cache directory");
    sub->add_option("--out", out_dir, "Output directory");
  };
  auto* ingest = app.add_subcommand("ingest", "Build GRAPH files and label tables");
  auto* embed = app.add_subcommand("embed", "Partition designs and cache embeddings");
  auto* train = app.add_subcommand("train", "Train a model on the configured designs");
  auto* predict = app.add_subcommand("predict", "Predict congestion on an unseen design");
  auto* eval = app.add_subcommand("eval", "Correlate predictions with labels");
  auto* baseline = app.add_subcommand("baseline", "Learning-free baseline scores");
  auto* synth = app.add_subcommand("synth", "Generate synthetic designs");
  auto* bench = app.add_subcommand("bench", "Minibatch vs full-batch epoch time");
  for (auto* s : {ingest, embed, train, predict, eval, baseline, synth, bench}) common(s);
  predict->add_option("--model", model, "MODEL file")->required();
  predict->add_option("--design", design, "Design base path (<base>.nodes, <base>.nets)")->required();
  eval->add_option("--predictions", predictions, "Prediction CSV")->required();
  eval->add_option("--labels", labels, "Label CSV from ingest")->required();
  baseline->add_option("--which", which, "neighborhood, gtl or adhesion")
      ->required()
      ->check(CLI::IsMember({"neighborhood", "gtl", "adhesion"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    netcong::RunConfig cfg;
    if (!config_path.empty()) cfg = netcong::load_config(config_path);
    if (seed) cfg.apply_seed(*seed);
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();

    if (*ingest) netcong::cmd_ingest(cfg);
    else if (*embed) netcong::cmd_embed(cfg);
    else if (*train) netcong::cmd_train(cfg);
    else if (*predict) netcong::cmd_predict(cfg, model, design);
    else if (*eval) std::cout << netcong::report_table(netcong::cmd_eval(cfg, predictions, labels));
    else if (*baseline) netcong::cmd_baseline(cfg, netcong::parse_baseline_kind(which));
    else if (*synth) netcong::cmd_synth(cfg);
    else if (*bench) {
      auto r = netcong::cmd_bench(cfg);
      std::printf("minibatch %.3fs  full-batch %.3fs  ratio %.3f\n", r.minibatch_epoch_seconds,
                  r.full_batch_epoch_seconds, r.ratio());
    }
  } catch (const netcong::Error& e) {
    std::cerr << "netcong: " << netcong::to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "netcong: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
