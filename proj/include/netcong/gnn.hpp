#pragma once

// Shallow SAGE-style GNN with an MLP head:
//   y = MLP([H0 ; SAGE(H0)]),  H0 = standardize([X ; E])
// trained with squared error and Adam, one graph cluster per minibatch.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netcong/embed.hpp"
#include "netcong/graph_build.hpp"
#include "netcong/matrix.hpp"
#include "netcong/partition.hpp"

namespace netcong {

enum class Activation : std::uint32_t { relu = 0, tanh = 1 };

struct Architecture {
  std::size_t attr_dim = kAttrCount;
  std::size_t embed_dim = 4;          // 0 trains without embeddings
  bool constant_attributes = false;   // replaces X by ones
  std::vector<std::size_t> sage_hidden{200, 160};
  std::vector<std::size_t> mlp_hidden{150, 150};
  Activation activation = Activation::relu;

  std::size_t input_dim() const { return attr_dim + embed_dim; }
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

struct SageLayer {
  Matrix w_self;  // d_in x d_out
  Matrix w_nbd;   // d_in x d_out
  std::vector<double> bias;
  bool operator==(const SageLayer&) const = default;
};

struct DenseLayer {
  Matrix w;
  std::vector<double> bias;
  bool operator==(const DenseLayer&) const = default;
};

struct Params {
  std::vector<SageLayer> sage;
  std::vector<DenseLayer> mlp;

  /// Visits every tensor in declaration order.
  template <typename F>
  void for_each(F&& f) {
    for (auto& l : sage) {
      f(std::span<double>(l.w_self.data));
      f(std::span<double>(l.w_nbd.data));
      f(std::span<double>(l.bias));
    }
    for (auto& l : mlp) {
      f(std::span<double>(l.w.data));
      f(std::span<double>(l.bias));
    }
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<Params*>(this)->for_each([&](std::span<double> s) { f(std::span<const double>(s)); });
  }
  std::size_t count() const;
  bool operator==(const Params&) const = default;
};

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> scale;
  bool operator==(const FeatureStats&) const = default;
};

struct Model {
  Architecture arch;
  Params params;
  FeatureStats stats;
  bool operator==(const Model&) const = default;
};

/// Weights uniform in +-sqrt(6 / (d_in + d_out)), biases zero.
Params init_params(const Architecture& arch, std::uint64_t seed);
Params zeros_like(const Params& p);

/// Raw model input [X ; E] before standardization.
Matrix assemble_inputs(const Architecture& arch, const Matrix& attrs, const Matrix* embedding);
/// Per-column mean and standard deviation (1 where the deviation vanishes).
FeatureStats compute_stats(std::span<const Matrix> inputs);
Matrix standardize(const Matrix& raw, const FeatureStats& stats);

struct SageTrace {
  std::vector<Matrix> agg;  // agg[l] = mean of layer-l inputs over neighbors
  std::vector<Matrix> out;  // out[l] = activation of layer l
};

SageTrace sage_forward(const Architecture& arch, const Params& params, const CellGraph& g,
                       const Matrix& h0);

/// Prediction from already standardized inputs.
std::vector<double> predict(const Architecture& arch, const Params& params, const CellGraph& g,
                            const Matrix& h0);
/// Prediction from attributes and embedding of `g`.
std::vector<double> predict(const Model& model, const CellGraph& g, const Matrix& attrs,
                            const Matrix* embedding);

struct LossGrad {
  double loss = 0.0;
  Params grad;
};

/// Mean squared error over nodes with mask != 0 and its exact gradient.
LossGrad loss_and_grad(const Architecture& arch, const Params& params, const CellGraph& g,
                       const Matrix& h0, std::span<const double> labels,
                       std::span<const std::uint8_t> mask);

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  bool full_batch = false;  // whole graph per step instead of one cluster
  void validate() const;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;
};

void adam_step(Params& params, const Params& grads, AdamState& state, const TrainConfig& cfg);

struct TrainGraph {
  LabeledGraph labeled;
  Partition partition;
  Matrix embedding;  // rows aligned with labeled.graph; may be empty when unused
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_pearson = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

TrainResult train(std::span<const TrainGraph> graphs, const TrainGraph* validation,
                  const Architecture& arch, const TrainConfig& cfg);

/// Predicts cluster by cluster with cross-cluster edges cut.
std::vector<double> predict_graph(const Model& model, const CellGraph& g, const Partition& p,
                                  const Matrix* embedding);

struct InferenceConfig {
  std::size_t target_size = 5000;
  PmiConfig pmi{};
  std::uint64_t seed = 0;
  std::filesystem::path embedding_cache{};
};

/// Partition, embed and predict an unseen graph; no labels are consulted.
std::vector<double> infer(const Model& model, const CellGraph& g, const InferenceConfig& cfg);

// MODEL v1: "NCMDL1", u32 descriptor length, u32 descriptor
// {attr_dim, embed_dim, constant_attributes, activation, n_sage, sizes...,
// n_mlp, sizes...}, then every weight tensor in declaration order as f64,
// then the feature means and scales.
std::string encode_model(const Model& model);
Model decode_model(std::string_view bytes);

std::string history_csv(std::span<const EpochRecord> history);

}  // namespace netcong
