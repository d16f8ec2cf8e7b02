#include "netcong/gnn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "netcong/binary_io.hpp"
#include "netcong/error.hpp"
#include "netcong/eval.hpp"
#include "netcong/kernels.hpp"

namespace netcong {

void Architecture::validate() const {
  if (input_dim() == 0) raise(ErrorKind::invalid_input, "model has no input features");
  if (sage_hidden.empty()) raise(ErrorKind::invalid_input, "model needs at least one SAGE layer");
  for (auto d : sage_hidden)
    if (d == 0) raise(ErrorKind::invalid_input, "zero-width SAGE layer");
  for (auto d : mlp_hidden)
    if (d == 0) raise(ErrorKind::invalid_input, "zero-width MLP layer");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) raise(ErrorKind::invalid_input, "learning rate must be positive");
  if (epochs < 1) raise(ErrorKind::invalid_input, "epochs must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    raise(ErrorKind::invalid_input, "Adam betas must lie in [0, 1)");
  if (!(eps > 0.0)) raise(ErrorKind::invalid_input, "Adam eps must be positive");
}

std::size_t Params::count() const {
  std::size_t n = 0;
  for_each([&](std::span<const double> s) { n += s.size(); });
  return n;
}

namespace {

std::vector<std::size_t> mlp_dims(const Architecture& a) {
  std::vector<std::size_t> d{a.input_dim() + a.sage_hidden.back()};
  d.insert(d.end(), a.mlp_hidden.begin(), a.mlp_hidden.end());
  d.push_back(1);
  return d;
}

void fill_uniform(Matrix& m, std::mt19937_64& rng) {
  double a = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
  std::uniform_real_distribution<double> u(-a, a);
  for (double& x : m.data) x = u(rng);
}

double act(Activation a, double z) { return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z); }

// Derivative expressed through the activation output.
double act_grad(Activation a, double h) { return a == Activation::relu ? (h > 0.0 ? 1.0 : 0.0) : 1.0 - h * h; }

void add_bias(Matrix& z, std::span<const double> b) {
  for (std::size_t i = 0; i < z.rows; ++i) {
    auto r = z.row(i);
    for (std::size_t j = 0; j < z.cols; ++j) r[j] += b[j];
  }
}

void activate(Matrix& z, Activation a) {
  for (double& x : z.data) x = act(a, x);
}

void col_sum_acc(const Matrix& m, std::vector<double>& out) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += r[j];
  }
}

// c = a * b^T via an explicit transpose so the inner loop stays an axpy.
Matrix times_transpose(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.rows);
  kernels::gemm_acc(a, transpose(b), c);
  return c;
}

struct Forward {
  SageTrace sage;
  std::vector<Matrix> mlp;  // mlp[0] = concat input, mlp[j+1] = output of layer j
};

Forward run_forward(const Architecture& arch, const Params& p, const CellGraph& g, const Matrix& h0) {
  Forward f;
  f.sage = sage_forward(arch, p, g, h0);
  const Matrix& last = f.sage.out.back();
  Matrix c(h0.rows, h0.cols + last.cols);
  for (std::size_t i = 0; i < h0.rows; ++i) {
    auto dst = c.row(i);
    std::copy(h0.row(i).begin(), h0.row(i).end(), dst.begin());
    std::copy(last.row(i).begin(), last.row(i).end(), dst.begin() + static_cast<std::ptrdiff_t>(h0.cols));
  }
  f.mlp.push_back(std::move(c));
  for (std::size_t j = 0; j < p.mlp.size(); ++j) {
    const auto& layer = p.mlp[j];
    Matrix z(h0.rows, layer.w.cols);
    kernels::gemm_acc(f.mlp.back(), layer.w, z);
    add_bias(z, layer.bias);
    if (j + 1 < p.mlp.size()) activate(z, arch.activation);
    f.mlp.push_back(std::move(z));
  }
  return f;
}

void check_inputs(const Architecture& arch, const Params& p, const CellGraph& g, const Matrix& h0) {
  if (h0.rows != g.nodes()) raise(ErrorKind::invalid_input, "input rows do not match the graph");
  if (h0.cols != arch.input_dim()) raise(ErrorKind::invalid_input, "input width does not match the model");
  if (p.sage.size() != arch.sage_hidden.size() || p.mlp.size() != arch.mlp_hidden.size() + 1)
    raise(ErrorKind::invalid_input, "parameters do not match the architecture");
}

}  // namespace

Params init_params(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  Params p;
  std::size_t din = arch.input_dim();
  for (std::size_t dout : arch.sage_hidden) {
    SageLayer l{Matrix(din, dout), Matrix(din, dout), std::vector<double>(dout, 0.0)};
    fill_uniform(l.w_self, rng);
    fill_uniform(l.w_nbd, rng);
    p.sage.push_back(std::move(l));
    din = dout;
  }
  auto dims = mlp_dims(arch);
  for (std::size_t j = 0; j + 1 < dims.size(); ++j) {
    DenseLayer l{Matrix(dims[j], dims[j + 1]), std::vector<double>(dims[j + 1], 0.0)};
    fill_uniform(l.w, rng);
    p.mlp.push_back(std::move(l));
  }
  return p;
}

Params zeros_like(const Params& p) {
  Params z = p;
  z.for_each([](std::span<double> s) { std::fill(s.begin(), s.end(), 0.0); });
  return z;
}

Matrix assemble_inputs(const Architecture& arch, const Matrix& attrs, const Matrix* embedding) {
  const std::size_t n = attrs.rows;
  if (attrs.cols < arch.attr_dim) raise(ErrorKind::invalid_input, "too few attribute columns");
  if (arch.embed_dim > 0) {
    if (!embedding || embedding->rows != n || embedding->cols != arch.embed_dim)
      raise(ErrorKind::invalid_input, "embedding does not match the model");
  }
  Matrix x(n, arch.input_dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < arch.attr_dim; ++j)
      x(i, j) = arch.constant_attributes ? 1.0 : attrs(i, j);
    for (std::size_t j = 0; j < arch.embed_dim; ++j) x(i, arch.attr_dim + j) = (*embedding)(i, j);
  }
  return x;
}

FeatureStats compute_stats(std::span<const Matrix> inputs) {
  if (inputs.empty()) raise(ErrorKind::invalid_input, "no inputs for feature statistics");
  const std::size_t d = inputs.front().cols;
  std::vector<double> sum(d, 0.0);
  std::size_t n = 0;
  for (const auto& m : inputs) {
    if (m.cols != d) raise(ErrorKind::invalid_input, "inconsistent input widths");
    col_sum_acc(m, sum);
    n += m.rows;
  }
  if (n == 0) raise(ErrorKind::invalid_input, "no rows for feature statistics");
  FeatureStats s;
  s.mean.resize(d);
  for (std::size_t j = 0; j < d; ++j) s.mean[j] = sum[j] / static_cast<double>(n);
  std::vector<double> sq(d, 0.0);
  for (const auto& m : inputs)
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < d; ++j) sq[j] += (m(i, j) - s.mean[j]) * (m(i, j) - s.mean[j]);
  s.scale.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double sd = std::sqrt(sq[j] / static_cast<double>(n));
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Matrix standardize(const Matrix& raw, const FeatureStats& stats) {
  if (stats.mean.size() != raw.cols || stats.scale.size() != raw.cols)
    raise(ErrorKind::invalid_input, "feature statistics do not match the input width");
  Matrix out = raw;
  for (std::size_t i = 0; i < out.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) = (out(i, j) - stats.mean[j]) / stats.scale[j];
  return out;
}

SageTrace sage_forward(const Architecture& arch, const Params& params, const CellGraph& g,
                       const Matrix& h0) {
  if (h0.rows != g.nodes()) raise(ErrorKind::invalid_input, "input rows do not match the graph");
  for (double v : h0.data)
    if (!std::isfinite(v)) raise(ErrorKind::invalid_input, "non-finite model input");
  SageTrace t;
  const Matrix* prev = &h0;
  for (const auto& layer : params.sage) {
    if (layer.w_self.rows != prev->cols) raise(ErrorKind::invalid_input, "SAGE layer width mismatch");
    Matrix agg(prev->rows, prev->cols);
    kernels::mean_aggregate(g.csr(), *prev, agg);
    Matrix z(prev->rows, layer.w_self.cols);
    kernels::gemm_acc(*prev, layer.w_self, z);
    kernels::gemm_acc(agg, layer.w_nbd, z);
    add_bias(z, layer.bias);
    activate(z, arch.activation);
    t.agg.push_back(std::move(agg));
    t.out.push_back(std::move(z));
    prev = &t.out.back();
  }
  return t;
}

std::vector<double> predict(const Architecture& arch, const Params& params, const CellGraph& g,
                            const Matrix& h0) {
  check_inputs(arch, params, g, h0);
  if (g.nodes() == 0) return {};
  auto f = run_forward(arch, params, g, h0);
  return f.mlp.back().data;
}

std::vector<double> predict(const Model& model, const CellGraph& g, const Matrix& attrs,
                            const Matrix* embedding) {
  Matrix h0 = standardize(assemble_inputs(model.arch, attrs, embedding), model.stats);
  return predict(model.arch, model.params, g, h0);
}

LossGrad loss_and_grad(const Architecture& arch, const Params& params, const CellGraph& g,
                       const Matrix& h0, std::span<const double> labels,
                       std::span<const std::uint8_t> mask) {
  check_inputs(arch, params, g, h0);
  const std::size_t n = g.nodes();
  if (labels.size() != n || mask.size() != n) raise(ErrorKind::invalid_input, "labels do not match the graph");
  std::size_t count = 0;
  for (auto m : mask) count += m ? 1 : 0;
  if (count == 0) raise(ErrorKind::invalid_input, "no labeled nodes in the minibatch");

  auto f = run_forward(arch, params, g, h0);
  LossGrad out;
  out.grad = zeros_like(params);
  Matrix d(n, 1);
  const auto& yhat = f.mlp.back().data;
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t v = 0; v < n; ++v) {
    if (!mask[v]) continue;
    double e = yhat[v] - labels[v];
    out.loss += e * e;
    d(v, 0) = 2.0 * e * inv;
  }
  out.loss *= inv;

  const std::size_t in_cols = h0.cols;
  Matrix d_last;
  for (std::size_t j = params.mlp.size(); j-- > 0;) {
    if (j + 1 < params.mlp.size())
      for (std::size_t i = 0; i < d.size(); ++i) d.data[i] *= act_grad(arch.activation, f.mlp[j + 1].data[i]);
    auto& gl = out.grad.mlp[j];
    kernels::gemm_tn_acc(f.mlp[j], d, gl.w);
    col_sum_acc(d, gl.bias);
    Matrix prev = times_transpose(d, params.mlp[j].w);
    if (j == 0) {
      d_last = Matrix(n, prev.cols - in_cols);
      for (std::size_t i = 0; i < n; ++i)
        std::copy(prev.row(i).begin() + static_cast<std::ptrdiff_t>(in_cols), prev.row(i).end(),
                  d_last.row(i).begin());
    } else {
      d = std::move(prev);
    }
  }

  d = std::move(d_last);
  for (std::size_t l = params.sage.size(); l-- > 0;) {
    const Matrix& h_out = f.sage.out[l];
    for (std::size_t i = 0; i < d.size(); ++i) d.data[i] *= act_grad(arch.activation, h_out.data[i]);
    const Matrix& h_in = l == 0 ? h0 : f.sage.out[l - 1];
    auto& gl = out.grad.sage[l];
    kernels::gemm_tn_acc(h_in, d, gl.w_self);
    kernels::gemm_tn_acc(f.sage.agg[l], d, gl.w_nbd);
    col_sum_acc(d, gl.bias);
    if (l == 0) break;
    Matrix prev = times_transpose(d, params.sage[l].w_self);
    Matrix through_agg = times_transpose(d, params.sage[l].w_nbd);
    kernels::mean_aggregate_adjoint_acc(g.csr(), through_agg, prev);
    d = std::move(prev);
  }
  return out;
}

void adam_step(Params& params, const Params& grads, AdamState& state, const TrainConfig& cfg) {
  std::vector<std::span<double>> ps;
  std::vector<std::span<const double>> gs;
  params.for_each([&](std::span<double> s) { ps.push_back(s); });
  grads.for_each([&](std::span<const double> s) { gs.push_back(s); });
  if (ps.size() != gs.size()) raise(ErrorKind::invalid_input, "gradient shape mismatch");
  if (state.m.empty()) {
    for (auto s : ps) {
      state.m.emplace_back(s.size(), 0.0);
      state.v.emplace_back(s.size(), 0.0);
    }
  }
  if (state.m.size() != ps.size()) raise(ErrorKind::invalid_input, "Adam state shape mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (gs[k].size() != ps[k].size() || state.m[k].size() != ps[k].size())
      raise(ErrorKind::invalid_input, "gradient shape mismatch");
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < ps[k].size(); ++i) {
      double g = gs[k][i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      double mh = m[i] / c1;
      double vh = v[i] / c2;
      ps[k][i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
  }
}

namespace {

struct Batch {
  CellGraph graph;
  std::vector<std::uint32_t> to_parent;
  Matrix h0;
  std::vector<double> labels;
  std::vector<std::uint8_t> mask;
  bool any_label = false;
};

Batch make_batch(const TrainGraph& tg, const Matrix& h0_full, std::span<const std::uint32_t> nodes) {
  Batch b;
  auto sub = induced_subgraph(*tg.labeled.graph, nodes);
  b.graph = std::move(sub.graph);
  b.to_parent = std::move(sub.to_parent);
  b.h0 = Matrix(nodes.size(), h0_full.cols);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::uint32_t v = nodes[i];
    std::copy(h0_full.row(v).begin(), h0_full.row(v).end(), b.h0.row(i).begin());
    b.labels.push_back(tg.labeled.labels[v]);
    b.mask.push_back(tg.labeled.has_label[v]);
    b.any_label = b.any_label || tg.labeled.has_label[v];
  }
  return b;
}

Matrix raw_inputs(const Architecture& arch, const TrainGraph& tg) {
  return assemble_inputs(arch, tg.labeled.graph->attrs, arch.embed_dim > 0 ? &tg.embedding : nullptr);
}

std::vector<Batch> make_batches(const Architecture& arch, const TrainGraph& tg, const FeatureStats& stats,
                                bool full_batch) {
  Matrix h0 = standardize(raw_inputs(arch, tg), stats);
  std::vector<Batch> out;
  if (full_batch) {
    std::vector<std::uint32_t> all(tg.labeled.graph->nodes());
    std::iota(all.begin(), all.end(), 0u);
    out.push_back(make_batch(tg, h0, all));
  } else {
    for (const auto& c : tg.partition.clusters)
      if (!c.empty()) out.push_back(make_batch(tg, h0, c));
  }
  return out;
}

double validation_pearson(const Model& model, const TrainGraph& val, std::uint64_t seed) {
  auto pred = predict_graph(model, *val.labeled.graph, val.partition,
                            model.arch.embed_dim > 0 ? &val.embedding : nullptr);
  std::vector<double> p, y;
  for (std::size_t v = 0; v < pred.size(); ++v) {
    if (!val.labeled.has_label[v]) continue;
    p.push_back(pred[v]);
    y.push_back(val.labeled.labels[v]);
  }
  if (p.size() < 2) return 0.0;
  auto np = add_tiebreak_noise(p, mix_seed(seed, 1));
  auto ny = add_tiebreak_noise(y, mix_seed(seed, 2));
  return pearson(np, ny);
}

}  // namespace

TrainResult train(std::span<const TrainGraph> graphs, const TrainGraph* validation,
                  const Architecture& arch, const TrainConfig& cfg) {
  arch.validate();
  cfg.validate();
  if (graphs.empty()) raise(ErrorKind::invalid_input, "no training graphs");

  std::vector<Matrix> raws;
  for (const auto& tg : graphs) {
    if (tg.labeled.graph->nodes() != tg.partition.assignment.size())
      raise(ErrorKind::invalid_input, "partition does not match its graph");
    raws.push_back(raw_inputs(arch, tg));
  }
  TrainResult res;
  res.model.arch = arch;
  res.model.stats = compute_stats(raws);
  raws.clear();
  res.model.params = init_params(arch, mix_seed(cfg.seed, 0x1417));

  std::vector<Batch> batches;
  for (const auto& tg : graphs) {
    auto b = make_batches(arch, tg, res.model.stats, cfg.full_batch);
    for (auto& x : b)
      if (x.any_label) batches.push_back(std::move(x));
  }
  if (batches.empty()) raise(ErrorKind::invalid_input, "no labeled nodes in any cluster");

  std::mt19937_64 rng(mix_seed(cfg.seed, 0x5417));
  std::vector<std::size_t> order(batches.size());
  std::iota(order.begin(), order.end(), 0);
  AdamState adam;
  Params best = res.model.params;
  double best_val = -std::numeric_limits<double>::infinity();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const auto& b = batches[idx];
      auto lg = loss_and_grad(arch, res.model.params, b.graph, b.h0, b.labels, b.mask);
      if (!std::isfinite(lg.loss)) raise(ErrorKind::numeric, "training loss diverged");
      loss_sum += lg.loss;
      adam_step(res.model.params, lg.grad, adam, cfg);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches.size());
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (validation) {
      rec.val_pearson = validation_pearson(res.model, *validation, mix_seed(cfg.seed, epoch));
      if (rec.val_pearson > best_val) {
        best_val = rec.val_pearson;
        best = res.model.params;
        res.best_epoch = epoch;
      }
    }
    res.history.push_back(rec);
  }
  if (validation) {
    res.model.params = std::move(best);
  } else {
    res.best_epoch = cfg.epochs;
  }
  return res;
}

std::vector<double> predict_graph(const Model& model, const CellGraph& g, const Partition& p,
                                  const Matrix* embedding) {
  if (p.assignment.size() != g.nodes()) raise(ErrorKind::invalid_input, "partition does not match the graph");
  Matrix h0 = standardize(assemble_inputs(model.arch, g.attrs, embedding), model.stats);
  std::vector<double> out(g.nodes(), 0.0);
  for (const auto& c : p.clusters) {
    if (c.empty()) continue;
    auto sub = induced_subgraph(g, c);
    Matrix hs(c.size(), h0.cols);
    for (std::size_t i = 0; i < c.size(); ++i)
      std::copy(h0.row(c[i]).begin(), h0.row(c[i]).end(), hs.row(i).begin());
    auto y = predict(model.arch, model.params, sub.graph, hs);
    for (std::size_t i = 0; i < c.size(); ++i) out[c[i]] = y[i];
  }
  return out;
}

std::vector<double> infer(const Model& model, const CellGraph& g, const InferenceConfig& cfg) {
  if (g.nodes() == 0) return {};
  Partition p = kway_partition(g, choose_k(g.nodes(), cfg.target_size), cfg.seed);
  Matrix emb;
  if (model.arch.embed_dim > 0) {
    PmiConfig pmi = cfg.pmi;
    pmi.dim = model.arch.embed_dim;
    emb = embed_graph(g, p, pmi, cfg.embedding_cache);
  }
  return predict_graph(model, g, p, model.arch.embed_dim > 0 ? &emb : nullptr);
}

namespace {
constexpr std::string_view kModelMagic = "NCMDL1";
constexpr std::uint32_t kMaxLayers = 64;
constexpr std::uint32_t kMaxWidth = 1u << 16;
}  // namespace

std::string encode_model(const Model& model) {
  const auto& a = model.arch;
  std::vector<std::uint32_t> desc{static_cast<std::uint32_t>(a.attr_dim), static_cast<std::uint32_t>(a.embed_dim),
                                  a.constant_attributes ? 1u : 0u, static_cast<std::uint32_t>(a.activation),
                                  static_cast<std::uint32_t>(a.sage_hidden.size())};
  for (auto d : a.sage_hidden) desc.push_back(static_cast<std::uint32_t>(d));
  desc.push_back(static_cast<std::uint32_t>(a.mlp_hidden.size()));
  for (auto d : a.mlp_hidden) desc.push_back(static_cast<std::uint32_t>(d));

  ByteWriter w;
  w.put_bytes(kModelMagic);
  w.put_u32(static_cast<std::uint32_t>(desc.size()));
  for (auto d : desc) w.put_u32(d);
  model.params.for_each([&](std::span<const double> s) {
    for (double v : s) w.put_f64(v);
  });
  for (double v : model.stats.mean) w.put_f64(v);
  for (double v : model.stats.scale) w.put_f64(v);
  return w.take();
}

Model decode_model(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.get_bytes(kModelMagic.size()) != kModelMagic) raise(ErrorKind::format, "not a MODEL v1 file");
  std::uint32_t len = r.get_u32();
  if (len < 6 || len > 2 * kMaxLayers + 6) raise(ErrorKind::format, "bad model descriptor length");
  std::vector<std::uint32_t> desc(len);
  for (auto& d : desc) d = r.get_u32();

  Model m;
  auto& a = m.arch;
  std::size_t pos = 0;
  auto next = [&]() {
    if (pos >= desc.size()) raise(ErrorKind::format, "truncated model descriptor");
    return desc[pos++];
  };
  a.attr_dim = next();
  a.embed_dim = next();
  std::uint32_t constant = next();
  std::uint32_t activation = next();
  if (constant > 1 || activation > 1) raise(ErrorKind::format, "bad model descriptor flags");
  a.constant_attributes = constant == 1;
  a.activation = static_cast<Activation>(activation);
  auto read_sizes = [&](std::vector<std::size_t>& out) {
    std::uint32_t k = next();
    if (k > kMaxLayers) raise(ErrorKind::format, "too many layers in model descriptor");
    out.clear();
    for (std::uint32_t i = 0; i < k; ++i) {
      std::uint32_t d = next();
      if (d == 0 || d > kMaxWidth) raise(ErrorKind::format, "bad layer width in model descriptor");
      out.push_back(d);
    }
  };
  read_sizes(a.sage_hidden);
  read_sizes(a.mlp_hidden);
  if (pos != desc.size()) raise(ErrorKind::format, "trailing model descriptor entries");
  if (a.attr_dim > kMaxWidth || a.embed_dim > kMaxWidth) raise(ErrorKind::format, "bad input width");
  try {
    a.validate();
  } catch (const Error& e) {
    raise(ErrorKind::format, std::string("bad model descriptor: ") + e.what());
  }
  std::uint64_t expected = 2 * a.input_dim();
  std::uint64_t din = a.input_dim();
  for (auto d : a.sage_hidden) {
    expected += 2 * din * d + d;
    din = d;
  }
  auto md = mlp_dims(a);
  for (std::size_t j = 0; j + 1 < md.size(); ++j) expected += std::uint64_t{md[j]} * md[j + 1] + md[j + 1];
  if (r.remaining() / 8 != expected || r.remaining() % 8 != 0)
    raise(ErrorKind::format, "model weight block has the wrong size");
  m.params = init_params(a, 0);
  m.params.for_each([&](std::span<double> s) {
    for (double& v : s) v = r.get_f64();
  });
  m.stats.mean.resize(a.input_dim());
  m.stats.scale.resize(a.input_dim());
  for (double& v : m.stats.mean) v = r.get_f64();
  for (double& v : m.stats.scale) {
    v = r.get_f64();
    if (!(v > 0.0) || !std::isfinite(v)) raise(ErrorKind::format, "bad feature scale in model");
  }
  r.expect_end();
  return m;
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::string out = "epoch,train_loss,val_pearson\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch);
    out += ',';
    out += format_double(h.train_loss);
    out += ',';
    out += format_double(h.val_pearson);
    out += '\n';
  }
  return out;
}

}  // namespace netcong
