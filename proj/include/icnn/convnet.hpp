#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "icnn/common.hpp"
#include "icnn/corpus.hpp"
#include "icnn/embedding.hpp"
#include "icnn/rng.hpp"
#include "icnn/tokenizer.hpp"
#include "icnn/types.hpp"

namespace icnn {

inline constexpr double kRmspropRho = 0.9;
inline constexpr double kRmspropEpsilon = 1e-6;
inline constexpr double kLossClamp = 1e-12;
inline constexpr double kUnknownInitRange = 0.25;

struct CnnConfig {
  std::vector<int> filter_widths{3, 4, 5};
  int filters_per_width = 128;
  int embedding_dim = 100;
  int max_len = 400;
  int num_classes = 4;
  double dropout_rate = 0.5;  // probability a pooled unit is zeroed
  double l2_lambda = 0.05;
  int batch_size = 32;
  int epochs = 50;
  double learning_rate = 1e-3;
  double decay = 2.5;
  bool trainable_embeddings = true;
  std::uint64_t seed = 1;

  int total_filters() const {
    return filters_per_width * static_cast<int>(filter_widths.size());
  }

  // Inverse-time schedule: lr_e = lr0 * decay / (decay + e), zero-based e.
  double epoch_learning_rate(int epoch) const {
    return learning_rate * decay / (decay + epoch);
  }

  void validate() const {
    if (filter_widths.empty()) throw UsageError("no filter widths");
    for (std::size_t i = 0; i < filter_widths.size(); ++i) {
      if (filter_widths[i] < 1 || filter_widths[i] > max_len) {
        throw UsageError("filter width " + std::to_string(filter_widths[i]) +
                         " must be in [1, max_len=" + std::to_string(max_len) +
                         "]");
      }
      for (std::size_t j = i + 1; j < filter_widths.size(); ++j) {
        if (filter_widths[i] == filter_widths[j]) {
          throw UsageError("duplicate filter width " +
                           std::to_string(filter_widths[i]));
        }
      }
    }
    if (filters_per_width < 1) throw UsageError("filters_per_width must be >= 1");
    if (embedding_dim < 1) throw UsageError("embedding_dim must be >= 1");
    if (max_len < 1) throw UsageError("max_len must be >= 1");
    if (num_classes < 2) throw UsageError("num_classes must be >= 2");
    if (dropout_rate < 0 || dropout_rate >= 1) {
      throw UsageError("dropout_rate must be in [0, 1)");
    }
    if (l2_lambda < 0) throw UsageError("l2_lambda must be >= 0");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (learning_rate <= 0) throw UsageError("learning_rate must be > 0");
    if (decay <= 0) throw UsageError("decay must be > 0");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"filter_widths", filter_widths},
                          {"filters_per_width", filters_per_width},
                          {"embedding_dim", embedding_dim},
                          {"max_len", max_len},
                          {"num_classes", num_classes},
                          {"dropout_rate", dropout_rate},
                          {"l2_lambda", l2_lambda},
                          {"batch_size", batch_size},
                          {"epochs", epochs},
                          {"learning_rate", learning_rate},
                          {"decay", decay},
                          {"trainable_embeddings", trainable_embeddings},
                          {"seed", seed}};
  }

  static CnnConfig from_json(const nlohmann::json& j) {
    CnnConfig cfg;
    cfg.filter_widths = j.at("filter_widths").get<std::vector<int>>();
    cfg.filters_per_width = j.at("filters_per_width").get<int>();
    cfg.embedding_dim = j.at("embedding_dim").get<int>();
    cfg.max_len = j.at("max_len").get<int>();
    cfg.num_classes = j.at("num_classes").get<int>();
    cfg.dropout_rate = j.at("dropout_rate").get<double>();
    cfg.l2_lambda = j.at("l2_lambda").get<double>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.decay = j.at("decay").get<double>();
    cfg.trainable_embeddings = j.at("trainable_embeddings").get<bool>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
  }
};

// Filter banks are stored per width as a (filters x m*d) matrix; row f is
// filter f's m x d weights flattened row-major, which makes the convolution a
// plain matrix product against stacked window rows.
template <class Scalar>
struct CnnModel {
  CnnConfig config;
  LabelSet labels{LabelSet::default_intents()};
  TokenizerConfig tokenizer;
  Vocabulary vocab;
  Matrix<Scalar> embedding;                  // V x d, PAD row pinned to zero
  std::vector<Matrix<Scalar>> conv_weights;  // per width: filters x (m*d)
  std::vector<Vector<Scalar>> conv_bias;     // per width: filters
  Matrix<Scalar> fc_weights;                 // total_filters x K
  Vector<Scalar> fc_bias;                    // K
};

// Seeded initialization. Embedding rows come from the pretrained table where
// available and uniform(-0.25, 0.25) otherwise; the PAD row stays zero and is
// never updated. Filters and the FC layer get Glorot-uniform weights and zero
// biases.
template <class Scalar>
CnnModel<Scalar> init_cnn_model(const CnnConfig& config, const LabelSet& labels,
                                const TokenizerConfig& tokenizer,
                                const Vocabulary& vocab,
                                const EmbeddingTable* pretrained = nullptr) {
  config.validate();
  if (labels.size() != config.num_classes) {
    throw UsageError("label set size " + std::to_string(labels.size()) +
                     " does not match num_classes " +
                     std::to_string(config.num_classes));
  }
  if (pretrained && pretrained->dim() != config.embedding_dim) {
    throw UsageError("embedding file dimension " +
                     std::to_string(pretrained->dim()) +
                     " does not match configured dimension " +
                     std::to_string(config.embedding_dim));
  }
  CnnModel<Scalar> model;
  model.config = config;
  model.labels = labels;
  model.tokenizer = tokenizer;
  model.vocab = vocab;

  const int v = vocab.size();
  const int d = config.embedding_dim;
  Rng rng(derive_seed(config.seed, 0xc4a1ULL));

  model.embedding = Matrix<Scalar>::Zero(v, d);
  for (int row = 1; row < v; ++row) {
    const int source =
        pretrained ? pretrained->row_of(vocab.token_at(row)) : -1;
    if (source >= 0) {
      for (int c = 0; c < d; ++c) {
        model.embedding(row, c) =
            static_cast<Scalar>(pretrained->vectors()(source, c));
      }
    } else {
      for (int c = 0; c < d; ++c) {
        model.embedding(row, c) = static_cast<Scalar>(
            rng.uniform(-kUnknownInitRange, kUnknownInitRange));
      }
    }
  }

  for (const int m : config.filter_widths) {
    const double limit = std::sqrt(6.0 / (m * d + config.filters_per_width));
    Matrix<Scalar> w(config.filters_per_width, m * d);
    for (Index r = 0; r < w.rows(); ++r) {
      for (Index c = 0; c < w.cols(); ++c) {
        w(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
      }
    }
    model.conv_weights.push_back(std::move(w));
    model.conv_bias.push_back(Vector<Scalar>::Zero(config.filters_per_width));
  }

  const int total = config.total_filters();
  const double fc_limit = std::sqrt(6.0 / (total + config.num_classes));
  model.fc_weights.resize(total, config.num_classes);
  for (Index r = 0; r < model.fc_weights.rows(); ++r) {
    for (Index c = 0; c < model.fc_weights.cols(); ++c) {
      model.fc_weights(r, c) = static_cast<Scalar>(rng.uniform(-fc_limit, fc_limit));
    }
  }
  model.fc_bias = Vector<Scalar>::Zero(config.num_classes);
  return model;
}

// Stacks the embedding rows of a fixed-length index sequence into an l x d
// matrix; PAD positions yield zero rows.
template <class Scalar>
Matrix<Scalar> embed_sequence(const std::vector<int>& indices,
                              const CnnModel<Scalar>& model) {
  if (static_cast<int>(indices.size()) != model.config.max_len) {
    throw UsageError("sequence length " + std::to_string(indices.size()) +
                     " does not match max_len " +
                     std::to_string(model.config.max_len));
  }
  Matrix<Scalar> x(model.config.max_len, model.config.embedding_dim);
  for (int p = 0; p < model.config.max_len; ++p) {
    if (indices[p] < 0 || indices[p] >= model.vocab.size()) {
      throw DataError("token index " + std::to_string(indices[p]) +
                      " outside vocabulary range");
    }
    x.row(p) = model.embedding.row(indices[p]);
  }
  return x;
}

// Single-filter convolution with ReLU: c_i = relu(sum(w (.) x[i..i+m-1]) + b),
// output length l - m + 1.
template <class Scalar>
Vector<Scalar> conv_feature_map(const Matrix<Scalar>& x,
                                const Matrix<Scalar>& w, Scalar b) {
  if (w.cols() != x.cols()) {
    throw UsageError("filter and input dimension mismatch");
  }
  if (w.rows() > x.rows()) {
    throw UsageError("filter width exceeds input length");
  }
  const Index n = x.rows() - w.rows() + 1;
  Vector<Scalar> map(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar pre =
        (w.array() * x.middleRows(i, w.rows()).array()).sum() + b;
    map(i) = pre > Scalar(0) ? pre : Scalar(0);
  }
  return map;
}

template <class Scalar>
Scalar max_pool(const Vector<Scalar>& c) {
  if (c.size() == 0) throw UsageError("max_pool over an empty feature map");
  return c.maxCoeff();
}

// First maximal index; the backward pass routes the pooled gradient here.
template <class Scalar>
Index max_pool_index(const Vector<Scalar>& c) {
  if (c.size() == 0) throw UsageError("max_pool over an empty feature map");
  Index best = 0;
  for (Index i = 1; i < c.size(); ++i) {
    if (c(i) > c(best)) best = i;
  }
  return best;
}

// Cached activations for one training batch, everything backward needs to
// replay the pooling routing and dropout mask exactly.
template <class Scalar>
struct ForwardTrace {
  std::vector<std::vector<int>> sequences;
  std::vector<int> effective_len;          // non-PAD prefix length per sample
  std::vector<Matrix<Scalar>> embedded;    // gathered embedding rows per sample
  Matrix<Scalar> pooled;                   // B x total_filters, post-ReLU max
  Matrix<Scalar> dropout_mask;             // B x total_filters of 0/1
  Matrix<Scalar> dropped;                  // pooled after inverted dropout
  // Per width: B x filters window index of the first maximum. Values >= the
  // computed window count denote an all-PAD window whose pre-activation is
  // exactly the filter bias.
  std::vector<Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>> argmax;
  Matrix<Scalar> probs;  // B x K
  bool train_mode = false;
};

namespace detail {

// Windows past the non-PAD prefix see only zero rows, so their pre-activation
// is exactly the bias; the loop below therefore only multiplies out windows
// that touch real tokens and folds the all-PAD tail in analytically.
template <class Scalar>
void pool_sample(const CnnModel<Scalar>& model, const Matrix<Scalar>& gathered,
                 int n_eff, int sample, Matrix<Scalar>& pooled,
                 std::vector<Eigen::Matrix<Index, Eigen::Dynamic,
                                           Eigen::Dynamic>>& argmax,
                 std::vector<Matrix<Scalar>>& map_buffers) {
  const int d = model.config.embedding_dim;
  const int l = model.config.max_len;
  const int nf = model.config.filters_per_width;
  int unit = 0;
  for (std::size_t wi = 0; wi < model.config.filter_widths.size(); ++wi) {
    const int m = model.config.filter_widths[wi];
    const Index n_win = l - m + 1;
    const Index n_c = std::min<Index>(n_eff, n_win);
    Matrix<Scalar>& maps = map_buffers[wi];
    if (n_c > 0) {
      maps.resize(n_c, nf);
      maps.rowwise() = model.conv_bias[wi].transpose();
      for (int r = 0; r < m; ++r) {
        maps.noalias() += gathered.middleRows(r, n_c) *
                          model.conv_weights[wi].middleCols(r * d, d).transpose();
      }
    }
    for (int f = 0; f < nf; ++f, ++unit) {
      Scalar best = Scalar(0);
      Index best_idx = 0;
      if (n_c > 0) {
        Scalar best_pre = maps(0, f);
        for (Index i = 1; i < n_c; ++i) {
          if (maps(i, f) > best_pre) {
            best_pre = maps(i, f);
            best_idx = i;
          }
        }
        best = best_pre > Scalar(0) ? best_pre : Scalar(0);
        // All computed activations are zero after ReLU: the first maximal
        // index of the post-ReLU map is window 0.
        if (best == Scalar(0)) best_idx = 0;
      }
      if (n_c < n_win) {
        const Scalar pad_pre = model.conv_bias[wi](f);
        const Scalar pad_val = pad_pre > Scalar(0) ? pad_pre : Scalar(0);
        if (n_c == 0) {
          best = pad_val;
          best_idx = 0;  // every window is all-PAD
        } else if (pad_val > best) {
          best = pad_val;
          best_idx = n_c;  // first all-PAD window
        }
      }
      pooled(sample, unit) = best;
      argmax[wi](sample, f) = best_idx;
    }
  }
}

template <class Scalar>
void softmax_rows(Matrix<Scalar>& logits) {
  for (Index r = 0; r < logits.rows(); ++r) {
    const Scalar peak = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - peak).exp();
    logits.row(r) /= logits.row(r).sum();
  }
}

}  // namespace detail

// Runs the batch through embedding lookup, per-width convolution + ReLU,
// max-pooling, inverted dropout (training only) and the softmax output layer.
// Returns B x K probabilities; fills *trace when requested in train mode.
template <class Scalar>
Matrix<Scalar> forward(const CnnModel<Scalar>& model,
                       const std::vector<std::vector<int>>& batch,
                       bool train_mode, Rng& dropout_rng,
                       ForwardTrace<Scalar>* trace = nullptr) {
  if (batch.empty()) throw UsageError("forward on an empty batch");
  const int b = static_cast<int>(batch.size());
  const int l = model.config.max_len;
  const int d = model.config.embedding_dim;
  const int total = model.config.total_filters();
  const int max_width =
      *std::max_element(model.config.filter_widths.begin(),
                        model.config.filter_widths.end());

  Matrix<Scalar> pooled(b, total);
  std::vector<Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>> argmax;
  for (std::size_t wi = 0; wi < model.config.filter_widths.size(); ++wi) {
    argmax.emplace_back(b, model.config.filters_per_width);
  }
  std::vector<Matrix<Scalar>> map_buffers(model.config.filter_widths.size());
  std::vector<Matrix<Scalar>> embedded(trace ? b : 1);

  for (int s = 0; s < b; ++s) {
    const auto& seq = batch[s];
    if (static_cast<int>(seq.size()) != l) {
      throw UsageError("sequence length " + std::to_string(seq.size()) +
                       " does not match max_len " + std::to_string(l));
    }
    int n_eff = 0;
    for (int p = l; p-- > 0;) {
      if (seq[p] != Vocabulary::kPadIndex) {
        n_eff = p + 1;
        break;
      }
    }
    const int n_gather =
        n_eff > 0 ? std::min(n_eff + max_width - 1, l) : 0;
    Matrix<Scalar>& gathered = embedded[trace ? s : 0];
    gathered.resize(n_gather, d);
    for (int p = 0; p < n_gather; ++p) {
      if (seq[p] < 0 || seq[p] >= model.vocab.size()) {
        throw DataError("token index " + std::to_string(seq[p]) +
                        " outside vocabulary range");
      }
      gathered.row(p) = model.embedding.row(seq[p]);
    }
    detail::pool_sample(model, gathered, n_eff, s, pooled, argmax,
                        map_buffers);
    if (trace) trace->effective_len.push_back(n_eff);
  }

  const double keep = 1.0 - model.config.dropout_rate;
  Matrix<Scalar> mask;
  Matrix<Scalar> dropped;
  if (train_mode && model.config.dropout_rate > 0) {
    mask.resize(b, total);
    for (int s = 0; s < b; ++s) {
      for (int u = 0; u < total; ++u) {
        mask(s, u) = dropout_rng.uniform() >= model.config.dropout_rate
                         ? Scalar(1)
                         : Scalar(0);
      }
    }
    dropped = (pooled.array() * mask.array() / static_cast<Scalar>(keep))
                  .matrix();
  } else {
    mask = Matrix<Scalar>::Ones(b, total);
    dropped = pooled;
  }

  Matrix<Scalar> probs = dropped * model.fc_weights;
  probs.rowwise() += model.fc_bias.transpose();
  detail::softmax_rows(probs);
  if (!probs.allFinite()) {
    throw NumericError("forward produced non-finite activations");
  }

  if (trace) {
    trace->sequences = batch;
    trace->embedded = std::move(embedded);
    trace->pooled = std::move(pooled);
    trace->dropout_mask = std::move(mask);
    trace->dropped = std::move(dropped);
    trace->argmax = std::move(argmax);
    trace->probs = probs;
    trace->train_mode = train_mode;
  }
  return probs;
}

struct LossValue {
  double value = 0;
  std::int64_t clamped = 0;  // gold probabilities clamped at 1e-12
};

// Mean cross-entropy over the batch plus lambda * (sum of squared FC and
// filter weights). Biases and embeddings are not regularized.
template <class Scalar>
LossValue cnn_loss(const Matrix<Scalar>& probs, const std::vector<int>& golds,
                   const CnnModel<Scalar>& model, double lambda) {
  if (static_cast<Index>(golds.size()) != probs.rows()) {
    throw UsageError("gold label count does not match batch size");
  }
  LossValue loss;
  for (Index s = 0; s < probs.rows(); ++s) {
    if (golds[s] < 0 || golds[s] >= probs.cols()) {
      throw UsageError("gold label " + std::to_string(golds[s]) +
                       " outside [0, K)");
    }
    double p = static_cast<double>(probs(s, golds[s]));
    if (p < kLossClamp) {
      p = kLossClamp;
      ++loss.clamped;
    }
    loss.value -= std::log(p);
  }
  loss.value /= static_cast<double>(probs.rows());
  if (lambda > 0) {
    double reg = 0;
    for (const auto& w : model.conv_weights) {
      reg += w.template cast<double>().array().square().sum();
    }
    reg += model.fc_weights.template cast<double>().array().square().sum();
    loss.value += lambda * reg;
  }
  return loss;
}

template <class Scalar>
struct CnnGradients {
  Matrix<Scalar> embedding;
  std::vector<Matrix<Scalar>> conv_weights;
  std::vector<Vector<Scalar>> conv_bias;
  Matrix<Scalar> fc_weights;
  Vector<Scalar> fc_bias;
};

// Exact gradients of cnn_loss with respect to every parameter tensor. The
// dropout mask and max-pool routing are replayed from the trace. PAD's
// embedding row never receives gradient.
template <class Scalar>
CnnGradients<Scalar> backward(const ForwardTrace<Scalar>& trace,
                              const CnnModel<Scalar>& model,
                              const std::vector<int>& golds, double lambda) {
  if (!trace.train_mode) {
    throw UsageError("backward needs a train-mode forward trace");
  }
  const Index b = trace.probs.rows();
  if (static_cast<Index>(golds.size()) != b) {
    throw UsageError("gold label count does not match trace batch size");
  }
  const int d = model.config.embedding_dim;
  const int nf = model.config.filters_per_width;
  const double keep = 1.0 - model.config.dropout_rate;

  CnnGradients<Scalar> grads;
  grads.embedding = Matrix<Scalar>::Zero(model.embedding.rows(),
                                         model.embedding.cols());
  for (std::size_t wi = 0; wi < model.conv_weights.size(); ++wi) {
    grads.conv_weights.push_back(Matrix<Scalar>::Zero(
        model.conv_weights[wi].rows(), model.conv_weights[wi].cols()));
    grads.conv_bias.push_back(Vector<Scalar>::Zero(nf));
  }

  // d loss / d logits = (softmax - onehot) / B.
  Matrix<Scalar> dlogits = trace.probs;
  for (Index s = 0; s < b; ++s) {
    if (golds[s] < 0 || golds[s] >= dlogits.cols()) {
      throw UsageError("gold label " + std::to_string(golds[s]) +
                       " outside [0, K)");
    }
    dlogits(s, golds[s]) -= Scalar(1);
  }
  dlogits /= static_cast<Scalar>(b);

  grads.fc_weights = trace.dropped.transpose() * dlogits;
  if (lambda > 0) {
    grads.fc_weights += static_cast<Scalar>(2 * lambda) * model.fc_weights;
  }
  grads.fc_bias = dlogits.colwise().sum().transpose();

  Matrix<Scalar> dpooled = dlogits * model.fc_weights.transpose();
  dpooled.array() *= trace.dropout_mask.array() / static_cast<Scalar>(keep);

  for (Index s = 0; s < b; ++s) {
    const auto& seq = trace.sequences[s];
    const Matrix<Scalar>& gathered = trace.embedded[s];
    int unit = 0;
    for (std::size_t wi = 0; wi < model.config.filter_widths.size(); ++wi) {
      const int m = model.config.filter_widths[wi];
      const Index n_win = model.config.max_len - m + 1;
      const Index n_c = std::min<Index>(trace.effective_len[s], n_win);
      for (int f = 0; f < nf; ++f, ++unit) {
        const Scalar g = dpooled(s, unit);
        // ReLU gate: the pooled value is the post-ReLU max, so zero means the
        // winning pre-activation was <= 0 and nothing flows back.
        if (g == Scalar(0) || trace.pooled(s, unit) <= Scalar(0)) continue;
        grads.conv_bias[wi](f) += g;
        const Index idx = trace.argmax[wi](s, f);
        if (idx >= n_c) continue;  // all-PAD window: bias gradient only
        for (int r = 0; r < m; ++r) {
          grads.conv_weights[wi].row(f).segment(r * d, d) +=
              g * gathered.row(idx + r);
          if (model.config.trainable_embeddings &&
              seq[idx + r] != Vocabulary::kPadIndex) {
            grads.embedding.row(seq[idx + r]) +=
                g * model.conv_weights[wi].row(f).segment(r * d, d);
          }
        }
      }
    }
  }

  if (lambda > 0) {
    for (std::size_t wi = 0; wi < model.conv_weights.size(); ++wi) {
      grads.conv_weights[wi] +=
          static_cast<Scalar>(2 * lambda) * model.conv_weights[wi];
    }
  }
  return grads;
}

template <class Scalar>
struct RmspropState {
  Matrix<Scalar> embedding_acc;
  std::vector<Matrix<Scalar>> conv_weights_acc;
  std::vector<Vector<Scalar>> conv_bias_acc;
  Matrix<Scalar> fc_weights_acc;
  Vector<Scalar> fc_bias_acc;
  std::int64_t step = 0;
  double learning_rate = 0;  // current epoch's rate, set by the train loop
};

template <class Scalar>
RmspropState<Scalar> init_rmsprop_state(const CnnModel<Scalar>& model) {
  RmspropState<Scalar> state;
  state.embedding_acc = Matrix<Scalar>::Zero(model.embedding.rows(),
                                             model.embedding.cols());
  for (std::size_t wi = 0; wi < model.conv_weights.size(); ++wi) {
    state.conv_weights_acc.push_back(Matrix<Scalar>::Zero(
        model.conv_weights[wi].rows(), model.conv_weights[wi].cols()));
    state.conv_bias_acc.push_back(
        Vector<Scalar>::Zero(model.conv_bias[wi].size()));
  }
  state.fc_weights_acc = Matrix<Scalar>::Zero(model.fc_weights.rows(),
                                              model.fc_weights.cols());
  state.fc_bias_acc = Vector<Scalar>::Zero(model.fc_bias.size());
  state.learning_rate = model.config.learning_rate;
  return state;
}

namespace detail {

template <class Scalar, class Tensor>
void rmsprop_update(Tensor& param, const Tensor& grad, Tensor& acc,
                    double lr) {
  acc = static_cast<Scalar>(kRmspropRho) * acc.array() +
        static_cast<Scalar>(1 - kRmspropRho) * grad.array().square();
  param.array() -= static_cast<Scalar>(lr) * grad.array() /
                   (acc.array().sqrt() + static_cast<Scalar>(kRmspropEpsilon));
}

}  // namespace detail

// a <- rho a + (1 - rho) g^2; p <- p - lr g / (sqrt(a) + eps), elementwise,
// rho = 0.9, eps = 1e-6. Embeddings move only when trainable; PAD's row has
// zero gradient by construction and stays pinned.
template <class Scalar>
void rmsprop_step(CnnModel<Scalar>& model, const CnnGradients<Scalar>& grads,
                  RmspropState<Scalar>& state) {
  const double lr = state.learning_rate;
  if (model.config.trainable_embeddings) {
    detail::rmsprop_update<Scalar>(model.embedding, grads.embedding,
                                   state.embedding_acc, lr);
  }
  for (std::size_t wi = 0; wi < model.conv_weights.size(); ++wi) {
    detail::rmsprop_update<Scalar>(model.conv_weights[wi],
                                   grads.conv_weights[wi],
                                   state.conv_weights_acc[wi], lr);
    detail::rmsprop_update<Scalar>(model.conv_bias[wi], grads.conv_bias[wi],
                                   state.conv_bias_acc[wi], lr);
  }
  detail::rmsprop_update<Scalar>(model.fc_weights, grads.fc_weights,
                                 state.fc_weights_acc, lr);
  detail::rmsprop_update<Scalar>(model.fc_bias, grads.fc_bias,
                                 state.fc_bias_acc, lr);
  ++state.step;
  if (!model.fc_weights.allFinite() || !model.embedding.allFinite()) {
    throw NumericError("non-finite parameter after optimizer step " +
                       std::to_string(state.step));
  }
}

struct EncodedDataset {
  std::vector<std::vector<int>> sequences;
  std::vector<int> labels;
};

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0;
  double train_loss = 0;
  double train_accuracy = 0;  // over the epoch's training passes, dropout on
  double val_accuracy = 0;
  std::int64_t clamped = 0;
};

// Batched inference; ties resolve to the lowest class index.
template <class Scalar>
std::vector<int> predict_classes(const CnnModel<Scalar>& model,
                                 const std::vector<std::vector<int>>& seqs) {
  std::vector<int> out;
  out.reserve(seqs.size());
  Rng unused(0);
  const int step = std::max(1, model.config.batch_size);
  for (std::size_t start = 0; start < seqs.size();
       start += static_cast<std::size_t>(step)) {
    const std::size_t count =
        std::min<std::size_t>(step, seqs.size() - start);
    std::vector<std::vector<int>> batch(seqs.begin() + start,
                                        seqs.begin() + start + count);
    const Matrix<Scalar> probs = forward(model, batch, false, unused);
    for (Index s = 0; s < probs.rows(); ++s) {
      int best = 0;
      for (Index k = 1; k < probs.cols(); ++k) {
        if (probs(s, k) > probs(s, best)) best = static_cast<int>(k);
      }
      out.push_back(best);
    }
  }
  return out;
}

template <class Scalar>
double evaluate_accuracy(const CnnModel<Scalar>& model,
                         const EncodedDataset& data) {
  if (data.sequences.empty()) return 0;
  const auto preds = predict_classes(model, data.sequences);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == data.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

template <class Scalar>
struct CnnTrainResult {
  CnnModel<Scalar> model;  // checkpoint with the best validation accuracy
  std::vector<EpochStats> history;
};

// Seeded shuffled minibatches with RMSProp updates under the inverse-time
// learning-rate schedule. Returns the epoch checkpoint with the best
// validation accuracy (earliest epoch on ties); without validation data the
// final epoch wins.
template <class Scalar>
CnnTrainResult<Scalar> train_cnn(CnnModel<Scalar> model,
                                 const EncodedDataset& train,
                                 const EncodedDataset& validation) {
  model.config.validate();
  if (train.sequences.empty()) throw DataError("empty training set");
  if (train.sequences.size() != train.labels.size() ||
      validation.sequences.size() != validation.labels.size()) {
    throw UsageError("dataset sequences/labels size mismatch");
  }
  const bool has_validation = !validation.sequences.empty();

  Rng shuffle_rng(derive_seed(model.config.seed, 0x5bffULL));
  Rng dropout_rng(derive_seed(model.config.seed, 0xd607ULL));
  RmspropState<Scalar> state = init_rmsprop_state(model);

  CnnTrainResult<Scalar> result;
  CnnModel<Scalar> best = model;
  double best_val = -1;

  std::vector<std::size_t> order(train.sequences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < model.config.epochs; ++epoch) {
    state.learning_rate = model.config.epoch_learning_rate(epoch);
    shuffle_rng.shuffle(order);

    double loss_sum = 0;
    std::int64_t hit_sum = 0;
    std::int64_t clamped = 0;
    const std::size_t n = order.size();
    const std::size_t bs = static_cast<std::size_t>(model.config.batch_size);
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t count = std::min(bs, n - start);
      std::vector<std::vector<int>> batch;
      std::vector<int> golds;
      batch.reserve(count);
      golds.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        batch.push_back(train.sequences[order[start + i]]);
        golds.push_back(train.labels[order[start + i]]);
      }
      ForwardTrace<Scalar> trace;
      const auto probs = forward(model, batch, true, dropout_rng, &trace);
      const LossValue loss =
          cnn_loss(probs, golds, model, model.config.l2_lambda);
      loss_sum += loss.value * static_cast<double>(count);
      clamped += loss.clamped;
      for (Index s = 0; s < probs.rows(); ++s) {
        int arg = 0;
        for (Index k = 1; k < probs.cols(); ++k) {
          if (probs(s, k) > probs(s, arg)) arg = static_cast<int>(k);
        }
        if (arg == golds[s]) ++hit_sum;
      }
      const auto grads = backward(trace, model, golds, model.config.l2_lambda);
      rmsprop_step(model, grads, state);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = state.learning_rate;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy =
        static_cast<double>(hit_sum) / static_cast<double>(n);
    stats.val_accuracy =
        has_validation ? evaluate_accuracy(model, validation) : 0;
    stats.clamped = clamped;
    if (!std::isfinite(stats.train_loss)) {
      throw NumericError("training loss diverged at epoch " +
                         std::to_string(epoch));
    }
    result.history.push_back(stats);

    if (has_validation) {
      if (stats.val_accuracy > best_val) {
        best_val = stats.val_accuracy;
        best = model;
      }
    } else {
      best = model;
    }
  }
  result.model = std::move(best);
  return result;
}

struct Prediction {
  std::string label;
  int class_index = 0;
  VectorXd probabilities;
};

// Tokenize -> encode -> forward for one document; ties resolve to the lowest
// class index and empty text yields the all-PAD prediction.
template <class Scalar>
Prediction predict(const CnnModel<Scalar>& model, const std::string& text) {
  const auto tokens = tokenize(text, model.tokenizer);
  const auto seq = encode(tokens, model.vocab, model.config.max_len);
  Rng unused(0);
  const Matrix<Scalar> probs = forward(model, {seq}, false, unused);
  Prediction pred;
  pred.probabilities = probs.row(0).template cast<double>().transpose();
  for (Index k = 1; k < probs.cols(); ++k) {
    if (probs(0, k) > probs(0, pred.class_index)) {
      pred.class_index = static_cast<int>(k);
    }
  }
  pred.label = model.labels.name(pred.class_index);
  return pred;
}

}  // namespace icnn
