#include "icnn/glove.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "icnn/common.hpp"
#include "icnn/rng.hpp"

namespace icnn {

double weight_f(double x, double x_max, double alpha) {
  if (x_max <= 0) throw UsageError("weight_f: x_max must be positive");
  if (x < 0) throw UsageError("weight_f: x must be non-negative");
  return x < x_max ? std::pow(x / x_max, alpha) : 1.0;
}

GloveParams init_glove_params(int vocab_size, const GloveConfig& cfg) {
  GloveParams p;
  const double scale = 0.5 / cfg.dim;
  Rng rng(derive_seed(cfg.seed, 0x670eULL));
  auto uniform_matrix = [&](Index rows, Index cols) {
    MatrixXd m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-scale, scale);
    }
    return m;
  };
  auto uniform_vector = [&](Index rows) {
    VectorXd v(rows);
    for (Index r = 0; r < rows; ++r) v(r) = rng.uniform(-scale, scale);
    return v;
  };
  p.main_vectors = uniform_matrix(vocab_size, cfg.dim);
  p.context_vectors = uniform_matrix(vocab_size, cfg.dim);
  p.main_bias = uniform_vector(vocab_size);
  p.context_bias = uniform_vector(vocab_size);
  p.main_vectors_acc = MatrixXd::Ones(vocab_size, cfg.dim);
  p.context_vectors_acc = MatrixXd::Ones(vocab_size, cfg.dim);
  p.main_bias_acc = VectorXd::Ones(vocab_size);
  p.context_bias_acc = VectorXd::Ones(vocab_size);
  return p;
}

namespace {

double cell_residual(const GloveParams& p, int i, int j, double x) {
  return p.main_vectors.row(i).dot(p.context_vectors.row(j)) +
         p.main_bias(i) + p.context_bias(j) - std::log(x);
}

}  // namespace

double glove_loss(const GloveParams& params, const CooccurrenceMatrix& X,
                  double x_max, double alpha) {
  if (!params.main_vectors.allFinite() || !params.context_vectors.allFinite() ||
      !params.main_bias.allFinite() || !params.context_bias.allFinite()) {
    throw NumericError("glove_loss: non-finite parameter");
  }
  double total = 0.0;
  for (const auto& cell : X.sorted_cells()) {
    const double r = cell_residual(params, cell.row, cell.col, cell.value);
    total += weight_f(cell.value, x_max, alpha) * r * r;
  }
  return total;
}

GloveCellGradient glove_cell_gradient(const GloveParams& params, int i, int j,
                                      double x, double x_max, double alpha) {
  const double common =
      2.0 * weight_f(x, x_max, alpha) * cell_residual(params, i, j, x);
  GloveCellGradient g;
  g.d_main = common * params.context_vectors.row(j).transpose();
  g.d_context = common * params.main_vectors.row(i).transpose();
  g.d_main_bias = common;
  g.d_context_bias = common;
  return g;
}

GloveTrainResult glove_train(const CooccurrenceMatrix& X,
                             const GloveConfig& cfg) {
  if (X.nonzero_count() == 0) {
    throw DataError("glove_train: empty co-occurrence matrix");
  }
  const int vocab_size = X.vocab().size();
  GloveParams p = init_glove_params(vocab_size, cfg);
  const auto cells = X.sorted_cells();
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(cfg.seed, 0x5471ULL));

  GloveTrainResult result;
  VectorXd main_row(cfg.dim), context_row(cfg.dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_total = 0.0;
    for (const std::size_t pick : order) {
      const auto& cell = cells[pick];
      const int i = cell.row;
      const int j = cell.col;
      const double f = weight_f(cell.value, cfg.x_max, cfg.alpha);
      const double r = cell_residual(p, i, j, cell.value);
      epoch_total += f * r * r;
      const double common = 2.0 * f * r;
      // Snapshot both rows so each update uses pre-step values.
      main_row = p.main_vectors.row(i);
      context_row = p.context_vectors.row(j);
      for (int k = 0; k < cfg.dim; ++k) {
        const double g_main = common * context_row(k);
        const double g_context = common * main_row(k);
        p.main_vectors(i, k) -=
            cfg.learning_rate * g_main / std::sqrt(p.main_vectors_acc(i, k));
        p.main_vectors_acc(i, k) += g_main * g_main;
        p.context_vectors(j, k) -= cfg.learning_rate * g_context /
                                   std::sqrt(p.context_vectors_acc(j, k));
        p.context_vectors_acc(j, k) += g_context * g_context;
      }
      p.main_bias(i) -=
          cfg.learning_rate * common / std::sqrt(p.main_bias_acc(i));
      p.main_bias_acc(i) += common * common;
      p.context_bias(j) -=
          cfg.learning_rate * common / std::sqrt(p.context_bias_acc(j));
      p.context_bias_acc(j) += common * common;
    }
    const double epoch_mean = epoch_total / static_cast<double>(cells.size());
    if (!std::isfinite(epoch_mean)) {
      throw NumericError("glove_train diverged at epoch " +
                         std::to_string(epoch));
    }
    result.epoch_loss.push_back(epoch_mean);
  }

  // Export W + W~ rows for the non-reserved tokens.
  const int n_tokens = vocab_size - 2;
  std::vector<std::string> tokens(n_tokens);
  MatrixXd vectors(n_tokens, cfg.dim);
  for (int idx = 2; idx < vocab_size; ++idx) {
    tokens[idx - 2] = X.vocab().token_at(idx);
    vectors.row(idx - 2) = p.main_vectors.row(idx) + p.context_vectors.row(idx);
  }
  result.table = EmbeddingTable(std::move(tokens), std::move(vectors));
  return result;
}

}  // namespace icnn
