#pragma once

#include <cstdint>
#include <vector>

#include "icnn/cooccurrence.hpp"
#include "icnn/embedding.hpp"
#include "icnn/types.hpp"

namespace icnn {

struct GloveConfig {
  int dim = 100;
  int epochs = 25;
  double learning_rate = 0.05;
  double x_max = 100.0;
  double alpha = 0.75;
  std::uint64_t seed = 1;
};

// Main and context parameter sets plus per-parameter AdaGrad accumulators
// (initialized at 1, glove.c convention: update with lr * g / sqrt(acc),
// then acc += g^2).
struct GloveParams {
  MatrixXd main_vectors;     // V x d
  MatrixXd context_vectors;  // V x d
  VectorXd main_bias;        // V
  VectorXd context_bias;     // V
  MatrixXd main_vectors_acc;
  MatrixXd context_vectors_acc;
  VectorXd main_bias_acc;
  VectorXd context_bias_acc;
};

GloveParams init_glove_params(int vocab_size, const GloveConfig& cfg);

// Co-occurrence damping weight: (x / x_max)^alpha below the cap, 1 at and
// above it. Throws UsageError when x_max <= 0.
double weight_f(double x, double x_max, double alpha);

// Weighted least-squares cost over the stored cells:
//   J = sum f(X_ij) (w_i . w~_j + b_i + b~_j - ln X_ij)^2
double glove_loss(const GloveParams& params, const CooccurrenceMatrix& X,
                  double x_max, double alpha);

// Analytic gradient of one cell's contribution to J.
struct GloveCellGradient {
  VectorXd d_main;     // dJ_cell / dw_i
  VectorXd d_context;  // dJ_cell / dw~_j
  double d_main_bias;
  double d_context_bias;
};

GloveCellGradient glove_cell_gradient(const GloveParams& params, int i, int j,
                                      double x, double x_max, double alpha);

struct GloveTrainResult {
  EmbeddingTable table;            // rows = main + context vectors, summed
  std::vector<double> epoch_loss;  // per-epoch mean cell loss
};

// Per-cell stochastic AdaGrad over the shuffled nonzero cells. The returned
// table covers the non-reserved vocabulary tokens. Throws NumericError with
// the epoch index if the loss turns non-finite.
GloveTrainResult glove_train(const CooccurrenceMatrix& X,
                             const GloveConfig& cfg);

}  // namespace icnn
