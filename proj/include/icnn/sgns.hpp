#pragma once

#include <cstdint>
#include <vector>

#include "icnn/corpus.hpp"
#include "icnn/embedding.hpp"
#include "icnn/types.hpp"

namespace icnn {

struct SgnsConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

// Center (input) and context (output) vector sets.
struct SgnsParams {
  MatrixXd center;   // V x d
  MatrixXd context;  // V x d
};

SgnsParams init_sgns_params(int vocab_size, const SgnsConfig& cfg);

// One training step's objective, to be maximized:
//   log sigma(u_o . v_c) + sum_k log sigma(-u_nk . v_c)
double sgns_pair_objective(const SgnsParams& params, int center, int context,
                           const std::vector<int>& negatives);

// Analytic gradient of the pair objective.
struct SgnsPairGradient {
  VectorXd d_center;                  // d objective / d v_c
  VectorXd d_context;                 // d objective / d u_o
  std::vector<VectorXd> d_negatives;  // d objective / d u_nk
};

SgnsPairGradient sgns_pair_gradient(const SgnsParams& params, int center,
                                    int context,
                                    const std::vector<int>& negatives);

// Skip-gram with negative sampling over in-vocabulary token streams (see
// map_for_embedding). Negatives are drawn from the unigram distribution
// raised to 3/4; draws that hit the positive context are skipped. Plain SGD
// ascent at a fixed learning rate. Returns the center-vector table over the
// non-reserved vocabulary tokens.
EmbeddingTable sgns_train(const std::vector<std::vector<int>>& docs,
                          const Vocabulary& vocab, const SgnsConfig& cfg);

}  // namespace icnn
