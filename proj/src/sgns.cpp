#include "icnn/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icnn/common.hpp"
#include "icnn/rng.hpp"

namespace icnn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SgnsParams init_sgns_params(int vocab_size, const SgnsConfig& cfg) {
  SgnsParams p;
  const double scale = 0.5 / cfg.dim;
  Rng rng(derive_seed(cfg.seed, 0x59a5ULL));
  p.center.resize(vocab_size, cfg.dim);
  for (Index r = 0; r < p.center.rows(); ++r) {
    for (Index c = 0; c < p.center.cols(); ++c) {
      p.center(r, c) = rng.uniform(-scale, scale);
    }
  }
  // Zero-initialized output vectors, word2vec convention.
  p.context = MatrixXd::Zero(vocab_size, cfg.dim);
  return p;
}

double sgns_pair_objective(const SgnsParams& params, int center, int context,
                           const std::vector<int>& negatives) {
  const auto v_c = params.center.row(center);
  double obj = std::log(sigmoid(params.context.row(context).dot(v_c)));
  for (const int n : negatives) {
    obj += std::log(sigmoid(-params.context.row(n).dot(v_c)));
  }
  return obj;
}

SgnsPairGradient sgns_pair_gradient(const SgnsParams& params, int center,
                                    int context,
                                    const std::vector<int>& negatives) {
  const auto v_c = params.center.row(center);
  SgnsPairGradient g;
  const double s_pos = sigmoid(params.context.row(context).dot(v_c));
  g.d_context = (1.0 - s_pos) * v_c.transpose();
  g.d_center = (1.0 - s_pos) * params.context.row(context).transpose();
  for (const int n : negatives) {
    const double s_neg = sigmoid(params.context.row(n).dot(v_c));
    g.d_negatives.push_back(-s_neg * v_c.transpose());
    g.d_center -= s_neg * params.context.row(n).transpose();
  }
  return g;
}

namespace {

// Cumulative unigram^(3/4) distribution over vocabulary indices with nonzero
// corpus counts.
struct NegativeSampler {
  std::vector<int> indices;
  std::vector<double> cumulative;

  NegativeSampler(const std::vector<std::vector<int>>& docs, int vocab_size) {
    std::vector<std::int64_t> counts(vocab_size, 0);
    for (const auto& doc : docs) {
      for (const int idx : doc) ++counts[idx];
    }
    double total = 0.0;
    for (int i = 0; i < vocab_size; ++i) {
      if (counts[i] <= 0) continue;
      total += std::pow(static_cast<double>(counts[i]), 0.75);
      indices.push_back(i);
      cumulative.push_back(total);
    }
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative.back();
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto pos = std::min<std::size_t>(it - cumulative.begin(),
                                           cumulative.size() - 1);
    return indices[pos];
  }
};

}  // namespace

EmbeddingTable sgns_train(const std::vector<std::vector<int>>& docs,
                          const Vocabulary& vocab, const SgnsConfig& cfg) {
  if (cfg.negatives < 1) throw UsageError("sgns: negatives must be >= 1");
  if (cfg.window < 1) throw UsageError("sgns: window must be >= 1");
  NegativeSampler sampler(docs, vocab.size());
  if (sampler.indices.empty()) {
    throw DataError("sgns_train: no in-vocabulary tokens");
  }
  SgnsParams p = init_sgns_params(vocab.size(), cfg);
  Rng rng(derive_seed(cfg.seed, 0x931dULL));

  const int dim = cfg.dim;
  VectorXd center_grad(dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& doc : docs) {
      const int n = static_cast<int>(doc.size());
      for (int pos = 0; pos < n; ++pos) {
        const int center = doc[pos];
        const int lo = std::max(0, pos - cfg.window);
        const int hi = std::min(n - 1, pos + cfg.window);
        for (int q = lo; q <= hi; ++q) {
          if (q == pos) continue;
          const int context = doc[q];
          center_grad.setZero();
          // Positive pair.
          {
            const double s =
                sigmoid(p.context.row(context).dot(p.center.row(center)));
            const double coef = cfg.learning_rate * (1.0 - s);
            center_grad += (1.0 - s) * p.context.row(context).transpose();
            p.context.row(context) += coef * p.center.row(center);
          }
          // Negative draws; a draw equal to the positive context is skipped.
          for (int k = 0; k < cfg.negatives; ++k) {
            const int neg = sampler.draw(rng);
            if (neg == context) continue;
            const double s = sigmoid(p.context.row(neg).dot(p.center.row(center)));
            center_grad -= s * p.context.row(neg).transpose();
            p.context.row(neg) -= cfg.learning_rate * s * p.center.row(center);
          }
          p.center.row(center) += cfg.learning_rate * center_grad.transpose();
        }
      }
    }
    if (!p.center.allFinite() || !p.context.allFinite()) {
      throw NumericError("sgns_train diverged at epoch " +
                         std::to_string(epoch));
    }
  }

  const int n_tokens = vocab.size() - 2;
  std::vector<std::string> tokens(n_tokens);
  MatrixXd vectors(n_tokens, dim);
  for (int idx = 2; idx < vocab.size(); ++idx) {
    tokens[idx - 2] = vocab.token_at(idx);
    vectors.row(idx - 2) = p.center.row(idx);
  }
  return EmbeddingTable(std::move(tokens), std::move(vectors));
}

}  // namespace icnn
