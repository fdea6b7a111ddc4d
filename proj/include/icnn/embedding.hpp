#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "icnn/types.hpp"

namespace icnn {

// Dense word vectors with a token -> row map. Rows are unique per token and
// finite.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, MatrixXd vectors);

  int size() const { return static_cast<int>(tokens_.size()); }
  int dim() const { return static_cast<int>(vectors_.cols()); }

  // Returns -1 for unknown tokens.
  int row_of(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  const MatrixXd& vectors() const { return vectors_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> rows_;
  MatrixXd vectors_;
};

// Text vector format: one line per token, the token then dim floats, all
// single-space separated. Duplicate tokens and inconsistent dimensions raise
// DataError with the offending line number.
EmbeddingTable load_pretrained(const std::string& path);

// Writes the matching text format at 6 significant digits.
void save_embeddings(const EmbeddingTable& table, const std::string& path);

// Cosine-ranked neighbors, excluding the query token itself. Unknown tokens
// raise DataError naming the token.
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const EmbeddingTable& table, const std::string& token, int k);

// argmax_t cosine(v_t, v_b - v_a + v_c), excluding a, b and c.
std::string analogy(const EmbeddingTable& table, const std::string& a,
                    const std::string& b, const std::string& c);

}  // namespace icnn
