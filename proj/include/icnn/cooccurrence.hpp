#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "icnn/corpus.hpp"

namespace icnn {

// Sparse symmetric word-word context counts. Cells are keyed by the ordered
// index pair; zero counts are never stored.
class CooccurrenceMatrix {
 public:
  struct Cell {
    int row;
    int col;
    double value;
  };

  CooccurrenceMatrix(Vocabulary vocab, int window, bool distance_weighted);

  const Vocabulary& vocab() const { return vocab_; }
  int window() const { return window_; }
  bool distance_weighted() const { return distance_weighted_; }
  bool symmetric() const { return true; }

  std::size_t nonzero_count() const { return cells_.size(); }
  double at(int row, int col) const;
  void add(int row, int col, double amount);

  // All stored cells ordered by (row, col); the deterministic iteration order
  // used by training and loss evaluation.
  std::vector<Cell> sorted_cells() const;

 private:
  static std::uint64_t key(int row, int col) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(row)) << 32) |
           static_cast<std::uint32_t>(col);
  }

  Vocabulary vocab_;
  int window_;
  bool distance_weighted_;
  std::unordered_map<std::uint64_t, double> cells_;
};

// Keeps only in-vocabulary token indices (UNK and PAD positions are dropped);
// window offsets for co-occurrence counting run over this filtered stream.
std::vector<int> map_for_embedding(const std::vector<std::string>& tokens,
                                   const Vocabulary& vocab);

// For every ordered position pair (p, q), 0 < |p - q| <= window, within one
// document, X[w_p][w_q] grows by 1/|p - q| when distance weighting is on,
// else by 1. Symmetric by construction. Throws UsageError when window < 1.
CooccurrenceMatrix build_cooccurrence(const std::vector<std::vector<int>>& docs,
                                      const Vocabulary& vocab, int window,
                                      bool distance_weighting);

}  // namespace icnn
