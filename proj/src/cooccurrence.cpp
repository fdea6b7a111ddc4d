#include "icnn/cooccurrence.hpp"

#include <algorithm>
#include <cstdlib>

#include "icnn/common.hpp"

namespace icnn {

CooccurrenceMatrix::CooccurrenceMatrix(Vocabulary vocab, int window,
                                       bool distance_weighted)
    : vocab_(std::move(vocab)),
      window_(window),
      distance_weighted_(distance_weighted) {
  if (window_ < 1) throw UsageError("co-occurrence window must be >= 1");
}

double CooccurrenceMatrix::at(int row, int col) const {
  auto it = cells_.find(key(row, col));
  return it == cells_.end() ? 0.0 : it->second;
}

void CooccurrenceMatrix::add(int row, int col, double amount) {
  cells_[key(row, col)] += amount;
}

std::vector<CooccurrenceMatrix::Cell> CooccurrenceMatrix::sorted_cells() const {
  std::vector<Cell> cells;
  cells.reserve(cells_.size());
  for (const auto& [k, value] : cells_) {
    cells.push_back({static_cast<int>(k >> 32),
                     static_cast<int>(k & 0xffffffffULL), value});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return cells;
}

std::vector<int> map_for_embedding(const std::vector<std::string>& tokens,
                                   const Vocabulary& vocab) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    const int idx = vocab.index_of(token);
    if (idx > Vocabulary::kUnkIndex) out.push_back(idx);
  }
  return out;
}

CooccurrenceMatrix build_cooccurrence(const std::vector<std::vector<int>>& docs,
                                      const Vocabulary& vocab, int window,
                                      bool distance_weighting) {
  CooccurrenceMatrix matrix(vocab, window, distance_weighting);
  for (const auto& doc : docs) {
    const int n = static_cast<int>(doc.size());
    for (int p = 0; p < n; ++p) {
      const int hi = std::min(n - 1, p + window);
      for (int q = p + 1; q <= hi; ++q) {
        const double amount = distance_weighting ? 1.0 / (q - p) : 1.0;
        matrix.add(doc[p], doc[q], amount);
        matrix.add(doc[q], doc[p], amount);
      }
    }
  }
  return matrix;
}

}  // namespace icnn
