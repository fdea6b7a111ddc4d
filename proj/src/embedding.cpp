#include "icnn/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "icnn/common.hpp"

namespace icnn {

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens,
                               MatrixXd vectors)
    : tokens_(std::move(tokens)), vectors_(std::move(vectors)) {
  if (static_cast<Index>(tokens_.size()) != vectors_.rows()) {
    throw UsageError("embedding table rows do not match token count");
  }
  if (!vectors_.allFinite()) {
    throw NumericError("embedding table contains non-finite values");
  }
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    if (!rows_.emplace(tokens_[i], i).second) {
      throw DataError("duplicate token in embedding table: " + tokens_[i]);
    }
  }
}

int EmbeddingTable::row_of(const std::string& token) const {
  auto it = rows_.find(token);
  return it == rows_.end() ? -1 : it->second;
}

EmbeddingTable load_pretrained(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": malformed float");
    }
    if (token.empty() || values.empty()) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": expected a token and at least one float");
    }
    if (dim < 0) {
      dim = static_cast<int>(values.size());
    } else if (static_cast<int>(values.size()) != dim) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": dimension " + std::to_string(values.size()) +
                      " differs from first line's " + std::to_string(dim));
    }
    tokens.push_back(std::move(token));
    rows.push_back(std::move(values));
  }
  if (tokens.empty()) {
    throw DataError(path + ": embedding file has no vectors");
  }
  MatrixXd vectors(static_cast<Index>(rows.size()), dim);
  for (Index i = 0; i < vectors.rows(); ++i) {
    for (Index j = 0; j < dim; ++j) vectors(i, j) = rows[i][j];
  }
  return EmbeddingTable(std::move(tokens), std::move(vectors));
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file: " + path);
  char buf[64];
  for (int i = 0; i < table.size(); ++i) {
    out << table.tokens()[i];
    for (int j = 0; j < table.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.6g", table.vectors()(i, j));
      out << ' ' << buf;
    }
    out << '\n';
  }
}

namespace {

double cosine(const RowVector<double>& a, const RowVector<double>& b) {
  const double denom = a.norm() * b.norm();
  return denom == 0.0 ? 0.0 : a.dot(b) / denom;
}

int require_row(const EmbeddingTable& table, const std::string& token) {
  const int row = table.row_of(token);
  if (row < 0) throw DataError("token not in embedding table: " + token);
  return row;
}

}  // namespace

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const EmbeddingTable& table, const std::string& token, int k) {
  const int query = require_row(table, token);
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(table.size());
  const RowVector<double> q = table.vectors().row(query);
  for (int i = 0; i < table.size(); ++i) {
    if (i == query) continue;
    scored.emplace_back(table.tokens()[i], cosine(q, table.vectors().row(i)));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  if (k < static_cast<int>(scored.size())) scored.resize(k);
  return scored;
}

std::string analogy(const EmbeddingTable& table, const std::string& a,
                    const std::string& b, const std::string& c) {
  const int ra = require_row(table, a);
  const int rb = require_row(table, b);
  const int rc = require_row(table, c);
  const RowVector<double> target = table.vectors().row(rb) -
                                   table.vectors().row(ra) +
                                   table.vectors().row(rc);
  int best = -1;
  double best_score = 0.0;
  for (int i = 0; i < table.size(); ++i) {
    if (i == ra || i == rb || i == rc) continue;
    const double score = cosine(target, table.vectors().row(i));
    if (best < 0 || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  if (best < 0) throw DataError("analogy needs at least one candidate token");
  return table.tokens()[best];
}

}  // namespace icnn
