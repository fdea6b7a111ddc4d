#include "icnn/bow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "icnn/common.hpp"

namespace icnn {

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) {
    throw UsageError("invalid n-gram range [" + std::to_string(n_min) + ", " +
                     std::to_string(n_max) + "]");
  }
  std::vector<std::string> grams;
  for (int n = n_min; n <= n_max; ++n) {
    if (static_cast<int>(tokens.size()) < n) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (int k = 1; k < n; ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

namespace {

std::map<std::string, std::int64_t> ngram_counts(
    const std::vector<std::string>& tokens, int n_min, int n_max) {
  std::map<std::string, std::int64_t> counts;
  for (auto& gram : extract_ngrams(tokens, n_min, n_max)) ++counts[gram];
  return counts;
}

double augmented_tf(std::int64_t count, std::int64_t max_count) {
  return 0.5 + 0.5 * (static_cast<double>(count) /
                      static_cast<double>(max_count));
}

}  // namespace

double term_frequency(const std::string& feature,
                      const std::vector<std::string>& tokens, int n_min,
                      int n_max) {
  const auto counts = ngram_counts(tokens, n_min, n_max);
  if (counts.empty()) {
    throw DataError("term_frequency on a document with no features");
  }
  auto it = counts.find(feature);
  if (it == counts.end()) {
    throw DataError("term_frequency: feature \"" + feature +
                    "\" does not occur in the document");
  }
  std::int64_t max_count = 0;
  for (const auto& [gram, count] : counts) max_count = std::max(max_count, count);
  return augmented_tf(it->second, max_count);
}

double inverse_document_frequency(const std::string& feature,
                                  const std::vector<Document>& corpus,
                                  int n_min, int n_max) {
  if (corpus.empty()) throw DataError("idf over an empty corpus");
  std::int64_t df = 0;
  for (const auto& doc : corpus) {
    const auto grams = extract_ngrams(doc.tokens, n_min, n_max);
    if (std::find(grams.begin(), grams.end(), feature) != grams.end()) ++df;
  }
  return std::log(static_cast<double>(corpus.size()) /
                  static_cast<double>(df + 1));
}

NgramFeatureSpace NgramFeatureSpace::fit(const std::vector<Document>& docs,
                                         int n_min, int n_max) {
  if (n_min < 1 || n_max > 3 || n_min > n_max) {
    throw UsageError("n-gram orders must satisfy 1 <= n_min <= n_max <= 3");
  }
  NgramFeatureSpace space;
  space.n_min_ = n_min;
  space.n_max_ = n_max;
  // Document frequency per feature; map keys double as the lexicographic
  // column order.
  std::map<std::string, std::int64_t> df;
  for (const auto& doc : docs) {
    std::set<std::string> seen;
    for (auto& gram : extract_ngrams(doc.tokens, n_min, n_max)) {
      seen.insert(std::move(gram));
    }
    for (const auto& gram : seen) ++df[gram];
  }
  const auto n_docs = static_cast<double>(docs.size());
  int column = 0;
  for (const auto& [feature, count] : df) {
    space.columns_.emplace(feature, column++);
    space.idf_.push_back(std::log(n_docs / static_cast<double>(count + 1)));
  }
  return space;
}

int NgramFeatureSpace::column_of(const std::string& feature) const {
  auto it = columns_.find(feature);
  return it == columns_.end() ? -1 : it->second;
}

nlohmann::json NgramFeatureSpace::to_json() const {
  nlohmann::json features = nlohmann::json::object();
  for (const auto& [feature, column] : columns_) features[feature] = column;
  return nlohmann::json{{"n_min", n_min_},
                        {"n_max", n_max_},
                        {"features", features},
                        {"idf", idf_}};
}

NgramFeatureSpace NgramFeatureSpace::from_json(const nlohmann::json& j) {
  NgramFeatureSpace space;
  space.n_min_ = j.at("n_min").get<int>();
  space.n_max_ = j.at("n_max").get<int>();
  space.idf_ = j.at("idf").get<std::vector<double>>();
  for (const auto& [feature, column] : j.at("features").items()) {
    space.columns_.emplace(feature, column.get<int>());
  }
  return space;
}

std::vector<SparseDocVector> vectorize(const std::vector<Document>& docs,
                                       const NgramFeatureSpace& space,
                                       BowMode mode) {
  std::vector<SparseDocVector> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    SparseDocVector vec;
    const auto counts = ngram_counts(doc.tokens, space.n_min(), space.n_max());
    std::int64_t max_count = 0;
    for (const auto& [gram, count] : counts) {
      max_count = std::max(max_count, count);
    }
    for (const auto& [gram, count] : counts) {
      const int column = space.column_of(gram);
      if (column < 0) continue;  // unseen at fit time
      const double value = mode == BowMode::kBinary
                               ? 1.0
                               : augmented_tf(count, max_count) *
                                     space.idf(column);
      vec.entries.emplace_back(column, value);
    }
    std::sort(vec.entries.begin(), vec.entries.end());
    out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace icnn
