#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "icnn/corpus.hpp"

namespace icnn {

// Sparse (column, value) pairs sorted by column.
struct SparseDocVector {
  std::vector<std::pair<int, double>> entries;
};

enum class BowMode { kBinary, kTfidf };

// All n-grams of the token list for n in [n_min, n_max], each joined with a
// single space, in document order.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int n_min, int n_max);

// Augmented term frequency: 0.5 + 0.5 * f(t,d) / max_t' f(t',d), with the
// maximum taken over all n-grams of the document. Throws DataError when the
// document has no n-grams.
double term_frequency(const std::string& feature,
                      const std::vector<std::string>& tokens, int n_min,
                      int n_max);

// log(N / (df + 1)), natural logarithm; df = 0 yields log N.
double inverse_document_frequency(const std::string& feature,
                                  const std::vector<Document>& corpus,
                                  int n_min, int n_max);

// N-gram feature space fitted on training documents. Columns follow the
// lexicographic order of the feature strings; each column carries the idf
// computed over the fit corpus.
class NgramFeatureSpace {
 public:
  NgramFeatureSpace() = default;

  static NgramFeatureSpace fit(const std::vector<Document>& docs, int n_min,
                               int n_max);

  int feature_count() const { return static_cast<int>(idf_.size()); }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }

  // Returns -1 for features unseen at fit time.
  int column_of(const std::string& feature) const;
  double idf(int column) const { return idf_.at(column); }

  nlohmann::json to_json() const;
  static NgramFeatureSpace from_json(const nlohmann::json& j);

 private:
  std::map<std::string, int> columns_;
  std::vector<double> idf_;
  int n_min_ = 1;
  int n_max_ = 1;
};

// Binary mode emits 1 per present feature; tf-idf mode emits the Eq 1 x Eq 2
// product. Features unseen at fit time are dropped; an empty document yields
// an empty vector.
std::vector<SparseDocVector> vectorize(const std::vector<Document>& docs,
                                       const NgramFeatureSpace& space,
                                       BowMode mode);

}  // namespace icnn
