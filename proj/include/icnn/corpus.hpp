#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "icnn/tokenizer.hpp"

namespace icnn {

// One caller-channel transcript, optionally labeled with its intent.
struct Document {
  std::string id;
  std::optional<std::string> label;
  std::string text;
  std::vector<std::string> tokens;  // populated by tokenize_documents
};

// Ordered class names; the ordering fixes class indices and the output-layer
// neuron order.
class LabelSet {
 public:
  explicit LabelSet(std::vector<std::string> labels);

  static LabelSet default_intents();  // hiring, sales, service, vendor

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int k) const { return names_.at(k); }

  // Returns -1 for unknown labels.
  int index_of(const std::string& label) const;

  bool operator==(const LabelSet& other) const { return names_ == other.names_; }

  nlohmann::json to_json() const;
  static LabelSet from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

// Bidirectional token <-> index map with reserved PAD (0) and UNK (1) slots.
class Vocabulary {
 public:
  static constexpr int kPadIndex = 0;
  static constexpr int kUnkIndex = 1;
  static const std::string& pad_token();  // "<pad>"
  static const std::string& unk_token();  // "<unk>"

  Vocabulary();
  // tokens/frequencies cover the non-reserved entries, in index order.
  Vocabulary(std::vector<std::string> tokens,
             std::vector<std::int64_t> frequencies);

  int size() const { return static_cast<int>(index_to_token_.size()); }

  // Returns kUnkIndex for tokens not in the vocabulary.
  int index_of(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::string& token_at(int index) const;
  std::int64_t frequency(int index) const { return frequencies_.at(index); }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  std::unordered_map<std::string, int> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::vector<std::int64_t> frequencies_;
};

void tokenize_documents(std::vector<Document>& docs,
                        const TokenizerConfig& cfg);

// Builds a vocabulary over tokens with corpus frequency >= min_count.
// Indices are assigned by descending frequency, ties broken lexicographically.
// Throws DataError when no token survives.
Vocabulary build_vocabulary(const std::vector<Document>& docs,
                            std::int64_t min_count);

// Fixed-length integer encoding: unknown tokens map to UNK, sequences longer
// than max_len keep the head, shorter ones are right-padded with PAD.
std::vector<int> encode(const std::vector<std::string>& tokens,
                        const Vocabulary& vocab, int max_len);

std::vector<std::string> decode(const std::vector<int>& indices,
                                const Vocabulary& vocab);

// Reads a JSON-lines dataset ({"id", "label"?, "text"} per line). Labels are
// validated against the given set; malformed lines and unknown labels raise
// DataError naming the line.
std::vector<Document> load_dataset(const std::string& path,
                                   const LabelSet& labels);

void save_dataset(const std::string& path, const std::vector<Document>& docs);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
};

// Seeded deterministic shuffle followed by a per-class stratified split;
// every class is divided by the same ratios (counts within +-1 of
// ratio * class size). All documents must be labeled.
DatasetSplit split_dataset(const std::vector<Document>& docs,
                           const SplitRatios& ratios, std::uint64_t seed);

}  // namespace icnn
