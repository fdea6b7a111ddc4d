#include "icnn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "icnn/common.hpp"
#include "icnn/rng.hpp"

namespace icnn {

LabelSet::LabelSet(std::vector<std::string> labels) : names_(std::move(labels)) {
  if (names_.size() < 2) {
    throw UsageError("label set needs at least 2 classes");
  }
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw UsageError("duplicate label name: " + names_[i]);
    }
  }
}

LabelSet LabelSet::default_intents() {
  return LabelSet({"hiring", "sales", "service", "vendor"});
}

int LabelSet::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

nlohmann::json LabelSet::to_json() const { return names_; }

LabelSet LabelSet::from_json(const nlohmann::json& j) {
  return LabelSet(j.get<std::vector<std::string>>());
}

const std::string& Vocabulary::pad_token() {
  static const std::string token = "<pad>";
  return token;
}

const std::string& Vocabulary::unk_token() {
  static const std::string token = "<unk>";
  return token;
}

Vocabulary::Vocabulary() : Vocabulary({}, {}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       std::vector<std::int64_t> frequencies) {
  if (tokens.size() != frequencies.size()) {
    throw UsageError("vocabulary tokens/frequencies size mismatch");
  }
  index_to_token_ = {pad_token(), unk_token()};
  frequencies_ = {0, 0};
  index_to_token_.insert(index_to_token_.end(), tokens.begin(), tokens.end());
  frequencies_.insert(frequencies_.end(), frequencies.begin(),
                      frequencies.end());
  for (int i = 0; i < static_cast<int>(index_to_token_.size()); ++i) {
    if (!token_to_index_.emplace(index_to_token_[i], i).second) {
      throw DataError("duplicate vocabulary token: " + index_to_token_[i]);
    }
  }
}

int Vocabulary::index_of(const std::string& token) const {
  auto it = token_to_index_.find(token);
  return it == token_to_index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_index_.count(token) > 0;
}

const std::string& Vocabulary::token_at(int index) const {
  return index_to_token_.at(index);
}

nlohmann::json Vocabulary::to_json() const {
  std::vector<std::string> tokens(index_to_token_.begin() + 2,
                                  index_to_token_.end());
  std::vector<std::int64_t> freqs(frequencies_.begin() + 2,
                                  frequencies_.end());
  return nlohmann::json{{"tokens", tokens}, {"frequencies", freqs}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  return Vocabulary(j.at("tokens").get<std::vector<std::string>>(),
                    j.at("frequencies").get<std::vector<std::int64_t>>());
}

void tokenize_documents(std::vector<Document>& docs,
                        const TokenizerConfig& cfg) {
  for (auto& doc : docs) doc.tokens = tokenize(doc.text, cfg);
}

Vocabulary build_vocabulary(const std::vector<Document>& docs,
                            std::int64_t min_count) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& doc : docs) {
    for (const auto& token : doc.tokens) ++counts[token];
  }
  // Descending frequency, lexicographic tie-break.
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) {
    throw DataError("no token reaches min_count " + std::to_string(min_count));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens;
  std::vector<std::int64_t> freqs;
  tokens.reserve(kept.size());
  freqs.reserve(kept.size());
  for (auto& [token, count] : kept) {
    tokens.push_back(std::move(token));
    freqs.push_back(count);
  }
  return Vocabulary(std::move(tokens), std::move(freqs));
}

std::vector<int> encode(const std::vector<std::string>& tokens,
                        const Vocabulary& vocab, int max_len) {
  if (max_len < 1) throw UsageError("max_len must be >= 1");
  std::vector<int> out(max_len, Vocabulary::kPadIndex);
  const int n = std::min<int>(max_len, static_cast<int>(tokens.size()));
  for (int i = 0; i < n; ++i) out[i] = vocab.index_of(tokens[i]);
  return out;
}

std::vector<std::string> decode(const std::vector<int>& indices,
                                const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (int idx : indices) out.push_back(vocab.token_at(idx));
  return out;
}

std::vector<Document> load_dataset(const std::string& path,
                                   const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  std::vector<Document> docs;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": malformed JSON at line " +
                      std::to_string(line_no) + ": " + e.what());
    }
    Document doc;
    if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
        !j.at("id").is_string() || !j.at("text").is_string()) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      " must be an object with string \"id\" and \"text\"");
    }
    doc.id = j.at("id").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    if (j.contains("label") && !j.at("label").is_null()) {
      auto label = j.at("label").get<std::string>();
      if (labels.index_of(label) < 0) {
        throw DataError(path + ": line " + std::to_string(line_no) +
                        ": unknown label \"" + label + "\"");
      }
      doc.label = std::move(label);
    }
    if (!seen_ids.insert(doc.id).second) {
      throw DataError(path + ": line " + std::to_string(line_no) +
                      ": duplicate document id \"" + doc.id + "\"");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void save_dataset(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path);
  for (const auto& doc : docs) {
    nlohmann::json j{{"id", doc.id}, {"text", doc.text}};
    if (doc.label) j["label"] = *doc.label;
    out << j.dump() << "\n";
  }
}

DatasetSplit split_dataset(const std::vector<Document>& docs,
                           const SplitRatios& ratios, std::uint64_t seed) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw UsageError("split ratios must sum to 1");
  }
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0) {
    throw UsageError("split ratios must be non-negative");
  }
  // Group per class, preserving input order inside each group.
  std::map<std::string, std::vector<const Document*>> per_class;
  for (const auto& doc : docs) {
    if (!doc.label) {
      throw DataError("stratified split requires a label on every document "
                      "(missing on id \"" + doc.id + "\")");
    }
    per_class[*doc.label].push_back(&doc);
  }
  DatasetSplit split;
  Rng rng(seed);
  for (auto& [label, group] : per_class) {
    rng.shuffle(group);
    const auto n = static_cast<double>(group.size());
    // Cumulative rounding keeps every segment within +-1 of ratio * n.
    const std::size_t b1 =
        static_cast<std::size_t>(std::llround(n * ratios.train));
    const std::size_t b2 = static_cast<std::size_t>(
        std::llround(n * (ratios.train + ratios.validation)));
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i < b1) {
        split.train.push_back(*group[i]);
      } else if (i < b2) {
        split.validation.push_back(*group[i]);
      } else {
        split.test.push_back(*group[i]);
      }
    }
  }
  return split;
}

}  // namespace icnn
