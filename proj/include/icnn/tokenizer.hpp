#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace icnn {

// Tokenization settings. The stopword list is carried here but only applied
// when remove_stopwords is set; the bag-of-words pipeline turns it on, the
// convolutional pipeline keeps the token order intact and leaves it off.
struct TokenizerConfig {
  bool lowercase = true;
  bool strip_non_alnum = true;
  bool remove_stopwords = false;
  int min_token_length = 1;
  std::set<std::string> stopwords;

  static TokenizerConfig defaults();

  nlohmann::json to_json() const;
  static TokenizerConfig from_json(const nlohmann::json& j);
};

// Common English stopwords.
const std::set<std::string>& default_english_stopwords();

// Splits on whitespace, then applies lowercasing, punctuation stripping,
// minimum-length and stopword filters per cfg. Bytes >= 0x80 are kept as-is
// so multi-byte UTF-8 sequences survive untouched. Pure and deterministic;
// empty input yields an empty list.
std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizerConfig& cfg);

}  // namespace icnn
