#include "icnn/tokenizer.hpp"

#include <cctype>

namespace icnn {

const std::set<std::string>& default_english_stopwords() {
  static const std::set<std::string> words = {
      "a",       "about",   "above",  "after",   "again",   "against",
      "all",     "am",      "an",     "and",     "any",     "are",
      "as",      "at",      "be",     "because", "been",    "before",
      "being",   "below",   "between","both",    "but",     "by",
      "can",     "did",     "do",     "does",    "doing",   "down",
      "during",  "each",    "few",    "for",     "from",    "further",
      "had",     "has",     "have",   "having",  "he",      "her",
      "here",    "hers",    "herself","him",     "himself", "his",
      "how",     "i",       "if",     "in",      "into",    "is",
      "it",      "its",     "itself", "just",    "me",      "more",
      "most",    "my",      "myself", "no",      "nor",     "not",
      "now",     "of",      "off",    "on",      "once",    "only",
      "or",      "other",   "our",    "ours",    "ourselves","out",
      "over",    "own",     "same",   "she",     "should",  "so",
      "some",    "such",    "than",   "that",    "the",     "their",
      "theirs",  "them",    "themselves","then", "there",   "these",
      "they",    "this",    "those",  "through", "to",      "too",
      "under",   "until",   "up",     "very",    "was",     "we",
      "were",    "what",    "when",   "where",   "which",   "while",
      "who",     "whom",    "why",    "will",    "with",    "you",
      "your",    "yours",   "yourself","yourselves"};
  return words;
}

TokenizerConfig TokenizerConfig::defaults() {
  TokenizerConfig cfg;
  cfg.stopwords = default_english_stopwords();
  return cfg;
}

nlohmann::json TokenizerConfig::to_json() const {
  return nlohmann::json{{"lowercase", lowercase},
                        {"strip_non_alnum", strip_non_alnum},
                        {"remove_stopwords", remove_stopwords},
                        {"min_token_length", min_token_length},
                        {"stopwords", stopwords}};
}

TokenizerConfig TokenizerConfig::from_json(const nlohmann::json& j) {
  TokenizerConfig cfg;
  cfg.lowercase = j.at("lowercase").get<bool>();
  cfg.strip_non_alnum = j.at("strip_non_alnum").get<bool>();
  cfg.remove_stopwords = j.at("remove_stopwords").get<bool>();
  cfg.min_token_length = j.at("min_token_length").get<int>();
  cfg.stopwords = j.at("stopwords").get<std::set<std::string>>();
  return cfg;
}

namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_token_char(unsigned char c, bool strip_non_alnum) {
  if (c >= 0x80) return true;  // part of a multi-byte UTF-8 sequence
  if (std::isalnum(c)) return true;
  return !strip_non_alnum && !is_ascii_space(c);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    std::string token = std::move(current);
    current.clear();
    if (static_cast<int>(token.size()) < cfg.min_token_length) return;
    if (cfg.remove_stopwords && cfg.stopwords.count(token)) return;
    out.push_back(std::move(token));
  };
  for (unsigned char c : text) {
    if (is_token_char(c, cfg.strip_non_alnum)) {
      current.push_back(cfg.lowercase && c < 0x80
                            ? static_cast<char>(std::tolower(c))
                            : static_cast<char>(c));
    } else if (is_ascii_space(c)) {
      flush();
    }
    // other bytes (stripped punctuation) end nothing: "don't" -> "dont"
  }
  flush();
  return out;
}

}  // namespace icnn
