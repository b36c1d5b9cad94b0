#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vardf/errors.hpp"

namespace vardf {

inline constexpr bool is_term_char(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

inline constexpr char to_lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Lowercase and split on any non-alphanumeric byte; empty fragments are
// dropped, order and duplicates preserved. Total function.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  for (char c : text) {
    if (is_term_char(c)) {
      current.push_back(to_lower_ascii(c));
    } else if (!current.empty()) {
      terms.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

// A set of normalized words excluded from term extraction. Lookup is
// exact-match; entries are normalized on insertion.
class stop_word_list {
public:
  stop_word_list() = default;

  stop_word_list(std::initializer_list<const char*> words) {
    for (const char* w : words) insert(w);
  }

  // Normalizes the word (or line) and inserts every resulting token.
  void insert(std::string_view word) {
    for (auto& t : tokenize(word)) words_.insert(std::move(t));
  }

  bool contains(const std::string& term) const { return words_.count(term) > 0; }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::set<std::string>& words() const { return words_; }

  bool operator==(const stop_word_list&) const = default;

  // The built-in list: common English function words plus honorifics.
  // Identical content ships as data/stopwords.txt for use via --stopwords.
  static const stop_word_list& defaults() {
    static const stop_word_list list = {
        // pronouns and anaphors
        "we", "she", "he", "his", "her", "hers", "its", "it", "i", "me", "my",
        "you", "your", "yours", "they", "them", "their", "theirs", "this",
        "that", "these", "those", "who", "whom", "whose", "which", "what",
        "him", "himself", "herself", "itself", "myself", "yourself",
        "ourselves", "themselves", "our", "ours", "us",
        // verbs and auxiliaries
        "is", "were", "are", "was", "did", "do", "does", "doing", "be",
        "been", "being", "has", "have", "had", "having", "can", "will",
        "would", "should", "could", "may", "might", "must", "shall", "am",
        // honorifics
        "dr", "ms", "mrs", "mr",
        // conjunctions
        "but", "and", "or", "so", "nor", "yet", "if", "because", "while",
        "although", "than", "then", "when", "where", "why", "how",
        // prepositions
        "in", "on", "near", "far", "of", "for", "by", "to", "with", "at",
        "from", "into", "onto", "over", "under", "about", "above", "below",
        "between", "through", "during", "before", "after", "against", "up",
        "down", "out", "off",
        // articles and other function words
        "a", "an", "the", "as", "all", "any", "both", "each", "few", "more",
        "most", "other", "some", "such", "no", "not", "only", "own", "same",
        "too", "very", "just", "there", "here", "again", "further", "once",
        "until", "now",
    };
    return list;
  }

  // One word per line, UTF-8; lines starting with '#' are ignored.
  static stop_word_list load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open stop-word list: " + path.string());
    stop_word_list list;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.front() == '#') continue;
      list.insert(line);
    }
    return list;
  }

private:
  std::set<std::string> words_;
};

// Filters stop words out of an already-normalized term sequence, preserving
// relative order.
inline std::vector<std::string> remove_stop_words(std::vector<std::string> terms,
                                                  const stop_word_list& stops) {
  std::erase_if(terms, [&](const std::string& t) { return stops.contains(t); });
  return terms;
}

}  // namespace vardf
