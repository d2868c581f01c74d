#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "finelens/corpus.hpp"

namespace finelens {

// The twelve most frequent tokens of the original decision corpus.
const std::vector<std::string>& default_custom_stopwords();

struct Lexicon {
  std::unordered_set<std::string> dictionary;
  std::unordered_map<std::string, std::string> lemma_map;
  std::unordered_set<std::string> standard_stopwords;
  std::unordered_set<std::string> custom_stopwords{default_custom_stopwords().begin(),
                                                   default_custom_stopwords().end()};

  bool is_stopword(const std::string& w) const {
    return standard_stopwords.contains(w) || custom_stopwords.contains(w);
  }
  const std::string& lemma(const std::string& w) const {
    auto it = lemma_map.find(w);
    return it == lemma_map.end() ? w : it->second;
  }

  // Lowercase entries; lemma targets must be dictionary words or identical to the key.
  void validate() const;

  /// Loads dictionary.txt, lemmas.tsv, stopwords.txt and custom_stopwords.txt
  /// from `dir`. A missing custom_stopwords.txt keeps the default twelve terms;
  /// the other three files are required.
  static Lexicon load(const std::filesystem::path& dir);
};

struct PrepConfig {
  int min_token_len = 3;
  int max_token_len = 20;
  int min_corpus_count = 3;

  void validate() const;
};

struct TokenizedDoc {
  std::string case_id;
  std::vector<std::string> lemmas;

  bool operator==(const TokenizedDoc&) const = default;
};

// Steps (a)-(b): ASCII lowercase, split on every character that is not an
// ASCII letter or digit. Bytes >= 0x80 stay inside tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Document-level steps (a)-(f). Corpus-level step (g) is prune_rare_terms.
std::vector<std::string> preprocess_document(std::string_view text, const Lexicon& lexicon,
                                             const PrepConfig& config);

/// Drops every lemma whose total corpus count is below config.min_corpus_count.
std::vector<TokenizedDoc> prune_rare_terms(std::vector<TokenizedDoc> docs, const PrepConfig& config);

// Steps (a)-(g) over a whole corpus, in corpus order.
std::vector<TokenizedDoc> preprocess_corpus(const Corpus& corpus, const Lexicon& lexicon,
                                            const PrepConfig& config);

// k most frequent lemmas, count descending then lemma ascending.
std::vector<std::pair<std::string, std::int64_t>> top_frequent_terms(const std::vector<TokenizedDoc>& docs,
                                                                     int k);

}  // namespace finelens
