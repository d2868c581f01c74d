#include "finelens/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "finelens/error.hpp"

namespace finelens {

namespace {

bool is_ascii_alpha(unsigned char ch) { return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z'); }
bool is_ascii_digit(unsigned char ch) { return ch >= '0' && ch <= '9'; }
bool is_token_byte(unsigned char ch) { return is_ascii_alpha(ch) || is_ascii_digit(ch) || ch >= 0x80; }

bool is_alphabetic(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char ch) { return is_ascii_alpha(ch); });
}

bool is_lowercase(const std::string& w) {
  return std::none_of(w.begin(), w.end(), [](unsigned char ch) { return ch >= 'A' && ch <= 'Z'; });
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open lexicon file '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

const std::vector<std::string>& default_custom_stopwords() {
  static const std::vector<std::string> words{"data",      "article",   "personal",   "protection",
                                              "processing", "company",  "authority",  "regulation",
                                              "information", "case",    "art",        "page"};
  return words;
}

void Lexicon::validate() const {
  auto check = [](const std::unordered_set<std::string>& set, std::string_view what) {
    for (const auto& w : set) {
      if (!is_lowercase(w)) throw ValidationError(std::string(what) + " entry '" + w + "' is not lowercase");
    }
  };
  check(dictionary, "dictionary");
  check(standard_stopwords, "stopword");
  check(custom_stopwords, "custom stopword");
  for (const auto& [word, lemma] : lemma_map) {
    if (!is_lowercase(word) || !is_lowercase(lemma))
      throw ValidationError("lemma entry '" + word + "' -> '" + lemma + "' is not lowercase");
    if (lemma != word && !dictionary.contains(lemma))
      throw ValidationError("lemma '" + lemma + "' for '" + word + "' is not a dictionary word");
  }
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lex;
  for (auto& w : read_lines(dir / "dictionary.txt")) lex.dictionary.insert(std::move(w));
  for (auto& w : read_lines(dir / "stopwords.txt")) lex.standard_stopwords.insert(std::move(w));
  for (const auto& line : read_lines(dir / "lemmas.tsv")) {
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ValidationError("lemmas.tsv: malformed line '" + line + "'");
    lex.lemma_map[line.substr(0, tab)] = line.substr(tab + 1);
  }
  if (std::filesystem::exists(dir / "custom_stopwords.txt")) {
    lex.custom_stopwords.clear();
    for (auto& w : read_lines(dir / "custom_stopwords.txt")) lex.custom_stopwords.insert(std::move(w));
  }
  lex.validate();
  return lex;
}

void PrepConfig::validate() const {
  if (min_token_len < 1 || min_token_len > max_token_len)
    throw ValidationError("token length bounds must satisfy 1 <= min <= max");
  if (min_corpus_count < 1) throw ValidationError("min_corpus_count must be >= 1");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char ch : text) {
    if (is_token_byte(ch)) {
      cur.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a') : static_cast<char>(ch));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::string> preprocess_document(std::string_view text, const Lexicon& lexicon,
                                             const PrepConfig& config) {
  auto length_ok = [&](const std::string& w) {
    auto len = static_cast<int>(w.size());
    return len >= config.min_token_len && len <= config.max_token_len;
  };
  std::vector<std::string> out;
  for (auto& token : tokenize(text)) {
    if (!is_alphabetic(token) || !lexicon.dictionary.contains(token)) continue;  // (c)
    if (lexicon.is_stopword(token)) continue;                                   // (d)
    if (!length_ok(token)) continue;                                            // (e)
    const std::string& lemma = lexicon.lemma(token);                             // (f)
    if (!is_alphabetic(lemma) || lexicon.is_stopword(lemma) || !length_ok(lemma)) continue;
    out.push_back(lemma);
  }
  return out;
}

std::vector<TokenizedDoc> prune_rare_terms(std::vector<TokenizedDoc> docs, const PrepConfig& config) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& d : docs)
    for (const auto& l : d.lemmas) ++counts[l];
  for (auto& d : docs) {
    std::erase_if(d.lemmas, [&](const std::string& l) { return counts[l] < config.min_corpus_count; });
  }
  return docs;
}

std::vector<TokenizedDoc> preprocess_corpus(const Corpus& corpus, const Lexicon& lexicon,
                                            const PrepConfig& config) {
  config.validate();
  std::vector<TokenizedDoc> docs;
  docs.reserve(corpus.size());
  for (const auto& c : corpus.cases) docs.push_back({c.case_id, preprocess_document(c.text, lexicon, config)});
  return prune_rare_terms(std::move(docs), config);
}

std::vector<std::pair<std::string, std::int64_t>> top_frequent_terms(const std::vector<TokenizedDoc>& docs,
                                                                     int k) {
  if (k < 0) throw ValidationError("top_frequent_terms: k must be >= 0");
  std::map<std::string, std::int64_t> counts;
  for (const auto& d : docs)
    for (const auto& l : d.lemmas) ++counts[l];
  std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
  return ranked;
}

}  // namespace finelens
