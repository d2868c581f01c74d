#include "finelens/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "finelens/error.hpp"

namespace finelens {

namespace {

void check_names_unique(const std::vector<std::string>& names) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw ValidationError("duplicate column name '" + n + "'");
  }
}

FeatureMatrix weighted_counts(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab,
                              const Eigen::VectorXd& weights) {
  FeatureMatrix m;
  m.col_names = vocab.terms;
  m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()),
                                   static_cast<Eigen::Index>(vocab.terms.size()));
  for (std::size_t r = 0; r < docs.size(); ++r) {
    m.row_ids.push_back(docs[r].case_id);
    for (const auto& l : docs[r].lemmas) {
      auto it = vocab.index.find(l);
      if (it == vocab.index.end())
        throw ValidationError("document '" + docs[r].case_id + "': lemma '" + l + "' not in vocabulary");
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(it->second)) += 1.0;
    }
  }
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) m.values.col(c) *= weights(c);
  return m;
}

}  // namespace

void FeatureMatrix::validate() const {
  if (static_cast<std::size_t>(values.rows()) != row_ids.size() ||
      static_cast<std::size_t>(values.cols()) != col_names.size())
    throw ValidationError("feature matrix dimensions disagree with row/column names");
  check_names_unique(col_names);
}

Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs) {
  if (docs.empty()) throw ValidationError("build_vocabulary: empty corpus");
  Vocabulary v;
  v.n_docs = docs.size();
  for (const auto& d : docs) {
    std::set<std::string> distinct(d.lemmas.begin(), d.lemmas.end());
    for (const auto& l : distinct) ++v.df[l];
  }
  for (const auto& [term, _] : v.df) {
    v.index[term] = v.terms.size();
    v.terms.push_back(term);
  }
  return v;
}

double idf_weight(const Vocabulary& vocab, const std::string& term, IdfVariant variant) {
  auto it = vocab.df.find(term);
  if (it == vocab.df.end()) throw ValidationError("term '" + term + "' not in vocabulary");
  const auto n = static_cast<double>(vocab.n_docs);
  const auto df = static_cast<double>(it->second);
  if (variant == IdfVariant::Smooth) return std::log((1.0 + n) / (1.0 + df)) + 1.0;
  return std::log(n / df);
}

FeatureMatrix tf_matrix(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab) {
  return weighted_counts(docs, vocab, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(vocab.terms.size())));
}

FeatureMatrix tfidf_matrix(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab, IdfVariant variant) {
  Eigen::VectorXd idf(static_cast<Eigen::Index>(vocab.terms.size()));
  for (std::size_t t = 0; t < vocab.terms.size(); ++t)
    idf(static_cast<Eigen::Index>(t)) = idf_weight(vocab, vocab.terms[t], variant);
  return weighted_counts(docs, vocab, idf);
}

std::set<DummyGroup> all_dummy_groups() {
  return {DummyGroup::Articles, DummyGroup::Year, DummyGroup::Country, DummyGroup::Sector};
}

FeatureMatrix dummy_encode(const Corpus& corpus, const std::set<DummyGroup>& groups) {
  if (corpus.empty()) throw ValidationError("dummy_encode: empty corpus");
  std::set<int> articles, years;
  std::set<std::string> countries, sectors;
  for (const auto& c : corpus.cases) {
    articles.insert(c.articles.begin(), c.articles.end());
    years.insert(c.year);
    countries.insert(c.country);
    sectors.insert(std::string(sector_name(c.sector)));
  }

  FeatureMatrix m;
  for (const auto& c : corpus.cases) m.row_ids.push_back(c.case_id);
  // Each column: name plus a membership predicate.
  std::vector<std::function<bool(const EnforcementCase&)>> members;
  if (groups.contains(DummyGroup::Articles)) {
    for (int a : articles) {
      m.col_names.push_back("art" + std::to_string(a));
      members.emplace_back([a](const EnforcementCase& c) { return c.articles.contains(a); });
    }
  }
  if (groups.contains(DummyGroup::Year)) {
    for (int y : years) {
      m.col_names.push_back("year:" + std::to_string(y));
      members.emplace_back([y](const EnforcementCase& c) { return c.year == y; });
    }
  }
  if (groups.contains(DummyGroup::Country)) {
    for (const auto& k : countries) {
      m.col_names.push_back("country:" + k);
      members.emplace_back([k](const EnforcementCase& c) { return c.country == k; });
    }
  }
  if (groups.contains(DummyGroup::Sector)) {
    for (const auto& s : sectors) {
      m.col_names.push_back("sector:" + s);
      members.emplace_back([s](const EnforcementCase& c) { return sector_name(c.sector) == s; });
    }
  }
  m.values.resize(static_cast<Eigen::Index>(corpus.size()), static_cast<Eigen::Index>(members.size()));
  for (std::size_t r = 0; r < corpus.size(); ++r)
    for (std::size_t j = 0; j < members.size(); ++j)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = members[j](corpus.cases[r]) ? 1.0 : 0.0;
  return m;
}

NzvResult near_zero_variance_filter(const FeatureMatrix& m, double freq_cut, double unique_cut_pct) {
  if (m.rows() == 0) throw ValidationError("near_zero_variance_filter: empty matrix");
  NzvResult res;
  std::vector<Eigen::Index> keep;
  const auto n = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::map<double, std::int64_t> freq;
    for (Eigen::Index r = 0; r < m.rows(); ++r) ++freq[m.values(r, c)];
    bool drop = freq.size() == 1;
    if (!drop) {
      std::vector<std::int64_t> counts;
      for (const auto& [_, k] : freq) counts.push_back(k);
      std::partial_sort(counts.begin(), counts.begin() + 2, counts.end(), std::greater<>());
      const double ratio = static_cast<double>(counts[0]) / static_cast<double>(counts[1]);
      const double pct_unique = 100.0 * static_cast<double>(freq.size()) / n;
      drop = ratio >= freq_cut && pct_unique < unique_cut_pct;
    }
    if (drop) {
      res.dropped.push_back(m.col_names[static_cast<std::size_t>(c)]);
    } else {
      keep.push_back(c);
    }
  }
  res.matrix.row_ids = m.row_ids;
  res.matrix.values.resize(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    res.matrix.col_names.push_back(m.col_names[static_cast<std::size_t>(keep[j])]);
    res.matrix.values.col(static_cast<Eigen::Index>(j)) = m.values.col(keep[j]);
  }
  return res;
}

FeatureMatrix hconcat(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.row_ids != b.row_ids) throw ValidationError("hconcat: row ids differ");
  FeatureMatrix out;
  out.row_ids = a.row_ids;
  out.col_names = a.col_names;
  out.col_names.insert(out.col_names.end(), b.col_names.begin(), b.col_names.end());
  {
    std::unordered_set<std::string> left(a.col_names.begin(), a.col_names.end());
    for (const auto& n : b.col_names)
      if (left.contains(n)) throw ValidationError("hconcat: column name collision '" + n + "'");
  }
  out.values.resize(a.rows(), a.cols() + b.cols());
  out.values << a.values, b.values;
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.col_names = m.col_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row_ids.push_back(m.row_ids.at(rows[i]));
    out.values.row(static_cast<Eigen::Index>(i)) = m.values.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const FeatureMatrix& m) {
  m.validate();
  auto check = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") != std::string::npos)
      throw ValidationError("CSV field '" + s + "' needs quoting, which is not supported");
  };
  out << "case_id";
  for (const auto& n : m.col_names) {
    check(n);
    out << ',' << n;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    check(m.row_ids[static_cast<std::size_t>(r)]);
    out << m.row_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m.values(r, c));
    out << '\n';
  }
}

FeatureMatrix read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string f;
    std::istringstream ss(line);
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  if (header.empty() || header[0] != "case_id") throw ValidationError("CSV: first header column must be case_id");
  FeatureMatrix m;
  m.col_names.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size())
      throw ValidationError("CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields");
    m.row_ids.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0;
      const auto& f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ValidationError("CSV line " + std::to_string(line_no) + ": bad number '" + f + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.col_names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  m.validate();
  return m;
}

}  // namespace finelens
