#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "finelens/corpus.hpp"
#include "finelens/textprep.hpp"

namespace finelens {

struct Vocabulary {
  std::vector<std::string> terms;  // lexicographic
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::size_t> df;
  std::size_t n_docs = 0;
};

/// Dense design matrix with named columns; rows follow corpus order.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_names;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  // Dimensions consistent, column names unique.
  void validate() const;
};

enum class IdfVariant {
  Plain,   // ln(N / df)
  Smooth,  // ln((1 + N) / (1 + df)) + 1
};

enum class DummyGroup { Articles, Year, Country, Sector };

Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs);
FeatureMatrix tf_matrix(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab);
FeatureMatrix tfidf_matrix(const std::vector<TokenizedDoc>& docs, const Vocabulary& vocab,
                           IdfVariant variant = IdfVariant::Plain);
double idf_weight(const Vocabulary& vocab, const std::string& term, IdfVariant variant = IdfVariant::Plain);

/// 0/1 indicators named artN, year:YYYY, country:XX, sector:NAME. Full
/// category sets, no reference level dropped.
FeatureMatrix dummy_encode(const Corpus& corpus, const std::set<DummyGroup>& groups);
std::set<DummyGroup> all_dummy_groups();

struct NzvResult {
  FeatureMatrix matrix;
  std::vector<std::string> dropped;
};

/// Drops constant columns and columns with
///   top/second frequency ratio >= freq_cut  and  100 * distinct / rows < unique_cut_pct.
NzvResult near_zero_variance_filter(const FeatureMatrix& m, double freq_cut = 19.0,
                                    double unique_cut_pct = 10.0);

FeatureMatrix hconcat(const FeatureMatrix& a, const FeatureMatrix& b);

// Restricts to the given rows (by position), keeping column names.
FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows);

// CSV: header "case_id,<col_names...>", one row per case. Numbers use the
// shortest round-trip decimal form.
void write_csv(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_csv(std::istream& in);

std::string format_double(double v);

}  // namespace finelens
