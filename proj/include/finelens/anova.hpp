#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "finelens/corpus.hpp"

namespace finelens {

struct ArticleEffect {
  int article = 0;
  std::int64_t reference_count = 0;
  bool aliased = false;
  // Absent for aliased articles.
  std::optional<double> coefficient;
  std::optional<double> std_error;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> p_value;
};

struct AnovaReport {
  std::vector<ArticleEffect> articles;  // ascending article number
  double intercept = 0.0;
  double r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  int n = 0;
  int df_model = 0;
  int df_resid = 0;
  std::vector<int> aliased;
};

// Cases referencing each article, count descending then article ascending.
std::vector<std::pair<int, std::int64_t>> article_counts(const Corpus& corpus);

/// Log-fines regressed on one dummy per referenced article plus an intercept.
/// No reference category is dropped; only exactly aliased articles are.
AnovaReport run_anova(const Corpus& corpus);

}  // namespace finelens
