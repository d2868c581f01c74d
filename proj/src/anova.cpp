#include "finelens/anova.hpp"

#include <algorithm>
#include <map>

#include "finelens/error.hpp"
#include "finelens/features.hpp"
#include "finelens/linreg.hpp"

namespace finelens {

std::vector<std::pair<int, std::int64_t>> article_counts(const Corpus& corpus) {
  std::map<int, std::int64_t> counts;
  for (const auto& c : corpus.cases)
    for (int a : c.articles) ++counts[a];
  std::vector<std::pair<int, std::int64_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

AnovaReport run_anova(const Corpus& corpus) {
  const FeatureMatrix dummies = dummy_encode(corpus, {DummyGroup::Articles});
  if (dummies.cols() < 2) throw ValidationError("anova needs at least two distinct articles");
  const std::vector<double> logs = log_fines(corpus);
  const VectorXd y = Eigen::Map<const VectorXd>(logs.data(), static_cast<Eigen::Index>(logs.size()));
  const OlsResult fit = ols_fit(dummies.values, y, dummies.col_names);
  const OlsInference& inf = fit.inference;

  std::map<int, std::int64_t> counts;
  for (const auto& c : corpus.cases)
    for (int a : c.articles) ++counts[a];

  AnovaReport rep;
  rep.intercept = inf.intercept;
  rep.r_squared = inf.r_squared;
  rep.f_statistic = inf.f_statistic;
  rep.f_p_value = inf.f_p_value;
  rep.n = inf.n;
  rep.df_model = inf.df_model;
  rep.df_resid = inf.df_resid;
  for (const auto& [article, count] : counts) {
    ArticleEffect e;
    e.article = article;
    e.reference_count = count;
    const std::string name = "art" + std::to_string(article);
    auto it = std::find(inf.retained.begin(), inf.retained.end(), name);
    if (it == inf.retained.end()) {
      e.aliased = true;
      rep.aliased.push_back(article);
    } else {
      const auto m = static_cast<Eigen::Index>(it - inf.retained.begin());
      e.coefficient = inf.coefficients(m);
      e.std_error = inf.standard_errors(m);
      e.ci_low = inf.ci_low(m);
      e.ci_high = inf.ci_high(m);
      e.p_value = inf.p_values(m);
    }
    rep.articles.push_back(e);
  }
  return rep;
}

}  // namespace finelens
