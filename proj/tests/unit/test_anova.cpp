#include <cmath>

#include <gtest/gtest.h>

#include "finelens/anova.hpp"
#include "finelens/error.hpp"
#include "finelens/linreg.hpp"
#include "finelens/synthgen.hpp"

using namespace finelens;

namespace {

EnforcementCase make_case(std::string id, std::set<int> arts, double fine) {
  EnforcementCase c;
  c.case_id = std::move(id);
  c.country = "ES";
  c.year = 2020;
  c.sector = Sector::Unknown;
  c.articles = std::move(arts);
  c.fine_eur = fine;
  c.decision_ref = "r";
  c.text = "t";
  return c;
}

const ArticleEffect& effect(const AnovaReport& r, int article) {
  for (const auto& a : r.articles)
    if (a.article == article) return a;
  throw std::out_of_range("article not in report");
}

}  // namespace

TEST(ArticleCounts, TieOrderedByArticle) {
  const Corpus c{{make_case("a", {5}, 1), make_case("b", {5, 6}, 1), make_case("c", {6}, 1)}};
  EXPECT_EQ(article_counts(c), (std::vector<std::pair<int, std::int64_t>>{{5, 2}, {6, 2}}));
  EXPECT_TRUE(article_counts(Corpus{}).empty());
}

TEST(ArticleCounts, AddingCaseChangesTotalByItsArticles) {
  Corpus c{{make_case("a", {5, 32}, 1), make_case("b", {6}, 1)}};
  auto total = [](const Corpus& k) {
    std::int64_t s = 0;
    for (auto [a, n] : article_counts(k)) s += n;
    return s;
  };
  const auto before = total(c);
  c.cases.push_back(make_case("c", {5, 6, 32}, 1));
  EXPECT_EQ(total(c) - before, 3);
  EXPECT_EQ(article_counts(c).front(), (std::pair<int, std::int64_t>{5, 2}));
}

TEST(Anova, ConstructedIdentity) {
  // Cases citing art5 fine e^2 times more; art6 has no effect.
  Corpus c;
  const double base = std::exp(8.0);
  c.cases.push_back(make_case("1", {5}, base * std::exp(2.0)));
  c.cases.push_back(make_case("2", {6}, base));
  c.cases.push_back(make_case("3", {5, 6}, base * std::exp(2.0)));
  c.cases.push_back(make_case("4", {6}, base));
  c.cases.push_back(make_case("5", {5}, base * std::exp(2.0)));
  c.cases.push_back(make_case("6", {7}, base));
  const AnovaReport r = run_anova(c);
  EXPECT_NEAR(*effect(r, 5).coefficient, 2.0, 1e-8);
  EXPECT_NEAR(*effect(r, 6).coefficient, 0.0, 1e-8);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-10);
  EXPECT_EQ(effect(r, 5).reference_count, 3);
  EXPECT_EQ(r.n, 6);
}

TEST(Anova, CoOccurringArticlesAliased) {
  Corpus c;
  c.cases.push_back(make_case("1", {35, 36}, 1000));
  c.cases.push_back(make_case("2", {5}, 3000));
  c.cases.push_back(make_case("3", {6}, 200));
  c.cases.push_back(make_case("4", {5, 6}, 5000));
  c.cases.push_back(make_case("5", {5}, 900));
  const AnovaReport r = run_anova(c);
  EXPECT_EQ(r.aliased, std::vector<int>{36});
  const ArticleEffect& a36 = effect(r, 36);
  EXPECT_TRUE(a36.aliased);
  EXPECT_FALSE(a36.coefficient || a36.ci_low || a36.ci_high || a36.p_value || a36.std_error);
  EXPECT_EQ(a36.reference_count, 1);
  EXPECT_TRUE(effect(r, 35).coefficient.has_value());
}

TEST(Anova, NeedsTwoArticles) {
  const Corpus c{{make_case("1", {5}, 10), make_case("2", {5}, 20), make_case("3", {5}, 30)}};
  EXPECT_THROW(run_anova(c), ValidationError);
}

TEST(Anova, NoiseFreeSynthRecoversEveryEffect) {
  SynthSpec spec;
  spec.seed = 3;
  spec.noise_sd = 0.0;
  spec.n_cases = 150;
  const SynthResult s = generate(spec);
  const AnovaReport r = run_anova(s.corpus);
  ASSERT_TRUE(r.aliased.empty());
  for (const auto& [article, truth] : s.truth.effects) EXPECT_NEAR(*effect(r, article).coefficient, truth, 1e-8);
  EXPECT_NEAR(r.intercept, spec.base_log_fine, 1e-8);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-10);
}

TEST(Anova, RSquaredMatchesResiduals) {
  SynthSpec spec;
  spec.seed = 11;
  const SynthResult s = generate(spec);
  const AnovaReport r = run_anova(s.corpus);
  const std::vector<double> lf = log_fines(s.corpus);
  const Eigen::Map<const VectorXd> y(lf.data(), static_cast<Eigen::Index>(lf.size()));
  double rss = 0;
  for (std::size_t i = 0; i < s.corpus.cases.size(); ++i) {
    double fit = r.intercept;
    for (int a : s.corpus.cases[i].articles) fit += effect(r, a).coefficient.value_or(0.0);
    rss += std::pow(y(static_cast<Eigen::Index>(i)) - fit, 2);
  }
  const double tss = (y.array() - y.mean()).square().sum();
  EXPECT_NEAR(r.r_squared, 1.0 - rss / tss, 1e-10);
  for (const auto& a : r.articles)
    if (a.coefficient) EXPECT_LT(*a.ci_low, *a.ci_high);
}
