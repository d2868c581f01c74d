// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bridge.hpp"
#include "cli_harness.hpp"
#include "finelens/anova.hpp"
#include "finelens/distributions.hpp"
#include "finelens/eval.hpp"
#include "finelens/features.hpp"
#include "finelens/linreg.hpp"
#include "finelens/serialize.hpp"
#include "finelens/synthgen.hpp"
#include "finelens/textprep.hpp"
#include "oracles.hpp"

using namespace finelens;
using bridge::to_eigen;

namespace {

// Tolerances and thresholds.
constexpr double kIdentityTol = 1e-6;
constexpr double kIdentitySeconds = 5.0;
constexpr double kRidgeHandTol = 1e-12;
constexpr double kPlsTol = 1e-8;
constexpr double kGradientEps = 1e-3;
constexpr double kTTableTol = 1e-3;
constexpr double kFQuadratureTol = 1e-5;
constexpr double kTfIdfTol = 1e-12;
constexpr double kAnovaCoefTol = 1e-8;
constexpr double kAnovaR2Tol = 1e-10;
constexpr int kCoverageNeeded = 18;  // of 20 seeds
constexpr double kCvOracleTol = 1e-10;
constexpr double kNoiseFreeCvRmse = 1e-8;
constexpr double kPipelineSeconds = 60.0;
constexpr int kMetaWinsNeeded = 8;  // of 10 seeds

const std::string kFixtures = FINELENS_FIXTURES;
const std::string kLexicon = FINELENS_LEXICON;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1. ridge(0), pcr(p), pls1(p) against the normal-equations oracle.
Outcome estimator_identities() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto pr = bridge::random_problem(40, 8, seed);
    const oracle::Linear ref = oracle::normal_equations(pr.x, pr.y);
    const MatrixXd x = to_eigen(pr.x);
    const VectorXd y = to_eigen(pr.y);
    worst = std::max({worst, bridge::max_abs_diff(ridge_fit(x, y, 0.0).coefficients, ref.beta),
                      bridge::max_abs_diff(pcr_fit(x, y, 8).coefficients, ref.beta),
                      bridge::max_abs_diff(pls1_fit(x, y, 8).coefficients, ref.beta)});
  }
  const double secs = seconds_since(t0);
  return {worst < kIdentityTol && secs < kIdentitySeconds,
          "max deviation " + num(worst) + " (< " + num(kIdentityTol) + "), " + num(secs) + " s"};
}

// 2. Centered x = [1, -1], y = [1, -1], lambda = 2 gives 2 / (2 + 2).
Outcome ridge_hand_value() {
  MatrixXd x(2, 1);
  x << 1, -1;
  VectorXd y(2);
  y << 1, -1;
  const double beta = ridge_fit(x, y, 2.0).coefficients(0);
  return {std::fabs(beta - 0.5) < kRidgeHandTol, "beta = " + num(beta) + ", error " + num(std::fabs(beta - 0.5))};
}

// 3. NIPALS scores orthogonal; coefficients equal a step-by-step trace.
Outcome pls_internals() {
  const auto pr = bridge::random_problem(20, 5, 2020, 0.5);
  const PlsComponents comp = pls1_components(to_eigen(pr.x), to_eigen(pr.y), 3);
  double ortho = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) ortho = std::max(ortho, std::fabs(comp.scores.col(i).dot(comp.scores.col(j))));
  const oracle::NipalsSteps ref = oracle::nipals(pr.x, pr.y, 3);
  const FittedModel m = pls1_fit(to_eigen(pr.x), to_eigen(pr.y), 3);
  const double coef = std::max(bridge::max_abs_diff(m.coefficients, ref.model.beta), std::fabs(m.intercept - ref.model.intercept));
  return {ortho < kPlsTol && coef < kPlsTol, "max |ti'tj| " + num(ortho) + ", coefficient deviation " + num(coef)};
}

// 4. Perturbing any coordinate by +-eps raises the penalized objective.
Outcome ridge_optimality() {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pr = bridge::random_problem(30, 6, 500 + seed, 1.0);
    const double lambda = 0.05 * static_cast<double>(seed * seed);
    const MatrixXd x = to_eigen(pr.x);
    const VectorXd y = to_eigen(pr.y);
    const CenteredDesign cd = center(x, y);
    const VectorXd beta = ridge_fit(x, y, lambda).coefficients;
    auto objective = [&](const VectorXd& b) {
      return (cd.y_centered - cd.x_centered * b).squaredNorm() + lambda * b.squaredNorm();
    };
    const double f0 = objective(beta);
    bool minimum = true;
    for (Eigen::Index i = 0; i < beta.size(); ++i)
      for (double eps : {kGradientEps, -kGradientEps}) {
        VectorXd b = beta;
        b(i) += eps;
        minimum = minimum && objective(b) > f0;
      }
    ok += minimum ? 1 : 0;
  }
  return {ok == 20, std::to_string(ok) + "/20 problems are local minima"};
}

// 5. t table at 97.5% and F tail against quadrature of the density.
Outcome distribution_functions() {
  const std::pair<double, double> table[] = {{1, 12.7062}, {5, 2.5706}, {10, 2.2281}, {30, 2.0423}, {100, 1.9840}};
  double t_err = 0.0;
  for (auto [df, q] : table) t_err = std::max(t_err, std::fabs(t_quantile(0.975, df) - q));
  double f_err = 0.0;
  for (double d1 : {1.0, 3.0, 8.0})
    for (double d2 : {5.0, 20.0, 100.0})
      for (double f : {0.5, 1.5, 4.0})
        f_err = std::max(f_err, std::fabs(f_pvalue(f, d1, d2) - oracle::f_upper_tail_by_quadrature(f, d1, d2)));
  return {t_err < kTTableTol && f_err < kFQuadratureTol,
          "t table error " + num(t_err) + ", F quadrature error " + num(f_err)};
}

// 6. Hand-computed TF and TF-IDF matrices for the 5-document toy corpus.
Outcome tfidf_oracle() {
  std::ifstream in(kFixtures + "/toy_docs.jsonl");
  const auto docs = read_docs(in);
  const Vocabulary vocab = build_vocabulary(docs);
  const FeatureMatrix tf = tf_matrix(docs, vocab);
  const FeatureMatrix tfidf = tfidf_matrix(docs, vocab);
  // columns: alpha beta delta epsilon gamma
  const double expect_tf[5][5] = {{2, 1, 0, 0, 0}, {0, 1, 0, 0, 1}, {1, 1, 1, 0, 2}, {0, 1, 0, 0, 0}, {1, 1, 1, 1, 1}};
  const double idf[5] = {0.5108256237659907, 0.0, 0.9162907318741551, 1.6094379124341003, 0.5108256237659907};
  bool tf_exact = vocab.terms == std::vector<std::string>{"alpha", "beta", "delta", "epsilon", "gamma"};
  double err = 0.0;
  for (int r = 0; r < 5 && tf_exact; ++r)
    for (int c = 0; c < 5; ++c) {
      tf_exact = tf_exact && tf.values(r, c) == expect_tf[r][c];
      err = std::max(err, std::fabs(tfidf.values(r, c) - expect_tf[r][c] * idf[c]));
    }
  return {tf_exact && err < kTfIdfTol, std::string("TF ") + (tf_exact ? "exact" : "mismatch") + ", TF-IDF error " + num(err)};
}

// 7. Hand-traced lemma sequences with the mini lexicon.
Outcome preprocessing_conformance() {
  std::ifstream in(kFixtures + "/textprep_cases.json");
  const auto cases = nlohmann::json::parse(in);
  const Lexicon lex = Lexicon::load(kFixtures + "/lexicon_mini");
  int ok = 0;
  bool gdpr_case = false;
  for (const auto& c : cases) {
    const auto got = preprocess_document(c.at("text").get<std::string>(), lex, PrepConfig{});
    const bool match = got == c.at("lemmas").get<std::vector<std::string>>();
    ok += match ? 1 : 0;
    if (c.at("text") == "Art. 5 GDPR") gdpr_case = match && got.empty();
  }
  const bool pass = ok == static_cast<int>(cases.size()) && gdpr_case;
  return {pass, std::to_string(ok) + "/" + std::to_string(cases.size()) + " sequences match" +
                    (gdpr_case ? ", \"Art. 5 GDPR\" -> []" : ", \"Art. 5 GDPR\" case missing or wrong")};
}

// 8. Noise-free recovery, then CI coverage of the art5 effect over 20 seeds.
Outcome anova_recovery() {
  SynthSpec exact;
  exact.seed = 7;
  exact.noise_sd = 0.0;
  exact.set_effects({{5, 2.0}});
  const AnovaReport r0 = run_anova(generate(exact).corpus);
  double coef = NAN;
  for (const auto& a : r0.articles)
    if (a.article == 5) coef = a.coefficient.value_or(NAN);
  const bool exact_ok = std::fabs(coef - 2.0) < kAnovaCoefTol && std::fabs(r0.r_squared - 1.0) < kAnovaR2Tol;

  int covered = 0, all_in = 0, all_total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.n_cases = 200;
    spec.noise_sd = 0.5;
    spec.set_effects({{5, 2.0}});
    const SynthResult s = generate(spec);
    const AnovaReport r = run_anova(s.corpus);
    for (const auto& a : r.articles) {
      if (!a.coefficient) continue;
      const double truth = s.truth.effects.at(a.article);
      const bool in = *a.ci_low <= truth && truth <= *a.ci_high;
      if (a.article == 5) covered += in ? 1 : 0;
      all_in += in ? 1 : 0;
      ++all_total;
    }
  }
  return {exact_ok && covered >= kCoverageNeeded,
          "noise-free art5 = " + num(coef) + ", R^2 = " + num(r0.r_squared) + "; art5 covered " + std::to_string(covered) +
              "/20 (all articles " + std::to_string(all_in) + "/" + std::to_string(all_total) + ")"};
}

// 9. Partitions, fold-loop oracle for the CV table, exact-model PCR.
Outcome cv_harness() {
  auto is_partition = [](std::vector<std::vector<std::size_t>> parts, std::size_t n) {
    std::vector<std::size_t> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> want(n);
    std::iota(want.begin(), want.end(), std::size_t{0});
    return all == want;
  };
  bool partitions = true;
  int checked = 0;
  for (std::size_t n = 5; n <= 160; n += 5) {
    SplitSpec spec;
    spec.seed = n * 31;
    const TrainTestSplit s = split(n, spec);
    partitions = partitions && is_partition({s.train, s.test}, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (int k = 2; k <= std::min<int>(static_cast<int>(n), 10); ++k, ++checked)
      partitions = partitions && is_partition(kfold(idx, k, n + static_cast<std::size_t>(k)), n);
  }

  // Independent fold loop: oracle shuffle, block cut, normal-equation fits.
  const auto pr = bridge::random_problem(60, 6, 60, 0.7);
  const std::vector<double> lambdas{0.01, 1.0, 100.0};
  const CvResult cv = cross_validate(to_eigen(pr.x), to_eigen(pr.y), Method::Ridge, {0.01, 1.0, 100.0}, 5, 42);
  std::vector<std::size_t> ids(60);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  const auto perm = oracle::splitmix_shuffle(ids, 42);
  std::vector<int> fold_of(60);
  for (std::size_t p = 0; p < 60; ++p) fold_of[perm[p]] = static_cast<int>(p / 12);
  double cv_err = cv.table.size() == 3 ? 0.0 : INFINITY;
  for (std::size_t g = 0; g < 3 && std::isfinite(cv_err); ++g) {
    double sum = 0.0;
    for (int f = 0; f < 5; ++f) {
      oracle::Mat xf, xo;
      oracle::Vec yf, yo;
      for (std::size_t i = 0; i < 60; ++i) {
        (fold_of[i] == f ? xo : xf).push_back(pr.x[i]);
        (fold_of[i] == f ? yo : yf).push_back(pr.y[i]);
      }
      sum += oracle::rmse(yo, oracle::predict(oracle::normal_equations(xf, yf, lambdas[g]), xo));
    }
    cv_err = std::max(cv_err, std::fabs(cv.table[g].mean_rmse - sum / 5.0));
  }

  const auto exact = bridge::random_problem(50, 5, 77, 0.0);
  const CvResult pcr = cross_validate(to_eigen(exact.x), to_eigen(exact.y), Method::PCR, {1, 2, 3, 4, 5}, 5, 42);
  return {partitions && cv_err < kCvOracleTol && pcr.best_rmse < kNoiseFreeCvRmse,
          std::string(partitions ? "partitions ok" : "partition FAILED") + " (" + std::to_string(checked) +
              " fold layouts), oracle error " + num(cv_err) + ", noise-free PCR " + hyper_to_string(pcr.best) +
              " cv_rmse " + num(pcr.best_rmse)};
}

// 10. 100x6 matrix with two designed near-zero-variance columns.
Outcome nzv_filter() {
  FeatureMatrix m;
  for (int r = 0; r < 100; ++r) m.row_ids.push_back("r" + std::to_string(r));
  m.col_names = {"balanced", "constant", "spread", "rare", "skewed_ok", "counts"};
  m.values = Eigen::MatrixXd::Zero(100, 6);
  for (int r = 0; r < 100; ++r) {
    m.values(r, 0) = r % 2;
    m.values(r, 1) = 3.0;                    // constant: dropped
    m.values(r, 2) = r * 0.25;               // all distinct
    m.values(r, 3) = r == 17 ? 1.0 : 0.0;    // 99:1, 2% unique: dropped
    m.values(r, 4) = r < 90 ? 0.0 : 1.0;     // 90:10, ratio 9: kept
    m.values(r, 5) = static_cast<double>(r % 7);
  }
  const NzvResult res = near_zero_variance_filter(m);
  const bool pass = res.dropped == std::vector<std::string>{"constant", "rare"} && res.matrix.cols() == 4;
  std::string dropped;
  for (const auto& d : res.dropped) dropped += (dropped.empty() ? "" : ",") + d;
  return {pass, "dropped [" + dropped + "]"};
}

// 11. synth -> preprocess -> featurize -> evaluate twice, byte for byte.
Outcome end_to_end_determinism() {
  const char* artifacts[] = {"corpus.jsonl", "truth.json",     "docs.jsonl",     "preprocess.json", "meta.csv",
                             "tf.csv",       "tfidf.csv",      "meta_tfidf.csv", "targets.csv",     "vocabulary.csv",
                             "featurize.json", "eval_report.json", "maes.csv",   "predictions.csv", "fines_hist.csv"};
  harness::TempDir a("accept-a"), b("accept-b");
  double slowest = 0.0;
  std::string failure;
  for (const harness::TempDir* d : {&a, &b}) {
    const auto t0 = Clock::now();
    const std::vector<std::vector<std::string>> steps{
        {"synth", "--seed", "42", "--n", "200", "--output-dir", d->str()},
        {"preprocess", "--input", d->str("corpus.jsonl"), "--lexicon-dir", kLexicon, "--output-dir", d->str()},
        {"featurize", "--input", d->str("corpus.jsonl"), "--docs", d->str("docs.jsonl"), "--output-dir", d->str()},
        {"evaluate", "--input", d->str(), "--output-dir", d->str()}};
    for (const auto& step : steps) {
      const auto r = harness::run(step);
      if (r.code != 0 && failure.empty()) failure = step[0] + " exited " + std::to_string(r.code) + ": " + r.err;
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  if (!failure.empty()) return {false, failure};
  int identical = 0;
  for (const char* f : artifacts) {
    const std::string x = harness::slurp(a.path() / f);
    identical += (!x.empty() && x == harness::slurp(b.path() / f)) ? 1 : 0;
  }
  const int total = static_cast<int>(std::size(artifacts));
  return {identical == total && slowest < kPipelineSeconds,
          std::to_string(identical) + "/" + std::to_string(total) + " artifacts identical, slowest run " + num(slowest) +
              " s"};
}

// 12. Pure meta-data signal: Meta's best test MAE <= TF's, majority of seeds.
Outcome meta_beats_tf() {
  const Lexicon lex = Lexicon::load(kLexicon);
  int wins = 0;
  std::string trace;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.n_cases = 200;
    const SynthResult s = generate(spec);
    const auto docs = preprocess_corpus(s.corpus, lex, PrepConfig{});
    auto sets = standard_feature_sets(s.corpus, docs);
    std::vector<FeatureSetInput> chosen;
    for (auto& fs : sets)
      if (fs.name == "Meta" || fs.name == "TF") chosen.push_back(std::move(fs));
    const auto lf = log_fines(s.corpus);
    SplitSpec split_spec;
    split_spec.seed = seed;
    const EvalReport rep = run_grid(chosen, to_eigen(lf), default_estimators(), split_spec);
    double best_meta = INFINITY, best_tf = INFINITY;
    for (const auto& c : rep.configs) {
      double& slot = c.feature_set == "Meta" ? best_meta : best_tf;
      slot = std::min(slot, c.test_mae);
    }
    wins += best_meta <= best_tf ? 1 : 0;
    trace += (trace.empty() ? "" : " ") + std::string(best_meta <= best_tf ? "M" : "t");
  }
  return {wins >= kMetaWinsNeeded, std::to_string(wins) + "/10 seeds Meta <= TF [" + trace + "]"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"estimator identities", estimator_identities},
      {"ridge hand value", ridge_hand_value},
      {"PLS internals", pls_internals},
      {"ridge optimality", ridge_optimality},
      {"distribution functions", distribution_functions},
      {"TF-IDF oracle", tfidf_oracle},
      {"preprocessing conformance", preprocessing_conformance},
      {"ANOVA recovery", anova_recovery},
      {"CV harness", cv_harness},
      {"NZV filter", nzv_filter},
      {"end-to-end determinism", end_to_end_determinism},
      {"Meta vs TF at desk scale", meta_beats_tf},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %2zu  %-26s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
