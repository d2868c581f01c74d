#include "finelens/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "finelens/error.hpp"
#include "finelens/rng.hpp"

namespace finelens {

namespace {

MatrixXd take_rows(const MatrixXd& m, const std::vector<std::size_t>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

VectorXd take(const VectorXd& v, const std::vector<std::size_t>& rows) {
  VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::span<const double> as_span(const VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("observed and predicted lengths differ");
  if (a.empty()) throw ValidationError("empty observation vector");
}

// True when candidate `a` is the simpler model: fewer components or more shrinkage.
bool simpler(const Hyperparameter& a, const Hyperparameter& b) {
  if (const int* ka = std::get_if<int>(&a)) return *ka < std::get<int>(b);
  if (const double* la = std::get_if<double>(&a)) return *la > std::get<double>(b);
  return false;
}

}  // namespace

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test_fraction must lie in (0, 1)");
  if (folds < 2) throw ValidationError("folds must be >= 2");
}

TrainTestSplit split(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  if (n < 5) throw ValidationError("split needs at least 5 cases");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(spec.seed);
  shuffle(perm, rng);
  auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * spec.test_fraction - 1e-9));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  TrainTestSplit s;
  s.train.assign(perm.begin(), perm.end() - static_cast<std::ptrdiff_t>(n_test));
  s.test.assign(perm.end() - static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<std::vector<std::size_t>> kfold(std::span<const std::size_t> indices, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("kfold: k must be >= 2");
  if (indices.size() < static_cast<std::size_t>(k)) throw ValidationError("kfold: fewer indices than folds");
  std::vector<std::size_t> perm(indices.begin(), indices.end());
  SplitMix64 rng(seed);
  shuffle(perm, rng);
  const std::size_t base = perm.size() / static_cast<std::size_t>(k);
  const std::size_t extra = perm.size() % static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    std::vector<std::size_t> fold(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                  perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(fold.begin(), fold.end());
    folds.push_back(std::move(fold));
    pos += len;
  }
  return folds;
}

double rmse(std::span<const double> observed, std::span<const double> predicted) {
  check_lengths(observed, predicted);
  double ss = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) ss += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
  return std::sqrt(ss / static_cast<double>(observed.size()));
}

double mae(std::span<const double> observed, std::span<const double> predicted) {
  check_lengths(observed, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) s += std::fabs(observed[i] - predicted[i]);
  return s / static_cast<double>(observed.size());
}

CvResult cross_validate(const MatrixXd& x, const VectorXd& y, Method method,
                        const std::vector<Hyperparameter>& grid, int k, std::uint64_t seed) {
  if (grid.empty()) throw ValidationError("cross_validate: empty grid");
  if (x.rows() != y.size()) throw ValidationError("cross_validate: design rows and response length differ");
  std::vector<std::size_t> all(static_cast<std::size_t>(x.rows()));
  std::iota(all.begin(), all.end(), std::size_t{0});

  CvResult res;
  res.folds = kfold(all, k, seed);
  std::vector<std::vector<double>> fold_rmse(grid.size());
  std::vector<std::string> infeasible(grid.size());

  for (const auto& held_out : res.folds) {
    std::vector<std::size_t> fit_rows;
    std::set_difference(all.begin(), all.end(), held_out.begin(), held_out.end(), std::back_inserter(fit_rows));
    const MatrixXd x_fit = take_rows(x, fit_rows);
    const VectorXd y_fit = take(y, fit_rows);
    const MatrixXd x_out = take_rows(x, held_out);
    const VectorXd y_out = take(y, held_out);
    std::vector<std::string> reasons;
    auto models = fit_path(method, x_fit, y_fit, grid, {}, &reasons);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (!models[g]) {
        if (infeasible[g].empty()) infeasible[g] = reasons[g];
        continue;
      }
      const VectorXd pred = predict(*models[g], x_out);
      fold_rmse[g].push_back(rmse(as_span(y_out), as_span(pred)));
    }
  }

  bool have_best = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!infeasible[g].empty()) {
      res.warnings.push_back(std::string(method_name(method)) + " " + hyper_to_string(grid[g]) +
                             " skipped: " + infeasible[g]);
      continue;
    }
    CvRow row{grid[g], 0.0, fold_rmse[g]};
    row.mean_rmse = std::accumulate(row.fold_rmse.begin(), row.fold_rmse.end(), 0.0) /
                    static_cast<double>(row.fold_rmse.size());
    if (!have_best || row.mean_rmse < res.best_rmse ||
        (row.mean_rmse == res.best_rmse && simpler(row.hyper, res.best))) {
      res.best = row.hyper;
      res.best_rmse = row.mean_rmse;
      have_best = true;
    }
    res.table.push_back(std::move(row));
  }
  if (!have_best) throw NumericalError("cross_validate: every grid point was infeasible");
  return res;
}

std::vector<Hyperparameter> default_component_grid(Eigen::Index p, std::size_t n_train, int folds) {
  const std::size_t largest_fold = (n_train + static_cast<std::size_t>(folds) - 1) / static_cast<std::size_t>(folds);
  const auto min_fold_train = static_cast<long>(n_train - largest_fold);
  const long k_max = std::min<long>({20L, static_cast<long>(p), min_fold_train - 1});
  std::vector<Hyperparameter> grid;
  for (int k = 1; k <= k_max; ++k) grid.emplace_back(k);
  return grid;
}

std::vector<Hyperparameter> default_lambda_grid() {
  std::vector<Hyperparameter> grid;
  for (int i = 0; i < 25; ++i) grid.emplace_back(std::pow(10.0, -3.0 + 6.0 * i / 24.0));
  return grid;
}

std::vector<EstimatorGrid> default_estimators() {
  return {{Method::PCR, {}}, {Method::PLS, {}}, {Method::Ridge, {}}};
}

EvalReport run_grid(const std::vector<FeatureSetInput>& feature_sets, const VectorXd& y,
                    const std::vector<EstimatorGrid>& estimators, const SplitSpec& spec) {
  if (feature_sets.empty()) throw ValidationError("run_grid: no feature sets");
  const auto& ids = feature_sets.front().matrix.row_ids;
  for (const auto& fs : feature_sets) {
    fs.matrix.validate();
    if (fs.matrix.row_ids != ids) throw ValidationError("run_grid: feature set '" + fs.name + "' rows are misaligned");
  }
  if (static_cast<std::size_t>(y.size()) != ids.size()) throw ValidationError("run_grid: response length mismatch");

  EvalReport report;
  report.spec = spec;
  const TrainTestSplit tt = split(ids.size(), spec);
  for (auto i : tt.train) report.train_ids.push_back(ids[i]);
  for (auto i : tt.test) report.test_ids.push_back(ids[i]);
  const VectorXd y_train = take(y, tt.train);
  const VectorXd y_test = take(y, tt.test);

  for (const auto& fs : feature_sets) {
    const MatrixXd x_train = take_rows(fs.matrix.values, tt.train);
    const MatrixXd x_test = take_rows(fs.matrix.values, tt.test);
    for (const auto& est : estimators) {
      std::vector<Hyperparameter> grid = est.grid;
      if (grid.empty()) {
        grid = est.method == Method::Ridge ? default_lambda_grid()
                                           : default_component_grid(x_train.cols(), tt.train.size(), spec.folds);
      }
      ConfigResult cfg;
      cfg.feature_set = fs.name;
      cfg.method = est.method;
      const CvResult cv = cross_validate(x_train, y_train, est.method, grid, spec.folds, spec.seed);
      cfg.chosen = cv.best;
      cfg.cv_rmse = cv.best_rmse;
      cfg.cv_table = cv.table;
      cfg.warnings = cv.warnings;

      std::vector<std::string> reasons;
      auto fitted = fit_path(est.method, x_train, y_train, {cv.best}, fs.matrix.col_names, &reasons);
      if (!fitted[0])
        throw NumericalError(fs.name + "/" + std::string(method_name(est.method)) + ": refit failed: " + reasons[0]);
      const VectorXd fit_train = predict(*fitted[0], x_train);
      const VectorXd fit_test = predict(*fitted[0], x_test);
      cfg.train_mae = mae(as_span(y_train), as_span(fit_train));
      cfg.test_mae = mae(as_span(y_test), as_span(fit_test));
      for (std::size_t i = 0; i < tt.test.size(); ++i)
        cfg.predictions.push_back({report.test_ids[i], y_test(static_cast<Eigen::Index>(i)),
                                   fit_test(static_cast<Eigen::Index>(i))});
      report.configs.push_back(std::move(cfg));
    }
  }
  return report;
}

std::vector<FeatureSetInput> standard_feature_sets(const Corpus& corpus, const std::vector<TokenizedDoc>& docs,
                                                   IdfVariant idf, bool nzv_meta) {
  FeatureMatrix meta = dummy_encode(corpus, all_dummy_groups());
  if (nzv_meta) meta = near_zero_variance_filter(meta).matrix;
  const Vocabulary vocab = build_vocabulary(docs);
  FeatureMatrix tf = tf_matrix(docs, vocab);
  FeatureMatrix tfidf = tfidf_matrix(docs, vocab, idf);
  if (tf.row_ids != meta.row_ids) throw ValidationError("documents are not aligned with the corpus");
  FeatureMatrix both = hconcat(meta, tfidf);
  return {{"Meta", std::move(meta)}, {"TF", std::move(tf)}, {"TFIDF", std::move(tfidf)}, {"Meta+TFIDF", std::move(both)}};
}

}  // namespace finelens
