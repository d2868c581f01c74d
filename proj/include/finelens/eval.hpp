#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "finelens/features.hpp"
#include "finelens/linreg.hpp"
#include "finelens/textprep.hpp"

namespace finelens {

struct SplitSpec {
  std::uint64_t seed = 42;
  double test_fraction = 0.20;
  int folds = 5;

  void validate() const;
};

struct TrainTestSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Shuffles 0..n-1 with SplitMix64(seed); the last ceil(n * test_fraction)
/// shuffled indices form the test set.
TrainTestSplit split(std::size_t n, const SplitSpec& spec);

/// Shuffles `indices` with SplitMix64(seed) and cuts contiguous blocks; the
/// first |indices| mod k folds get one extra element. Each fold is sorted.
std::vector<std::vector<std::size_t>> kfold(std::span<const std::size_t> indices, int k, std::uint64_t seed);

double rmse(std::span<const double> observed, std::span<const double> predicted);
double mae(std::span<const double> observed, std::span<const double> predicted);

struct CvRow {
  Hyperparameter hyper;
  double mean_rmse = 0.0;
  std::vector<double> fold_rmse;
};

struct CvResult {
  Hyperparameter best;
  double best_rmse = 0.0;
  std::vector<CvRow> table;                      // feasible grid points, grid order
  std::vector<std::string> warnings;             // skipped grid points
  std::vector<std::vector<std::size_t>> folds;   // held-out rows per fold
};

/// k-fold CV over `grid`; a grid point infeasible on any fold is skipped.
/// Best = smallest mean RMSE; exact ties go to fewer components or larger lambda.
CvResult cross_validate(const MatrixXd& x, const VectorXd& y, Method method,
                        const std::vector<Hyperparameter>& grid, int k, std::uint64_t seed);

// Components 1..min(20, p, min_fold_train - 1).
std::vector<Hyperparameter> default_component_grid(Eigen::Index p, std::size_t n_train, int folds);
// 25 log-spaced lambdas over [1e-3, 1e3].
std::vector<Hyperparameter> default_lambda_grid();

struct FeatureSetInput {
  std::string name;
  FeatureMatrix matrix;
};

struct EstimatorGrid {
  Method method;
  std::vector<Hyperparameter> grid;  // empty -> default grid
};

struct TestPrediction {
  std::string case_id;
  double observed = 0.0;
  double predicted = 0.0;
};

struct ConfigResult {
  std::string feature_set;
  Method method = Method::PCR;
  Hyperparameter chosen;
  double cv_rmse = 0.0;
  double train_mae = 0.0;
  double test_mae = 0.0;
  std::vector<CvRow> cv_table;
  std::vector<std::string> warnings;
  std::vector<TestPrediction> predictions;
};

struct EvalReport {
  SplitSpec spec;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<ConfigResult> configs;  // feature-set major, estimator minor
};

/// One shared split; per configuration: CV on the training rows, refit at the
/// chosen hyperparameter, MAE on training and test rows. `y` is aligned with
/// the rows of every feature set.
EvalReport run_grid(const std::vector<FeatureSetInput>& feature_sets, const VectorXd& y,
                    const std::vector<EstimatorGrid>& estimators, const SplitSpec& spec);

std::vector<EstimatorGrid> default_estimators();

/// Meta, TF, TFIDF and Meta+TFIDF matrices from a corpus and its pruned docs.
std::vector<FeatureSetInput> standard_feature_sets(const Corpus& corpus, const std::vector<TokenizedDoc>& docs,
                                                   IdfVariant idf = IdfVariant::Plain, bool nzv_meta = false);

}  // namespace finelens
