#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "finelens/features.hpp"

namespace finelens {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Relative tolerance for rank decisions (QR pivots, singular values).
inline constexpr double kRankTolerance = 1e-10;

struct CenteredDesign {
  MatrixXd x_centered;
  VectorXd col_means;
  VectorXd y_centered;
  double y_mean = 0.0;
};

CenteredDesign center(const MatrixXd& x, const VectorXd& y);

enum class Method { OLS, PCR, PLS, Ridge };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

// Number of components (PCR, PLS), shrinkage lambda (Ridge), or nothing (OLS).
using Hyperparameter = std::variant<std::monostate, int, double>;

std::string hyper_to_string(const Hyperparameter& h);

/// Intercept and coefficients in the original (uncentered) column space.
struct FittedModel {
  Method method = Method::OLS;
  Hyperparameter hyper;
  double intercept = 0.0;
  VectorXd coefficients;
  std::vector<std::string> col_names;
};

struct OlsInference {
  std::vector<std::string> retained;  // column order of the arrays below
  VectorXd coefficients;
  VectorXd standard_errors;
  VectorXd t_values;
  VectorXd p_values;
  VectorXd ci_low;
  VectorXd ci_high;
  double intercept = 0.0;
  double intercept_se = 0.0;
  double r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  double rss = 0.0;
  double tss = 0.0;
  int n = 0;
  int df_model = 0;
  int df_resid = 0;
  std::vector<std::string> dropped_aliased;
};

struct OlsResult {
  FittedModel model;  // aliased columns carry a zero coefficient
  OlsInference inference;
};

// Empty `col_names` are filled with x1..xp.
OlsResult ols_fit(const MatrixXd& x, const VectorXd& y, std::vector<std::string> col_names = {});
FittedModel pcr_fit(const MatrixXd& x, const VectorXd& y, int k, std::vector<std::string> col_names = {});
FittedModel pls1_fit(const MatrixXd& x, const VectorXd& y, int k, std::vector<std::string> col_names = {});
FittedModel ridge_fit(const MatrixXd& x, const VectorXd& y, double lambda,
                      std::vector<std::string> col_names = {});

/// Fits every grid point of one estimator, sharing the expensive
/// decomposition. Infeasible points come back empty, with the reason in
/// `reasons` when provided.
std::vector<std::optional<FittedModel>> fit_path(Method method, const MatrixXd& x, const VectorXd& y,
                                                 const std::vector<Hyperparameter>& grid,
                                                 std::vector<std::string> col_names = {},
                                                 std::vector<std::string>* reasons = nullptr);

/// NIPALS internals on the centered design, one column per component.
struct PlsComponents {
  MatrixXd weights;
  MatrixXd loadings;
  MatrixXd scores;
  VectorXd y_loadings;
};

// Throws NumericalError when fewer than k components carry covariance.
PlsComponents pls1_components(const MatrixXd& x, const VectorXd& y, int k);

VectorXd predict(const FittedModel& model, const MatrixXd& x_new);
// Checks column names against the model before predicting.
VectorXd predict(const FittedModel& model, const FeatureMatrix& x_new);

// Rank of an (already centered) matrix by column-pivoted QR.
Eigen::Index numerical_rank(const MatrixXd& x);

}  // namespace finelens
