#include "finelens/linreg.hpp"

#include <cmath>
#include <stdexcept>

#include "finelens/distributions.hpp"
#include "finelens/error.hpp"

namespace finelens {

namespace {

std::vector<std::string> resolve_names(std::vector<std::string> names, Eigen::Index p) {
  if (names.empty()) {
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw ValidationError("column name count does not match design width");
  return names;
}

void check_shapes(const MatrixXd& x, const VectorXd& y) {
  if (x.rows() != y.size()) throw ValidationError("design rows and response length differ");
  if (x.rows() < 2) throw ValidationError("at least two observations are required");
}

FittedModel back_map(Method method, Hyperparameter hyper, const CenteredDesign& cd, VectorXd beta,
                     const std::vector<std::string>& names) {
  FittedModel m;
  m.method = method;
  m.hyper = hyper;
  m.intercept = cd.y_mean - cd.col_means.dot(beta);
  m.coefficients = std::move(beta);
  m.col_names = names;
  return m;
}

// Householder QR taking columns in their original order; a column whose
// remaining norm falls below kRankTolerance times its own norm is aliased.
struct SequentialQr {
  std::vector<Eigen::Index> retained;
  std::vector<Eigen::Index> aliased;
  MatrixXd r;
  VectorXd qty;
};

SequentialQr sequential_qr(const MatrixXd& xc, const VectorXd& yc) {
  const Eigen::Index n = xc.rows();
  const Eigen::Index p = xc.cols();
  MatrixXd a = xc;
  VectorXd b = yc;
  SequentialQr out;
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double own = xc.col(j).norm();
    const double rem = k < n ? a.col(j).tail(n - k).norm() : 0.0;
    if (own == 0.0 || rem <= kRankTolerance * own) {
      out.aliased.push_back(j);
      continue;
    }
    VectorXd v = a.col(j).tail(n - k);
    const double alpha = v(0) >= 0 ? -rem : rem;
    v(0) -= alpha;
    const double scale = 2.0 / v.squaredNorm();
    auto block = a.block(k, j, n - k, p - j);
    block.noalias() -= (scale * v) * (v.transpose() * block);
    auto tail = b.tail(n - k);
    tail -= (scale * v.dot(tail)) * v;
    out.retained.push_back(j);
    ++k;
  }
  const auto r = static_cast<Eigen::Index>(out.retained.size());
  out.r = MatrixXd::Zero(r, r);
  for (Eigen::Index m = 0; m < r; ++m) out.r.col(m).head(m + 1) = a.col(out.retained[static_cast<std::size_t>(m)]).head(m + 1);
  out.qty = b.head(r);
  return out;
}

// Thin SVD of the centered design plus regression of y on the component scores.
struct PcrBasis {
  MatrixXd v;
  VectorXd gamma;  // u_i' y / s_i
  Eigen::Index rank = 0;
};

PcrBasis pcr_basis(const CenteredDesign& cd) {
  Eigen::JacobiSVD<MatrixXd> svd(cd.x_centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  PcrBasis basis;
  if (s.size() == 0 || s(0) == 0.0) return basis;
  while (basis.rank < s.size() && s(basis.rank) > kRankTolerance * s(0)) ++basis.rank;
  basis.v = svd.matrixV().leftCols(basis.rank);
  basis.gamma = (svd.matrixU().leftCols(basis.rank).transpose() * cd.y_centered).cwiseQuotient(s.head(basis.rank));
  return basis;
}

struct NipalsTrace {
  MatrixXd w;  // weights
  MatrixXd p;  // loadings
  VectorXd q;
  MatrixXd t;  // scores
};

// Runs up to `k` NIPALS PLS1 components; stops early (fewer columns) when the
// remaining covariance vanishes.
NipalsTrace nipals(const CenteredDesign& cd, Eigen::Index k) {
  MatrixXd x = cd.x_centered;
  VectorXd y = cd.y_centered;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  NipalsTrace tr{MatrixXd(p, k), MatrixXd(p, k), VectorXd(k), MatrixXd(n, k)};
  double first_norm = 0.0;
  Eigen::Index a = 0;
  for (; a < k; ++a) {
    VectorXd w = x.transpose() * y;
    const double wn = w.norm();
    if (a == 0) first_norm = wn;
    if (wn == 0.0 || wn <= kRankTolerance * first_norm) break;
    w /= wn;
    VectorXd t = x * w;
    const double tt = t.squaredNorm();
    VectorXd load = x.transpose() * t / tt;
    const double q = y.dot(t) / tt;
    x.noalias() -= t * load.transpose();
    y -= q * t;
    tr.w.col(a) = w;
    tr.p.col(a) = load;
    tr.q(a) = q;
    tr.t.col(a) = t;
  }
  tr.w.conservativeResize(p, a);
  tr.p.conservativeResize(p, a);
  tr.q.conservativeResize(a);
  tr.t.conservativeResize(n, a);
  return tr;
}

VectorXd pls_coefficients(const NipalsTrace& tr, Eigen::Index k) {
  const MatrixXd w = tr.w.leftCols(k);
  const MatrixXd ptw = tr.p.leftCols(k).transpose() * w;
  return w * ptw.partialPivLu().solve(tr.q.head(k));
}

class RidgeSystem {
 public:
  explicit RidgeSystem(const CenteredDesign& cd) : cd_(cd), dual_(cd.x_centered.cols() > cd.x_centered.rows()) {
    const MatrixXd& x = cd.x_centered;
    if (dual_) {
      gram_ = x * x.transpose();
    } else {
      gram_ = x.transpose() * x;
      rhs_ = x.transpose() * cd.y_centered;
    }
  }

  VectorXd solve(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw NumericalError("ridge lambda must be finite and >= 0");
    const Eigen::Index p = cd_.x_centered.cols();
    if (lambda == 0.0) {
      if (!full_rank_) full_rank_ = numerical_rank(cd_.x_centered) == p;
      if (!*full_rank_) throw NumericalError("ridge: singular system at lambda = 0 (design not full column rank)");
    }
    MatrixXd a = gram_;
    a.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("ridge: system is not positive definite");
    if (dual_) return cd_.x_centered.transpose() * llt.solve(cd_.y_centered);
    return llt.solve(rhs_);
  }

 private:
  const CenteredDesign& cd_;
  bool dual_;
  MatrixXd gram_;
  VectorXd rhs_;
  std::optional<bool> full_rank_;
};

int component_count(const Hyperparameter& h) {
  if (const int* k = std::get_if<int>(&h)) return *k;
  throw std::invalid_argument("expected an integer component count");
}

double shrinkage(const Hyperparameter& h) {
  if (const double* l = std::get_if<double>(&h)) return *l;
  throw std::invalid_argument("expected a real-valued lambda");
}

}  // namespace

CenteredDesign center(const MatrixXd& x, const VectorXd& y) {
  check_shapes(x, y);
  CenteredDesign cd;
  cd.col_means = x.colwise().mean().transpose();
  cd.x_centered = x.rowwise() - cd.col_means.transpose();
  cd.y_mean = y.mean();
  cd.y_centered = y.array() - cd.y_mean;
  return cd;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::OLS: return "OLS";
    case Method::PCR: return "PCR";
    case Method::PLS: return "PLS";
    case Method::Ridge: return "Ridge";
  }
  return "OLS";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::OLS, Method::PCR, Method::PLS, Method::Ridge}) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown estimator '" + std::string(name) + "'");
}

std::string hyper_to_string(const Hyperparameter& h) {
  if (const int* k = std::get_if<int>(&h)) return "k=" + std::to_string(*k);
  if (const double* l = std::get_if<double>(&h)) return "lambda=" + format_double(*l);
  return "none";
}

Eigen::Index numerical_rank(const MatrixXd& x) {
  if (x.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  qr.setThreshold(kRankTolerance);
  return qr.rank();
}

OlsResult ols_fit(const MatrixXd& x, const VectorXd& y, std::vector<std::string> col_names) {
  auto names = resolve_names(std::move(col_names), x.cols());
  const CenteredDesign cd = center(x, y);
  const SequentialQr qr = sequential_qr(cd.x_centered, cd.y_centered);
  const auto n = static_cast<int>(x.rows());
  const auto r = static_cast<int>(qr.retained.size());
  if (r == 0) throw NumericalError("ols: design has rank 0 after centering");
  if (n <= r + 1)
    throw NumericalError("ols: " + std::to_string(n) + " observations cannot support " + std::to_string(r) +
                         " columns plus an intercept");

  const VectorXd beta_ret = qr.r.triangularView<Eigen::Upper>().solve(qr.qty);
  VectorXd beta = VectorXd::Zero(x.cols());
  MatrixXd x_ret(x.rows(), r);
  VectorXd means_ret(r);
  for (int m = 0; m < r; ++m) {
    const Eigen::Index j = qr.retained[static_cast<std::size_t>(m)];
    beta(j) = beta_ret(m);
    x_ret.col(m) = cd.x_centered.col(j);
    means_ret(m) = cd.col_means(j);
  }

  OlsResult res;
  res.model = back_map(Method::OLS, std::monostate{}, cd, beta, names);
  OlsInference& inf = res.inference;
  for (auto j : qr.retained) inf.retained.push_back(names[static_cast<std::size_t>(j)]);
  for (auto j : qr.aliased) inf.dropped_aliased.push_back(names[static_cast<std::size_t>(j)]);

  const VectorXd resid = cd.y_centered - x_ret * beta_ret;
  inf.n = n;
  inf.df_model = r;
  inf.df_resid = n - r - 1;
  inf.rss = resid.squaredNorm();
  inf.tss = cd.y_centered.squaredNorm();
  if (inf.tss == 0.0) throw NumericalError("ols: response has zero variance");
  inf.r_squared = std::clamp(1.0 - inf.rss / inf.tss, 0.0, 1.0);
  const double sigma2 = inf.rss / inf.df_resid;
  const double ess = std::max(inf.tss - inf.rss, 0.0);
  if (inf.rss == 0.0) {
    inf.f_statistic = std::numeric_limits<double>::infinity();
    inf.f_p_value = 0.0;
  } else {
    inf.f_statistic = (ess / inf.df_model) / sigma2;
    inf.f_p_value = f_pvalue(inf.f_statistic, inf.df_model, inf.df_resid);
  }

  const MatrixXd r_inv = qr.r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(r, r));
  const MatrixXd cov = sigma2 * (r_inv * r_inv.transpose());
  const double tcrit = t_quantile(0.975, inf.df_resid);
  inf.coefficients = beta_ret;
  inf.standard_errors = cov.diagonal().cwiseSqrt();
  inf.t_values.resize(r);
  inf.p_values.resize(r);
  for (int m = 0; m < r; ++m) {
    const double se = inf.standard_errors(m);
    inf.t_values(m) = se > 0 ? beta_ret(m) / se : std::copysign(std::numeric_limits<double>::infinity(), beta_ret(m));
    inf.p_values(m) = se > 0 ? t_two_sided_pvalue(inf.t_values(m), inf.df_resid) : 0.0;
  }
  inf.ci_low = beta_ret - tcrit * inf.standard_errors;
  inf.ci_high = beta_ret + tcrit * inf.standard_errors;
  inf.intercept = res.model.intercept;
  inf.intercept_se = std::sqrt(sigma2 / n + means_ret.dot(cov * means_ret));
  return res;
}

FittedModel pcr_fit(const MatrixXd& x, const VectorXd& y, int k, std::vector<std::string> col_names) {
  auto models = fit_path(Method::PCR, x, y, {k}, std::move(col_names));
  if (!models[0]) throw NumericalError("pcr: k = " + std::to_string(k) + " outside [1, rank]");
  return *std::move(models[0]);
}

FittedModel pls1_fit(const MatrixXd& x, const VectorXd& y, int k, std::vector<std::string> col_names) {
  std::vector<std::string> reasons;
  auto models = fit_path(Method::PLS, x, y, {k}, std::move(col_names), &reasons);
  if (!models[0]) throw NumericalError("pls: " + reasons[0]);
  return *std::move(models[0]);
}

FittedModel ridge_fit(const MatrixXd& x, const VectorXd& y, double lambda, std::vector<std::string> col_names) {
  auto names = resolve_names(std::move(col_names), x.cols());
  const CenteredDesign cd = center(x, y);
  RidgeSystem sys(cd);
  return back_map(Method::Ridge, lambda, cd, sys.solve(lambda), names);
}

std::vector<std::optional<FittedModel>> fit_path(Method method, const MatrixXd& x, const VectorXd& y,
                                                 const std::vector<Hyperparameter>& grid,
                                                 std::vector<std::string> col_names,
                                                 std::vector<std::string>* reasons) {
  auto names = resolve_names(std::move(col_names), x.cols());
  const CenteredDesign cd = center(x, y);
  std::vector<std::optional<FittedModel>> out(grid.size());
  if (reasons) reasons->assign(grid.size(), "");
  auto reject = [&](std::size_t i, std::string why) {
    if (reasons) (*reasons)[i] = std::move(why);
  };

  switch (method) {
    case Method::OLS: {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
          out[i] = ols_fit(x, y, names).model;
        } catch (const NumericalError& e) {
          reject(i, e.what());
        }
      }
      break;
    }
    case Method::PCR: {
      const PcrBasis basis = pcr_basis(cd);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const int k = component_count(grid[i]);
        if (k < 1 || k > basis.rank) {
          reject(i, "k = " + std::to_string(k) + " outside [1, " + std::to_string(basis.rank) + "]");
          continue;
        }
        VectorXd beta = basis.v.leftCols(k) * basis.gamma.head(k);
        out[i] = back_map(Method::PCR, k, cd, std::move(beta), names);
      }
      break;
    }
    case Method::PLS: {
      int k_max = 0;
      for (const auto& h : grid) k_max = std::max(k_max, component_count(h));
      const Eigen::Index rank = numerical_rank(cd.x_centered);
      const NipalsTrace tr = nipals(cd, std::min<Eigen::Index>(k_max, rank));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const int k = component_count(grid[i]);
        if (k < 1 || k > rank) {
          reject(i, "k = " + std::to_string(k) + " outside [1, " + std::to_string(rank) + "]");
          continue;
        }
        if (k > tr.q.size()) {
          reject(i, "no remaining covariance after " + std::to_string(tr.q.size()) + " components");
          continue;
        }
        out[i] = back_map(Method::PLS, k, cd, pls_coefficients(tr, k), names);
      }
      break;
    }
    case Method::Ridge: {
      RidgeSystem sys(cd);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lambda = shrinkage(grid[i]);
        try {
          out[i] = back_map(Method::Ridge, lambda, cd, sys.solve(lambda), names);
        } catch (const NumericalError& e) {
          reject(i, e.what());
        }
      }
      break;
    }
  }
  return out;
}

PlsComponents pls1_components(const MatrixXd& x, const VectorXd& y, int k) {
  const CenteredDesign cd = center(x, y);
  if (k < 1 || k > numerical_rank(cd.x_centered)) throw NumericalError("pls: k outside [1, rank]");
  NipalsTrace tr = nipals(cd, k);
  if (tr.q.size() < k) throw NumericalError("pls: no remaining covariance");
  return {std::move(tr.w), std::move(tr.p), std::move(tr.t), std::move(tr.q)};
}

VectorXd predict(const FittedModel& model, const MatrixXd& x_new) {
  if (x_new.cols() != model.coefficients.size())
    throw ValidationError("predict: design has " + std::to_string(x_new.cols()) + " columns, model expects " +
                          std::to_string(model.coefficients.size()));
  VectorXd out = x_new * model.coefficients;
  out.array() += model.intercept;
  return out;
}

VectorXd predict(const FittedModel& model, const FeatureMatrix& x_new) {
  if (x_new.col_names != model.col_names) throw ValidationError("predict: column names do not match the model");
  return predict(model, x_new.values);
}

}  // namespace finelens
