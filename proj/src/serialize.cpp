#include "finelens/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "finelens/error.hpp"

namespace finelens {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

namespace {

ordered_json optional_number(const std::optional<double>& v) { return v ? number_or_null(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json hyper_to_json(const Hyperparameter& h) {
  if (const int* k = std::get_if<int>(&h)) return {{"components", *k}};
  if (const double* l = std::get_if<double>(&h)) return {{"lambda", *l}};
  return nullptr;
}

ordered_json to_json(const FittedModel& model) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = std::string(method_name(model.method));
  j["hyper"] = hyper_to_json(model.hyper);
  j["intercept"] = model.intercept;
  ordered_json coefs = ordered_json::array();
  for (std::size_t i = 0; i < model.col_names.size(); ++i)
    coefs.push_back({{"name", model.col_names[i]}, {"value", model.coefficients(static_cast<Eigen::Index>(i))}});
  j["coefficients"] = std::move(coefs);
  return j;
}

FittedModel model_from_json(const nlohmann::json& j) {
  try {
    FittedModel m;
    m.method = parse_method(j.at("method").get<std::string>());
    const auto& h = j.at("hyper");
    if (h.is_object() && h.contains("components")) {
      m.hyper = h.at("components").get<int>();
    } else if (h.is_object() && h.contains("lambda")) {
      m.hyper = h.at("lambda").get<double>();
    }
    m.intercept = j.at("intercept").get<double>();
    const auto& coefs = j.at("coefficients");
    m.coefficients.resize(static_cast<Eigen::Index>(coefs.size()));
    for (std::size_t i = 0; i < coefs.size(); ++i) {
      m.col_names.push_back(coefs[i].at("name").get<std::string>());
      m.coefficients(static_cast<Eigen::Index>(i)) = coefs[i].at("value").get<double>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model JSON: ") + e.what());
  }
}

ordered_json to_json(const AnovaReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = {{"n", r.n},
                {"df_model", r.df_model},
                {"df_resid", r.df_resid},
                {"intercept", r.intercept},
                {"r_squared", r.r_squared},
                {"f_statistic", number_or_null(r.f_statistic)},
                {"f_p_value", r.f_p_value}};
  ordered_json arts = ordered_json::array();
  for (const auto& a : r.articles) {
    arts.push_back({{"article", a.article},
                    {"name", "art" + std::to_string(a.article)},
                    {"reference_count", a.reference_count},
                    {"aliased", a.aliased},
                    {"coefficient", optional_number(a.coefficient)},
                    {"std_error", optional_number(a.std_error)},
                    {"ci_low", optional_number(a.ci_low)},
                    {"ci_high", optional_number(a.ci_high)},
                    {"p_value", optional_number(a.p_value)}});
  }
  j["articles"] = std::move(arts);
  j["aliased"] = r.aliased;
  return j;
}

ordered_json to_json(const EvalReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["split"] = {{"seed", r.spec.seed}, {"test_fraction", r.spec.test_fraction}, {"folds", r.spec.folds}};
  j["train_ids"] = r.train_ids;
  j["test_ids"] = r.test_ids;
  ordered_json configs = ordered_json::array();
  for (const auto& c : r.configs) {
    ordered_json cj;
    cj["feature_set"] = c.feature_set;
    cj["estimator"] = std::string(method_name(c.method));
    cj["chosen"] = hyper_to_json(c.chosen);
    cj["cv_rmse"] = number_or_null(c.cv_rmse);
    cj["train_mae"] = number_or_null(c.train_mae);
    cj["test_mae"] = number_or_null(c.test_mae);
    ordered_json table = ordered_json::array();
    for (const auto& row : c.cv_table) {
      ordered_json folds = ordered_json::array();
      for (double v : row.fold_rmse) folds.push_back(number_or_null(v));
      table.push_back({{"hyper", hyper_to_json(row.hyper)},
                       {"mean_rmse", number_or_null(row.mean_rmse)},
                       {"fold_rmse", std::move(folds)}});
    }
    cj["cv_table"] = std::move(table);
    cj["warnings"] = c.warnings;
    ordered_json preds = ordered_json::array();
    for (const auto& p : c.predictions)
      preds.push_back({{"case_id", p.case_id}, {"observed", p.observed}, {"predicted", number_or_null(p.predicted)}});
    cj["predictions"] = std::move(preds);
    configs.push_back(std::move(cj));
  }
  j["configs"] = std::move(configs);
  return j;
}

ordered_json to_json(const SynthTruth& t) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = t.seed;
  j["base_log_fine"] = t.base_log_fine;
  j["noise_sd"] = t.noise_sd;
  ordered_json effects = ordered_json::object();
  for (const auto& [a, e] : t.effects) effects["art" + std::to_string(a)] = e;
  j["effects"] = std::move(effects);
  j["noise"] = t.noise;
  j["log_fines"] = t.log_fines;
  return j;
}

void write_docs(std::ostream& out, const std::vector<TokenizedDoc>& docs) {
  for (const auto& d : docs) {
    ordered_json j;
    j["case_id"] = d.case_id;
    j["lemmas"] = d.lemmas;
    out << j.dump() << '\n';
  }
}

std::vector<TokenizedDoc> read_docs(std::istream& in) {
  std::vector<TokenizedDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      docs.push_back({j.at("case_id").get<std::string>(), j.at("lemmas").get<std::vector<std::string>>()});
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("docs line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace finelens
