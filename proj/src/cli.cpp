#include "finelens/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "finelens/anova.hpp"
#include "finelens/corpus.hpp"
#include "finelens/error.hpp"
#include "finelens/eval.hpp"
#include "finelens/features.hpp"
#include "finelens/serialize.hpp"
#include "finelens/synthgen.hpp"
#include "finelens/textprep.hpp"

#ifndef FINELENS_DEFAULT_LEXICON_DIR
#define FINELENS_DEFAULT_LEXICON_DIR ""
#endif

namespace finelens {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Log-fine histogram bins for the fines plot: width 0.5 over [0, 18].
constexpr double kHistLow = 0.0;
constexpr double kHistHigh = 18.0;
constexpr double kHistWidth = 0.5;

// Reference figures from the original 154-case dataset. Not reproducible
// without that data; printed next to results for comparison only.
constexpr const char* kReferenceNotes =
    "Reference values on the original enforcement dataset (154 cases):\n"
    "  ANOVA R^2 ~ 0.44, art32 coefficient 1.52, 252 article references\n"
    "  49 meta-data dummies (17 after near-zero-variance filtering), 4189 TF/TF-IDF terms\n"
    "  best test MAEs roughly 1.3 - 1.5 log-euros\n";

struct CommonOpts {
  std::string input;
  std::string output_dir;
  bool lenient = false;
};

struct PrepOpts {
  std::string lexicon_dir;
  PrepConfig config;
  int top_terms = 12;
};

struct FeaturizeOpts {
  std::string docs;
  std::string idf = "plain";
  bool nzv_meta = false;
};

struct EvalOpts {
  SplitSpec split;
  std::string grid_components;
  std::string grid_lambda;
  std::string feature_set = "Meta";
  std::string estimator = "Ridge";
};

struct SynthOpts {
  std::uint64_t seed = 42;
  int n = 200;
  double noise_sd = 0.5;
  double base = 9.0;
  std::vector<std::string> effects;
  bool text_signal = false;
  int doc_length = 80;
};

ParseMode parse_mode(const CommonOpts& o) { return o.lenient ? ParseMode::Lenient : ParseMode::Strict; }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("bad number '") + s + "' in " + what);
  }
}

// "a:b" -> a..b, otherwise a comma list.
std::vector<Hyperparameter> parse_component_grid(const std::string& s) {
  std::vector<Hyperparameter> grid;
  auto range = split_list(s, ':');
  if (range.size() == 2) {
    const auto lo = static_cast<int>(parse_number(range[0], "--grid-components"));
    const auto hi = static_cast<int>(parse_number(range[1], "--grid-components"));
    for (int k = lo; k <= hi; ++k) grid.emplace_back(k);
  } else {
    for (const auto& p : split_list(s, ',')) grid.emplace_back(static_cast<int>(parse_number(p, "--grid-components")));
  }
  for (const auto& h : grid)
    if (std::get<int>(h) < 1) throw UsageError("--grid-components entries must be >= 1");
  if (grid.empty()) throw UsageError("--grid-components is empty");
  return grid;
}

// "lo:hi:count" -> log-spaced, otherwise a comma list.
std::vector<Hyperparameter> parse_lambda_grid(const std::string& s) {
  std::vector<Hyperparameter> grid;
  auto range = split_list(s, ':');
  if (range.size() == 3) {
    const double lo = parse_number(range[0], "--grid-lambda");
    const double hi = parse_number(range[1], "--grid-lambda");
    const auto count = static_cast<int>(parse_number(range[2], "--grid-lambda"));
    if (!(lo > 0 && hi >= lo) || count < 1) throw UsageError("--grid-lambda range must be 0 < lo <= hi, count >= 1");
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      grid.emplace_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
    }
  } else {
    for (const auto& p : split_list(s, ',')) grid.emplace_back(parse_number(p, "--grid-lambda"));
  }
  for (const auto& h : grid)
    if (!(std::get<double>(h) >= 0)) throw UsageError("--grid-lambda entries must be >= 0");
  if (grid.empty()) throw UsageError("--grid-lambda is empty");
  return grid;
}

std::vector<EstimatorGrid> estimator_grids(const EvalOpts& o) {
  auto ests = default_estimators();
  for (auto& e : ests) {
    if (e.method == Method::Ridge && !o.grid_lambda.empty()) e.grid = parse_lambda_grid(o.grid_lambda);
    if (e.method != Method::Ridge && !o.grid_components.empty()) e.grid = parse_component_grid(o.grid_components);
  }
  return ests;
}

fs::path resolve_lexicon(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FINELENS_LEXICON_DIR"); env && *env) return env;
  if (*FINELENS_DEFAULT_LEXICON_DIR) return FINELENS_DEFAULT_LEXICON_DIR;
  throw UsageError("no lexicon: pass --lexicon-dir or set FINELENS_LEXICON_DIR");
}

fs::path out_path(const CommonOpts& o, const char* name) { return fs::path(o.output_dir) / name; }

std::string csv_of(const FeatureMatrix& m) {
  std::ostringstream s;
  write_csv(s, m);
  return s.str();
}

FeatureMatrix load_matrix(const fs::path& p) {
  std::istringstream in(read_file(p));
  return read_csv(in);
}

IdfVariant parse_idf(const std::string& s) {
  if (s == "plain") return IdfVariant::Plain;
  if (s == "smooth") return IdfVariant::Smooth;
  throw UsageError("--idf must be plain or smooth");
}

// ---- subcommands ----------------------------------------------------------

int cmd_ingest(const CommonOpts& o, std::ostream& out) {
  std::vector<std::string> warnings;
  const Corpus raw = load_cases(o.input, parse_mode(o), &warnings);
  const Corpus merged = merge_shared_decisions(raw);
  std::ostringstream s;
  write_cases(s, merged);
  write_file_atomic(out_path(o, "corpus.jsonl"), s.str());
  ordered_json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["input_cases"] = raw.size();
  summary["merged_cases"] = merged.size();
  summary["warnings"] = warnings;
  write_file_atomic(out_path(o, "ingest.json"), dump(summary));
  out << "ingested " << raw.size() << " cases, " << merged.size() << " after merging shared decisions\n";
  return kExitOk;
}

int cmd_preprocess(const CommonOpts& o, const PrepOpts& p, std::ostream& out) {
  p.config.validate();
  if (p.top_terms < 0) throw UsageError("--top-terms must be >= 0");
  const Corpus corpus = load_cases(o.input, parse_mode(o));
  const Lexicon lex = Lexicon::load(resolve_lexicon(p.lexicon_dir));
  const auto docs = preprocess_corpus(corpus, lex, p.config);

  // Frequency ranking without custom stopwords, the way such a list is derived.
  Lexicon no_custom = lex;
  no_custom.custom_stopwords.clear();
  const auto top = top_frequent_terms(preprocess_corpus(corpus, no_custom, p.config), p.top_terms);

  std::ostringstream s;
  write_docs(s, docs);
  write_file_atomic(out_path(o, "docs.jsonl"), s.str());

  std::size_t tokens = 0;
  std::set<std::string> distinct;
  for (const auto& d : docs) {
    tokens += d.lemmas.size();
    distinct.insert(d.lemmas.begin(), d.lemmas.end());
  }
  ordered_json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["config"] = {{"min_token_len", p.config.min_token_len},
                        {"max_token_len", p.config.max_token_len},
                        {"min_corpus_count", p.config.min_corpus_count}};
  manifest["n_docs"] = docs.size();
  manifest["n_tokens"] = tokens;
  manifest["vocabulary_size"] = distinct.size();
  ordered_json tj = ordered_json::array();
  for (const auto& [lemma, count] : top) tj.push_back({{"lemma", lemma}, {"count", count}});
  manifest["top_terms_without_custom_stopwords"] = std::move(tj);
  write_file_atomic(out_path(o, "preprocess.json"), dump(manifest));
  out << "preprocessed " << docs.size() << " documents, " << distinct.size() << " distinct lemmas\n";
  return kExitOk;
}

int cmd_featurize(const CommonOpts& o, const FeaturizeOpts& f, std::ostream& out) {
  const IdfVariant idf = parse_idf(f.idf);
  if (f.docs.empty()) throw UsageError("--docs is required");
  const Corpus corpus = load_cases(o.input, parse_mode(o));
  std::istringstream din(read_file(f.docs));
  const auto docs = read_docs(din);
  if (docs.size() != corpus.size()) throw ValidationError("docs and corpus have different lengths");
  for (std::size_t i = 0; i < docs.size(); ++i)
    if (docs[i].case_id != corpus.cases[i].case_id)
      throw ValidationError("docs row " + std::to_string(i + 1) + " is '" + docs[i].case_id + "', corpus has '" +
                            corpus.cases[i].case_id + "'");

  const FeatureMatrix meta_full = dummy_encode(corpus, all_dummy_groups());
  const NzvResult nzv = near_zero_variance_filter(meta_full);
  const auto sets = standard_feature_sets(corpus, docs, idf, f.nzv_meta);
  const Vocabulary vocab = build_vocabulary(docs);

  const char* files[] = {"meta.csv", "tf.csv", "tfidf.csv", "meta_tfidf.csv"};
  for (std::size_t i = 0; i < sets.size(); ++i) write_file_atomic(out_path(o, files[i]), csv_of(sets[i].matrix));

  std::ostringstream t;
  t << "case_id,log_fine\n";
  const auto logs = log_fines(corpus);
  for (std::size_t i = 0; i < logs.size(); ++i) t << corpus.cases[i].case_id << ',' << format_double(logs[i]) << '\n';
  write_file_atomic(out_path(o, "targets.csv"), t.str());

  std::ostringstream v;
  v << "term,df,idf\n";
  for (const auto& term : vocab.terms)
    v << term << ',' << vocab.df.at(term) << ',' << format_double(idf_weight(vocab, term, idf)) << '\n';
  write_file_atomic(out_path(o, "vocabulary.csv"), v.str());

  ordered_json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["idf"] = f.idf;
  manifest["nzv_meta"] = f.nzv_meta;
  manifest["n_cases"] = corpus.size();
  manifest["n_terms"] = vocab.terms.size();
  manifest["meta_columns"] = meta_full.col_names.size();
  manifest["meta_columns_after_nzv"] = nzv.matrix.col_names.size();
  manifest["nzv_dropped"] = nzv.dropped;
  manifest["files"] = {"meta.csv", "tf.csv", "tfidf.csv", "meta_tfidf.csv", "targets.csv", "vocabulary.csv"};
  write_file_atomic(out_path(o, "featurize.json"), dump(manifest));
  out << "featurized " << corpus.size() << " cases: " << meta_full.cols() << " meta dummies ("
      << nzv.matrix.cols() << " after NZV), " << vocab.terms.size() << " terms\n";
  return kExitOk;
}

struct LoadedFeatures {
  std::vector<FeatureSetInput> sets;
  VectorXd y;
};

LoadedFeatures load_features(const fs::path& dir) {
  LoadedFeatures lf;
  const FeatureMatrix targets = load_matrix(dir / "targets.csv");
  if (targets.col_names != std::vector<std::string>{"log_fine"}) throw ValidationError("targets.csv must have one log_fine column");
  lf.y = targets.values.col(0);
  const std::pair<const char*, const char*> files[] = {
      {"Meta", "meta.csv"}, {"TF", "tf.csv"}, {"TFIDF", "tfidf.csv"}, {"Meta+TFIDF", "meta_tfidf.csv"}};
  for (const auto& [name, file] : files) {
    FeatureMatrix m = load_matrix(dir / file);
    if (m.row_ids != targets.row_ids) throw ValidationError(std::string(file) + " rows do not match targets.csv");
    lf.sets.push_back({name, std::move(m)});
  }
  return lf;
}

std::string histogram_csv(const VectorXd& y) {
  const auto bins = static_cast<int>(std::lround((kHistHigh - kHistLow) / kHistWidth));
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double v : y) {
    // Values outside [0, 18] land in the edge bins.
    int b = static_cast<int>(std::floor((v - kHistLow) / kHistWidth));
    b = std::clamp(b, 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  std::ostringstream s;
  s << "bin_low,bin_high,count\n";
  for (int b = 0; b < bins; ++b)
    s << format_double(kHistLow + b * kHistWidth) << ',' << format_double(kHistLow + (b + 1) * kHistWidth) << ','
      << counts[static_cast<std::size_t>(b)] << '\n';
  return s.str();
}

int cmd_evaluate(const CommonOpts& o, const EvalOpts& e, std::ostream& out) {
  const LoadedFeatures lf = load_features(o.input);
  const EvalReport report = run_grid(lf.sets, lf.y, estimator_grids(e), e.split);
  write_file_atomic(out_path(o, "eval_report.json"), dump(to_json(report)));

  std::ostringstream maes, preds;
  maes << "config,train_mae,test_mae,chosen,cv_rmse\n";
  preds << "case_id,observed,predicted,estimator,feature_set\n";
  for (const auto& c : report.configs) {
    const std::string est(method_name(c.method));
    maes << c.feature_set << '/' << est << ',' << format_double(c.train_mae) << ',' << format_double(c.test_mae) << ','
         << hyper_to_string(c.chosen) << ',' << format_double(c.cv_rmse) << '\n';
    for (const auto& p : c.predictions)
      preds << p.case_id << ',' << format_double(p.observed) << ',' << format_double(p.predicted) << ',' << est << ','
            << c.feature_set << '\n';
  }
  write_file_atomic(out_path(o, "maes.csv"), maes.str());
  write_file_atomic(out_path(o, "predictions.csv"), preds.str());
  write_file_atomic(out_path(o, "fines_hist.csv"), histogram_csv(lf.y));
  for (const auto& c : report.configs)
    for (const auto& w : c.warnings) out << "warning: " << c.feature_set << ": " << w << '\n';
  out << "evaluated " << report.configs.size() << " configurations on " << report.train_ids.size() << " train / "
      << report.test_ids.size() << " test cases\n";
  return kExitOk;
}

int cmd_train(const CommonOpts& o, const EvalOpts& e, std::ostream& out) {
  const LoadedFeatures lf = load_features(o.input);
  const Method method = parse_method(e.estimator);
  if (method == Method::OLS) throw UsageError("--estimator must be PCR, PLS or Ridge");
  e.split.validate();
  auto it = std::find_if(lf.sets.begin(), lf.sets.end(), [&](const auto& s) { return s.name == e.feature_set; });
  if (it == lf.sets.end()) throw UsageError("--feature-set must be Meta, TF, TFIDF or Meta+TFIDF");
  std::vector<Hyperparameter> grid;
  for (const auto& g : estimator_grids(e))
    if (g.method == method) grid = g.grid;
  if (grid.empty()) {
    grid = method == Method::Ridge
               ? default_lambda_grid()
               : default_component_grid(it->matrix.cols(), static_cast<std::size_t>(lf.y.size()), e.split.folds);
  }
  const CvResult cv = cross_validate(it->matrix.values, lf.y, method, grid, e.split.folds, e.split.seed);
  std::vector<std::string> reasons;
  auto fitted = fit_path(method, it->matrix.values, lf.y, {cv.best}, it->matrix.col_names, &reasons);
  if (!fitted[0]) throw NumericalError("refit failed: " + reasons[0]);
  ordered_json j = to_json(*fitted[0]);
  j["feature_set"] = e.feature_set;
  j["cv_rmse"] = number_or_null(cv.best_rmse);
  ordered_json table = ordered_json::array();
  for (const auto& row : cv.table)
    table.push_back({{"hyper", hyper_to_json(row.hyper)}, {"mean_rmse", number_or_null(row.mean_rmse)}});
  j["cv_table"] = std::move(table);
  j["warnings"] = cv.warnings;
  write_file_atomic(out_path(o, "model.json"), dump(j));
  out << "trained " << e.feature_set << '/' << e.estimator << " with " << hyper_to_string(cv.best) << ", cv rmse "
      << format_double(cv.best_rmse) << '\n';
  return kExitOk;
}

int cmd_anova(const CommonOpts& o, std::ostream& out) {
  const Corpus corpus = load_cases(o.input, parse_mode(o));
  const AnovaReport rep = run_anova(corpus);
  write_file_atomic(out_path(o, "anova.json"), dump(to_json(rep)));

  std::ostringstream counts;
  counts << "article,count\n";
  for (const auto& [a, c] : article_counts(corpus)) counts << a << ',' << c << '\n';
  write_file_atomic(out_path(o, "article_counts.csv"), counts.str());

  std::ostringstream effects;
  effects << "article,coefficient,ci_low,ci_high\n";
  for (const auto& a : rep.articles) {
    if (a.aliased) continue;
    effects << a.article << ',' << format_double(*a.coefficient) << ',' << format_double(*a.ci_low) << ','
            << format_double(*a.ci_high) << '\n';
  }
  write_file_atomic(out_path(o, "article_effects.csv"), effects.str());
  out << "anova on " << rep.n << " cases: R^2 = " << format_double(rep.r_squared) << ", " << rep.aliased.size()
      << " aliased article(s)\n";
  return kExitOk;
}

int cmd_synth(const CommonOpts& o, const SynthOpts& s, std::ostream& out) {
  SynthSpec spec;
  spec.seed = s.seed;
  spec.n_cases = s.n;
  spec.noise_sd = s.noise_sd;
  spec.base_log_fine = s.base;
  spec.text_signal = s.text_signal;
  spec.doc_length = s.doc_length;
  if (!s.effects.empty()) {
    std::map<int, double> effects;
    for (const auto& e : s.effects) {
      auto eq = e.find('=');
      std::string key = e.substr(0, eq);
      if (eq == std::string::npos || key.empty()) throw UsageError("--effect expects artN=VALUE, got '" + e + "'");
      if (key.rfind("art", 0) == 0) key = key.substr(3);
      effects[static_cast<int>(parse_number(key, "--effect"))] = parse_number(e.substr(eq + 1), "--effect");
    }
    spec.set_effects(effects);
  }
  const SynthResult res = generate(spec);
  std::ostringstream c;
  write_cases(c, res.corpus);
  write_file_atomic(out_path(o, "corpus.jsonl"), c.str());
  write_file_atomic(out_path(o, "truth.json"), dump(to_json(res.truth)));
  out << "generated " << res.corpus.size() << " synthetic cases (seed " << s.seed << ")\n";
  return kExitOk;
}

std::string fmt(const nlohmann::json& v) {
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_null()) return "n/a";
  return v.dump();
}

int cmd_report(const CommonOpts& o, std::ostream& out) {
  const fs::path dir(o.input);
  std::ostringstream s;
  bool any = false;
  if (fs::exists(dir / "anova.json")) {
    any = true;
    const auto j = nlohmann::json::parse(read_file(dir / "anova.json"));
    const auto& m = j.at("model");
    s << "ANOVA of log-fines on article dummies\n";
    s << "  n = " << m.at("n") << ", df = (" << m.at("df_model") << ", " << m.at("df_resid") << ")\n";
    s << "  R^2 = " << fmt(m.at("r_squared")) << ", F = " << fmt(m.at("f_statistic")) << ", p = "
      << fmt(m.at("f_p_value")) << "\n";
    s << "  article  refs  coefficient  95% CI\n";
    for (const auto& a : j.at("articles")) {
      s << "  " << a.at("name").get<std::string>() << "  " << a.at("reference_count") << "  ";
      if (a.at("aliased").get<bool>()) {
        s << "aliased\n";
      } else {
        s << fmt(a.at("coefficient")) << "  [" << fmt(a.at("ci_low")) << ", " << fmt(a.at("ci_high")) << "]\n";
      }
    }
    s << '\n';
  }
  if (fs::exists(dir / "eval_report.json")) {
    any = true;
    const auto j = nlohmann::json::parse(read_file(dir / "eval_report.json"));
    s << "Prediction of log-fines (" << j.at("train_ids").size() << " train, " << j.at("test_ids").size()
      << " test)\n";
    s << "  config  chosen  cv_rmse  train_mae  test_mae\n";
    for (const auto& c : j.at("configs")) {
      s << "  " << c.at("feature_set").get<std::string>() << '/' << c.at("estimator").get<std::string>() << "  "
        << c.at("chosen").dump() << "  " << fmt(c.at("cv_rmse")) << "  " << fmt(c.at("train_mae")) << "  "
        << fmt(c.at("test_mae")) << '\n';
    }
    s << '\n';
  }
  if (!any) throw ValidationError("no anova.json or eval_report.json in '" + o.input + "'");
  s << kReferenceNotes;
  if (!o.output_dir.empty()) write_file_atomic(out_path(o, "report.txt"), s.str());
  out << s.str();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"finelens: regulatory fine prediction pipeline", "finelens"};
  app.require_subcommand(1);

  CommonOpts common;
  PrepOpts prep;
  FeaturizeOpts feat;
  EvalOpts ev;
  SynthOpts syn;

  auto add_io = [&](CLI::App* sub, bool input_required, bool output_required) {
    auto* in = sub->add_option("--input", common.input, "Input path");
    if (input_required) in->required();
    auto* od = sub->add_option("--output-dir", common.output_dir, "Output directory");
    if (output_required) od->required();
  };
  auto add_split = [&](CLI::App* sub) {
    sub->add_option("--seed", ev.split.seed, "Split/fold seed");
    sub->add_option("--test-fraction", ev.split.test_fraction, "Held-out test fraction");
    sub->add_option("--folds", ev.split.folds, "Cross-validation folds");
    sub->add_option("--grid-components", ev.grid_components, "PCR/PLS components: a:b or list");
    sub->add_option("--grid-lambda", ev.grid_lambda, "Ridge lambdas: lo:hi:count (log-spaced) or list");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate and merge enforcement cases");
  add_io(ingest, true, true);
  ingest->add_flag("--lenient", common.lenient, "Ignore unknown fields with a warning");

  auto* preprocess = app.add_subcommand("preprocess", "Tokenize, filter and lemmatize decision texts");
  add_io(preprocess, true, true);
  preprocess->add_flag("--lenient", common.lenient);
  preprocess->add_option("--lexicon-dir", prep.lexicon_dir, "Lexicon directory");
  preprocess->add_option("--min-token-len", prep.config.min_token_len);
  preprocess->add_option("--max-token-len", prep.config.max_token_len);
  preprocess->add_option("--min-corpus-count", prep.config.min_corpus_count);
  preprocess->add_option("--top-terms", prep.top_terms, "Most frequent lemmas to list in the manifest");

  auto* featurize = app.add_subcommand("featurize", "Build TF, TF-IDF and dummy matrices");
  add_io(featurize, true, true);
  featurize->add_flag("--lenient", common.lenient);
  featurize->add_option("--docs", feat.docs, "Tokenized documents (preprocess output)")->required();
  featurize->add_option("--idf", feat.idf, "IDF variant: plain or smooth");
  featurize->add_flag("--nzv-meta", feat.nzv_meta, "Apply the near-zero-variance filter to meta-data");

  auto* anova = app.add_subcommand("anova", "Regress log-fines on article dummies");
  add_io(anova, true, true);
  anova->add_flag("--lenient", common.lenient);

  auto* train = app.add_subcommand("train", "Cross-validate and fit one estimator on all rows");
  add_io(train, true, true);
  add_split(train);
  train->add_option("--feature-set", ev.feature_set, "Meta, TF, TFIDF or Meta+TFIDF");
  train->add_option("--estimator", ev.estimator, "PCR, PLS or Ridge");

  auto* evaluate = app.add_subcommand("evaluate", "Feature set x estimator comparison grid");
  add_io(evaluate, true, true);
  add_split(evaluate);

  auto* report = app.add_subcommand("report", "Summarize anova.json and eval_report.json");
  add_io(report, true, false);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with known effects");
  add_io(synth, false, true);
  synth->add_option("--seed", syn.seed);
  synth->add_option("--n", syn.n, "Number of cases");
  synth->add_option("--noise-sd", syn.noise_sd, "Gaussian noise on the log scale");
  synth->add_option("--base", syn.base, "Baseline log-fine");
  synth->add_option("--effect", syn.effects, "Article effect artN=VALUE (repeatable)");
  synth->add_flag("--text-signal", syn.text_signal, "Tie signal lemmas to fine size");
  synth->add_option("--doc-length", syn.doc_length, "Vocabulary draws per document");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(common, out);
    if (*preprocess) return cmd_preprocess(common, prep, out);
    if (*featurize) return cmd_featurize(common, feat, out);
    if (*anova) return cmd_anova(common, out);
    if (*train) return cmd_train(common, ev, out);
    if (*evaluate) return cmd_evaluate(common, ev, out);
    if (*report) return cmd_report(common, out);
    if (*synth) return cmd_synth(common, syn, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace finelens
