#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finelens/anova.hpp"
#include "finelens/cli.hpp"
#include "finelens/corpus.hpp"
#include "finelens/distributions.hpp"
#include "finelens/error.hpp"
#include "finelens/eval.hpp"
#include "finelens/features.hpp"
#include "finelens/linreg.hpp"
#include "finelens/serialize.hpp"
#include "finelens/synthgen.hpp"
#include "finelens/textprep.hpp"

namespace py = pybind11;
using namespace finelens;

namespace {

std::string corpus_jsonl(const Corpus& c) {
  std::ostringstream s;
  write_cases(s, c);
  return s.str();
}

Corpus corpus_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_cases(in, ParseMode::Strict);
}

std::vector<TokenizedDoc> docs_from(const std::vector<std::pair<std::string, std::vector<std::string>>>& raw) {
  std::vector<TokenizedDoc> docs;
  for (const auto& [id, lemmas] : raw) docs.push_back({id, lemmas});
  return docs;
}

py::tuple matrix_tuple(const FeatureMatrix& m) { return py::make_tuple(m.row_ids, m.col_names, m.values); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "finelens native core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<Method>(m, "Method")
      .value("OLS", Method::OLS)
      .value("PCR", Method::PCR)
      .value("PLS", Method::PLS)
      .value("Ridge", Method::Ridge);

  py::class_<FittedModel>(m, "FittedModel")
      .def_readonly("method", &FittedModel::method)
      .def_readonly("intercept", &FittedModel::intercept)
      .def_readonly("coefficients", &FittedModel::coefficients)
      .def_readonly("col_names", &FittedModel::col_names)
      .def_property_readonly("hyper", [](const FittedModel& f) -> py::object {
        if (const int* k = std::get_if<int>(&f.hyper)) return py::int_(*k);
        if (const double* l = std::get_if<double>(&f.hyper)) return py::float_(*l);
        return py::none();
      })
      .def("predict", [](const FittedModel& f, const MatrixXd& x) { return predict(f, x); })
      .def("to_json", [](const FittedModel& f) { return to_json(f).dump(); })
      .def("__repr__", [](const FittedModel& f) {
        return "<FittedModel " + std::string(method_name(f.method)) + " " + hyper_to_string(f.hyper) + ">";
      });

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a finelens subcommand in-process; returns (exit_code, stdout, stderr).");

  m.def("synth_jsonl",
        [](std::uint64_t seed, int n, double noise_sd, const std::map<int, double>& effects, bool text_signal) {
          SynthSpec spec;
          spec.seed = seed;
          spec.n_cases = n;
          spec.noise_sd = noise_sd;
          spec.text_signal = text_signal;
          if (!effects.empty()) spec.set_effects(effects);
          const SynthResult r = generate(spec);
          return py::make_tuple(corpus_jsonl(r.corpus), to_json(r.truth).dump());
        },
        py::arg("seed") = 42, py::arg("n") = 200, py::arg("noise_sd") = 0.5,
        py::arg("effects") = std::map<int, double>{}, py::arg("text_signal") = false);

  m.def("validate_jsonl", [](const std::string& text) { return corpus_jsonl(corpus_from_jsonl(text)); },
        py::arg("text"), "Parse and validate JSONL cases; returns the canonical serialization.");

  m.def("anova_json", [](const std::string& text) { return to_json(run_anova(corpus_from_jsonl(text))).dump(); },
        py::arg("corpus_jsonl"));

  m.def("preprocess_text",
        [](const std::string& text, const std::string& lexicon_dir) {
          return preprocess_document(text, Lexicon::load(lexicon_dir), PrepConfig{});
        },
        py::arg("text"), py::arg("lexicon_dir"));

  m.def("preprocess_jsonl",
        [](const std::string& text, const std::string& lexicon_dir) {
          std::vector<std::pair<std::string, std::vector<std::string>>> out;
          for (auto& d : preprocess_corpus(corpus_from_jsonl(text), Lexicon::load(lexicon_dir), PrepConfig{}))
            out.emplace_back(d.case_id, d.lemmas);
          return out;
        },
        py::arg("corpus_jsonl"), py::arg("lexicon_dir"));

  m.def("tf_matrix",
        [](const std::vector<std::pair<std::string, std::vector<std::string>>>& raw) {
          const auto docs = docs_from(raw);
          return matrix_tuple(tf_matrix(docs, build_vocabulary(docs)));
        },
        py::arg("docs"), "docs: list of (case_id, lemmas); returns (row_ids, terms, matrix).");

  m.def("tfidf_matrix",
        [](const std::vector<std::pair<std::string, std::vector<std::string>>>& raw, bool smooth) {
          const auto docs = docs_from(raw);
          return matrix_tuple(tfidf_matrix(docs, build_vocabulary(docs), smooth ? IdfVariant::Smooth : IdfVariant::Plain));
        },
        py::arg("docs"), py::arg("smooth") = false);

  m.def("ols_fit",
        [](const MatrixXd& x, const VectorXd& y) {
          const OlsResult r = ols_fit(x, y);
          py::dict inf;
          inf["retained"] = r.inference.retained;
          inf["standard_errors"] = r.inference.standard_errors;
          inf["p_values"] = r.inference.p_values;
          inf["ci_low"] = r.inference.ci_low;
          inf["ci_high"] = r.inference.ci_high;
          inf["r_squared"] = r.inference.r_squared;
          inf["f_statistic"] = r.inference.f_statistic;
          inf["f_p_value"] = r.inference.f_p_value;
          inf["dropped_aliased"] = r.inference.dropped_aliased;
          return py::make_tuple(r.model, inf);
        },
        py::arg("x"), py::arg("y"));
  m.def("pcr_fit", [](const MatrixXd& x, const VectorXd& y, int k) { return pcr_fit(x, y, k); }, py::arg("x"),
        py::arg("y"), py::arg("k"));
  m.def("pls1_fit", [](const MatrixXd& x, const VectorXd& y, int k) { return pls1_fit(x, y, k); }, py::arg("x"),
        py::arg("y"), py::arg("k"));
  m.def("ridge_fit", [](const MatrixXd& x, const VectorXd& y, double lambda) { return ridge_fit(x, y, lambda); },
        py::arg("x"), py::arg("y"), py::arg("lam"));

  m.def("split", [](std::size_t n, std::uint64_t seed, double test_fraction) {
    SplitSpec spec;
    spec.seed = seed;
    spec.test_fraction = test_fraction;
    const TrainTestSplit s = split(n, spec);
    return py::make_tuple(s.train, s.test);
  }, py::arg("n"), py::arg("seed") = 42, py::arg("test_fraction") = 0.2);

  m.def("t_quantile", &t_quantile, py::arg("p"), py::arg("df"));
  m.def("f_pvalue", &f_pvalue, py::arg("f"), py::arg("df1"), py::arg("df2"));
}
