#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finelens/anova.hpp"
#include "finelens/eval.hpp"
#include "finelens/linreg.hpp"
#include "finelens/synthgen.hpp"
#include "finelens/textprep.hpp"

namespace finelens {

inline constexpr int kSchemaVersion = 1;

using ordered_json = nlohmann::ordered_json;

// Non-finite doubles become null.
ordered_json number_or_null(double v);

ordered_json to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

ordered_json to_json(const AnovaReport& report);
ordered_json to_json(const EvalReport& report);
ordered_json to_json(const SynthTruth& truth);
ordered_json hyper_to_json(const Hyperparameter& h);

void write_docs(std::ostream& out, const std::vector<TokenizedDoc>& docs);
std::vector<TokenizedDoc> read_docs(std::istream& in);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace finelens
