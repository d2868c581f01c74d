#include "finelens/corpus.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "finelens/error.hpp"

namespace finelens {

namespace {

using nlohmann::json;

constexpr std::string_view kFields[] = {"case_id", "country",  "year",         "sector",
                                        "articles", "fine_eur", "decision_ref", "text"};

ValidationError case_error(const std::string& id, std::string_view field, const std::string& what) {
  return ValidationError("case '" + id + "': field '" + std::string(field) + "': " + what);
}

const json& require(const json& rec, std::string_view field, const std::string& id) {
  auto it = rec.find(field);
  if (it == rec.end()) throw case_error(id, field, "missing");
  return *it;
}

std::string require_string(const json& rec, std::string_view field, const std::string& id) {
  const json& v = require(rec, field, id);
  if (!v.is_string()) throw case_error(id, field, "expected string");
  return v.get<std::string>();
}

EnforcementCase case_from_json(const json& rec) {
  if (!rec.is_object()) throw ValidationError("record is not a JSON object");
  EnforcementCase c;
  {
    auto it = rec.find("case_id");
    if (it == rec.end() || !it->is_string()) throw ValidationError("missing or non-string case_id");
    c.case_id = it->get<std::string>();
  }
  const std::string& id = c.case_id;
  c.country = require_string(rec, "country", id);

  const json& year = require(rec, "year", id);
  if (!year.is_number_integer()) throw case_error(id, "year", "expected integer");
  c.year = year.get<int>();

  c.sector = [&] {
    try {
      return parse_sector(require_string(rec, "sector", id));
    } catch (const ValidationError& e) {
      throw case_error(id, "sector", e.what());
    }
  }();

  const json& arts = require(rec, "articles", id);
  if (!arts.is_array()) throw case_error(id, "articles", "expected integer array");
  for (const json& a : arts) {
    if (!a.is_number_integer()) throw case_error(id, "articles", "expected integer array");
    c.articles.insert(a.get<int>());
  }

  const json& fine = require(rec, "fine_eur", id);
  if (!fine.is_number()) throw case_error(id, "fine_eur", "expected number");
  c.fine_eur = fine.get<double>();

  c.decision_ref = require_string(rec, "decision_ref", id);
  c.text = require_string(rec, "text", id);
  return c;
}

}  // namespace

std::string_view sector_name(Sector s) {
  switch (s) {
    case Sector::Individuals: return "Individuals";
    case Sector::PublicSector: return "PublicSector";
    case Sector::Telecom: return "Telecom";
    case Sector::PrivateSector: return "PrivateSector";
    case Sector::Unknown: return "Unknown";
  }
  return "Unknown";
}

Sector parse_sector(std::string_view name) {
  for (Sector s : {Sector::Individuals, Sector::PublicSector, Sector::Telecom,
                   Sector::PrivateSector, Sector::Unknown}) {
    if (sector_name(s) == name) return s;
  }
  throw ValidationError("unknown sector '" + std::string(name) + "'");
}

void validate_case(const EnforcementCase& c) {
  const std::string& id = c.case_id;
  if (id.empty()) throw ValidationError("empty case_id");
  if (c.country.size() != 2 || !std::isupper(static_cast<unsigned char>(c.country[0])) ||
      !std::isupper(static_cast<unsigned char>(c.country[1])))
    throw case_error(id, "country", "expected uppercase two-letter code, got '" + c.country + "'");
  if (c.year < 1000 || c.year > 9999)
    throw case_error(id, "year", "expected a four-digit year, got " + std::to_string(c.year));
  if (c.articles.empty()) throw case_error(id, "articles", "no articles referenced");
  for (int a : c.articles) {
    if (a < 1 || a > 99) throw case_error(id, "articles", "article " + std::to_string(a) + " outside [1, 99]");
  }
  if (!std::isfinite(c.fine_eur)) throw case_error(id, "fine_eur", "non-finite fine");
  if (c.fine_eur <= 0.0) throw case_error(id, "fine_eur", "non-positive fine");
  if (c.decision_ref.empty()) throw case_error(id, "decision_ref", "empty");
  if (c.text.empty()) throw case_error(id, "text", "empty decision text");
}

void validate_corpus(const Corpus& corpus) {
  std::unordered_set<std::string> seen;
  for (const auto& c : corpus.cases) {
    validate_case(c);
    if (!seen.insert(c.case_id).second) throw ValidationError("duplicate case_id '" + c.case_id + "'");
  }
}

Corpus parse_cases(std::istream& in, ParseMode mode, std::vector<std::string>* warnings) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + "parse error: " + e.what());
    }
    EnforcementCase c;
    try {
      c = case_from_json(rec);
      for (const auto& [key, _] : rec.items()) {
        bool known = false;
        for (auto f : kFields) known = known || key == f;
        if (known) continue;
        if (mode == ParseMode::Strict)
          throw case_error(c.case_id, key, "unknown field (use lenient mode to ignore)");
        if (warnings) warnings->push_back(where + "ignoring unknown field '" + key + "'");
      }
      validate_case(c);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    if (!seen.insert(c.case_id).second)
      throw ValidationError(where + "duplicate case_id '" + c.case_id + "'");
    corpus.cases.push_back(std::move(c));
  }
  return corpus;
}

Corpus load_cases(const std::filesystem::path& path, ParseMode mode, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return parse_cases(in, mode, warnings);
}

void write_cases(std::ostream& out, const Corpus& corpus) {
  for (const auto& c : corpus.cases) {
    nlohmann::ordered_json rec;
    rec["case_id"] = c.case_id;
    rec["country"] = c.country;
    rec["year"] = c.year;
    rec["sector"] = std::string(sector_name(c.sector));
    rec["articles"] = std::vector<int>(c.articles.begin(), c.articles.end());
    rec["fine_eur"] = c.fine_eur;
    rec["decision_ref"] = c.decision_ref;
    rec["text"] = c.text;
    out << rec.dump() << '\n';
  }
}

Corpus merge_shared_decisions(const Corpus& corpus) {
  Corpus merged;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& c : corpus.cases) {
    auto [it, fresh] = slot.try_emplace(c.decision_ref, merged.cases.size());
    if (fresh) {
      merged.cases.push_back(c);
      continue;
    }
    EnforcementCase& first = merged.cases[it->second];
    if (first.country != c.country || first.year != c.year) {
      throw ValidationError("cases '" + first.case_id + "' and '" + c.case_id + "' share decision '" +
                            c.decision_ref + "' but disagree on country or year");
    }
    first.articles.insert(c.articles.begin(), c.articles.end());
    first.fine_eur += c.fine_eur;
  }
  return merged;
}

std::vector<double> log_fines(const Corpus& corpus) {
  std::vector<double> out;
  out.reserve(corpus.size());
  for (const auto& c : corpus.cases) {
    if (!(c.fine_eur > 0.0)) throw ValidationError("case '" + c.case_id + "': non-positive fine");
    out.push_back(std::log(c.fine_eur));
  }
  return out;
}

}  // namespace finelens
