#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace finelens {

enum class Sector { Individuals, PublicSector, Telecom, PrivateSector, Unknown };

std::string_view sector_name(Sector s);
// Throws ValidationError on an unknown name.
Sector parse_sector(std::string_view name);

/// One fined enforcement decision.
struct EnforcementCase {
  std::string case_id;
  std::string country;  // ISO-3166 alpha-2, uppercase
  int year = 0;
  Sector sector = Sector::Unknown;
  std::set<int> articles;
  double fine_eur = 0.0;
  std::string decision_ref;
  std::string text;

  bool operator==(const EnforcementCase&) const = default;
};

struct Corpus {
  std::vector<EnforcementCase> cases;

  std::size_t size() const { return cases.size(); }
  bool empty() const { return cases.empty(); }
  bool operator==(const Corpus&) const = default;
};

enum class ParseMode { Strict, Lenient };

// Throws ValidationError naming the case id and the offending field.
void validate_case(const EnforcementCase& c);
// Validates every case plus id uniqueness.
void validate_corpus(const Corpus& corpus);

/// Reads JSON Lines, one case per line. Blank lines are skipped. In strict
/// mode unknown fields are an error; in lenient mode they are reported
/// through `warnings` and ignored.
Corpus parse_cases(std::istream& in, ParseMode mode = ParseMode::Strict,
                   std::vector<std::string>* warnings = nullptr);
Corpus load_cases(const std::filesystem::path& path, ParseMode mode = ParseMode::Strict,
                  std::vector<std::string>* warnings = nullptr);

void write_cases(std::ostream& out, const Corpus& corpus);

/// Collapses cases that share a decision_ref. Articles are unioned, fines
/// summed, everything else comes from the first occurrence.
Corpus merge_shared_decisions(const Corpus& corpus);

std::vector<double> log_fines(const Corpus& corpus);

}  // namespace finelens
