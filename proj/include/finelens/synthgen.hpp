#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finelens/corpus.hpp"

namespace finelens {

struct SynthArticle {
  int article = 0;
  double effect = 0.0;  // additive, log-euro scale
  double weight = 1.0;  // relative sampling weight
};

struct SynthSpec {
  std::uint64_t seed = 42;
  int n_cases = 200;
  double base_log_fine = 9.0;
  double noise_sd = 0.5;
  int max_articles_per_case = 3;
  std::vector<SynthArticle> articles = default_articles();
  std::vector<std::string> countries{"BE", "DE", "ES", "FR", "GR", "HU", "IT", "NL", "RO", "SE"};
  std::vector<int> years{2018, 2019, 2020};
  std::vector<Sector> sectors{Sector::Individuals, Sector::PublicSector, Sector::Telecom, Sector::PrivateSector,
                              Sector::Unknown};
  std::vector<std::string> vocabulary = default_vocabulary();
  int doc_length = 80;  // vocabulary draws per document
  bool text_signal = false;
  std::vector<std::string> signal_lemmas{"breach", "encryption", "password"};
  double signal_rate = 1.0;  // signal tokens per unit log-fine

  static std::vector<SynthArticle> default_articles();
  // Drawn from the bundled lexicon; includes inflected forms.
  static std::vector<std::string> default_vocabulary();

  // Replaces every article effect: listed articles get the given effect (added
  // to the pool when missing), the rest of the pool gets zero.
  void set_effects(const std::map<int, double>& effects);
  void validate() const;
};

struct SynthTruth {
  std::uint64_t seed = 0;
  double base_log_fine = 0.0;
  double noise_sd = 0.0;
  std::map<int, double> effects;
  std::vector<double> noise;      // per case, corpus order
  std::vector<double> log_fines;  // base + effects + noise
};

struct SynthResult {
  Corpus corpus;
  SynthTruth truth;
};

/// Deterministic per seed. log-fine = base + sum of article effects + N(0, noise_sd).
SynthResult generate(const SynthSpec& spec);

}  // namespace finelens
