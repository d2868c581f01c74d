#include <cmath>

#include <gtest/gtest.h>

#include "finelens/anova.hpp"
#include "finelens/error.hpp"
#include "finelens/synthgen.hpp"

using namespace finelens;

TEST(Synth, DeterministicPerSeed) {
  SynthSpec spec;
  spec.seed = 5;
  const SynthResult a = generate(spec);
  const SynthResult b = generate(spec);
  EXPECT_EQ(a.corpus.cases, b.corpus.cases);
  EXPECT_EQ(a.truth.noise, b.truth.noise);
  spec.seed = 6;
  EXPECT_NE(generate(spec).corpus.cases[0].fine_eur, a.corpus.cases[0].fine_eur);
}

TEST(Synth, CorpusPassesValidation) {
  const SynthResult s = generate(SynthSpec{});
  ASSERT_EQ(s.corpus.cases.size(), 200u);
  EXPECT_NO_THROW(validate_corpus(s.corpus));
  EXPECT_EQ(s.corpus.cases.front().case_id, "SYN-00001");
  EXPECT_EQ(s.corpus.cases.back().case_id, "SYN-00200");
  for (const auto& c : s.corpus.cases) {
    EXPECT_GT(c.fine_eur, 0.0);
    EXPECT_GE(c.articles.size(), 1u);
    EXPECT_LE(c.articles.size(), 3u);
    for (int a : c.articles) EXPECT_NE(c.text.find("Art. " + std::to_string(a) + " GDPR"), std::string::npos);
  }
}

TEST(Synth, LogFinesAreBasePlusEffectsPlusNoise) {
  SynthSpec spec;
  spec.seed = 13;
  const SynthResult s = generate(spec);
  for (std::size_t i = 0; i < s.corpus.cases.size(); ++i) {
    double expect = spec.base_log_fine + s.truth.noise[i];
    for (int a : s.corpus.cases[i].articles) expect += s.truth.effects.at(a);
    EXPECT_NEAR(s.truth.log_fines[i], expect, 1e-12);
    EXPECT_NEAR(std::log(s.corpus.cases[i].fine_eur), expect, 1e-12);
  }
  spec.noise_sd = 0.0;
  for (double z : generate(spec).truth.noise) EXPECT_EQ(z, 0.0);
}

TEST(Synth, TextModelDoesNotMoveFines) {
  SynthSpec spec;
  spec.seed = 21;
  const SynthResult plain = generate(spec);
  spec.text_signal = true;
  spec.doc_length = 10;
  const SynthResult signal = generate(spec);
  for (std::size_t i = 0; i < plain.corpus.cases.size(); ++i)
    EXPECT_EQ(plain.corpus.cases[i].fine_eur, signal.corpus.cases[i].fine_eur);
  EXPECT_NE(plain.corpus.cases[0].text, signal.corpus.cases[0].text);
}

TEST(Synth, SignalTokensScaleWithFine) {
  SynthSpec spec;
  spec.text_signal = true;
  spec.signal_lemmas = {"zzsignal"};
  spec.vocabulary = {"filler"};
  const SynthResult s = generate(spec);
  for (std::size_t i = 0; i < s.corpus.cases.size(); ++i) {
    const std::string& t = s.corpus.cases[i].text;
    std::size_t count = 0;
    for (auto p = t.find("zzsignal"); p != std::string::npos; p = t.find("zzsignal", p + 1)) ++count;
    EXPECT_EQ(count, static_cast<std::size_t>(std::lround(s.truth.log_fines[i])));
  }
}

TEST(Synth, SetEffects) {
  SynthSpec spec;
  spec.set_effects({{5, 2.0}, {77, -1.0}});
  for (const auto& a : spec.articles) {
    if (a.article == 5) EXPECT_EQ(a.effect, 2.0);
    else if (a.article == 77) EXPECT_EQ(a.effect, -1.0);
    else EXPECT_EQ(a.effect, 0.0);
  }
}

TEST(Synth, InvalidSpecs) {
  auto bad = [](auto mutate) {
    SynthSpec s;
    mutate(s);
    EXPECT_THROW(generate(s), ValidationError);
  };
  bad([](SynthSpec& s) { s.n_cases = 9; });
  bad([](SynthSpec& s) { s.noise_sd = -0.1; });
  bad([](SynthSpec& s) { s.articles[0].effect = NAN; });
  bad([](SynthSpec& s) { s.articles.resize(1); });
  bad([](SynthSpec& s) { s.countries.clear(); });
  bad([](SynthSpec& s) { s.articles[1].weight = 0.0; });
}

TEST(Synth, AnovaWithinThreeStandardErrors) {
  // Effects art5 = +1.0, art32 = +1.5 over 20 seeds.
  int inside = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.set_effects({{5, 1.0}, {32, 1.5}});
    const AnovaReport r = run_anova(generate(spec).corpus);
    for (const auto& a : r.articles) {
      if (a.article != 5 && a.article != 32) continue;
      ++total;
      const double truth = a.article == 5 ? 1.0 : 1.5;
      if (std::fabs(*a.coefficient - truth) <= 3.0 * *a.std_error) ++inside;
    }
  }
  EXPECT_EQ(total, 40);
  EXPECT_GE(inside, 38);
}
