#include "finelens/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "finelens/error.hpp"
#include "finelens/rng.hpp"

namespace finelens {

namespace {

std::size_t weighted_pick(const std::vector<double>& weights, SplitMix64& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  for (std::size_t i = weights.size(); i > 0; --i)
    if (weights[i - 1] > 0) return i - 1;
  return 0;
}

std::string padded(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d", i);
  return buf;
}

}  // namespace

std::vector<SynthArticle> SynthSpec::default_articles() {
  return {{5, 0.5, 40.0},  {6, 0.8, 35.0},  {32, 1.5, 12.0}, {13, -0.5, 6.0},
          {15, 0.0, 5.0},  {17, 0.3, 4.0},  {21, -0.3, 4.0}, {12, 0.2, 3.0}};
}

std::vector<std::string> SynthSpec::default_vocabulary() {
  return {"access",      "account",      "accuracy",     "action",       "agency",       "agreement",
          "amount",      "analysis",     "appeal",       "appealed",     "applicant",    "application",
          "assessment",  "audit",        "bank",         "basis",        "breach",       "camera",
          "cameras",     "claim",        "client",       "collect",      "collected",    "complaint",
          "complaints",  "compliance",   "consent",      "consumer",     "contract",     "controller",
          "controllers", "cookie",       "court",        "customer",     "customers",    "damage",
          "database",    "decision",     "deletion",     "delete",       "deleted",      "device",
          "disclosure",  "document",     "duty",         "email",        "employee",     "employees",
          "employer",    "encryption",   "erasure",      "evidence",     "failure",      "fine",
          "fined",       "fines",        "government",   "health",       "hospital",     "impose",
          "imposed",     "incident",     "inform",       "informed",     "inquiry",      "inspection",
          "insurance",   "interest",     "internet",     "investigation", "investigations", "legal",
          "letter",      "marketing",    "measure",      "measures",     "medical",      "message",
          "mobile",      "municipality", "network",      "notice",       "notification", "notify",
          "notified",    "obligation",   "obligations",  "office",       "officer",      "operator",
          "password",    "patient",      "payment",      "penalty",      "period",       "phone",
          "police",      "policy",       "privacy",      "procedure",    "processor",    "profile",
          "provider",    "publication",  "purpose",      "record",       "records",      "request",
          "requests",    "retention",    "right",        "rights",       "risk",         "school",
          "security",    "server",       "service",      "services",     "software",     "staff",
          "statement",   "storage",      "store",        "stored",       "subject",      "subjects",
          "system",      "telephone",    "transfer",     "transparency", "user",         "users",
          "video",       "violate",      "violated",     "violation",    "violations",   "website",
          "worker",      "adequate",     "appropriate",  "criminal",     "digital",      "excessive",
          "financial",   "lawful",       "unlawful",     "necessary",    "public",       "serious",
          "technical",   "companies",    "data",         "personal",     "processing",   "the",
          "of",          "and",          "two",          "three"};
}

void SynthSpec::set_effects(const std::map<int, double>& effects) {
  for (auto& a : articles) a.effect = 0.0;
  for (const auto& [article, effect] : effects) {
    auto it = std::find_if(articles.begin(), articles.end(), [&](const SynthArticle& a) { return a.article == article; });
    if (it == articles.end()) {
      articles.push_back({article, effect, 5.0});
    } else {
      it->effect = effect;
    }
  }
}

void SynthSpec::validate() const {
  if (n_cases < 10) throw ValidationError("synth: n_cases must be >= 10");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw ValidationError("synth: noise_sd must be >= 0");
  if (!std::isfinite(base_log_fine)) throw ValidationError("synth: base log-fine must be finite");
  if (articles.size() < 2) throw ValidationError("synth: article pool needs at least two articles");
  if (max_articles_per_case < 1) throw ValidationError("synth: max_articles_per_case must be >= 1");
  for (const auto& a : articles) {
    if (a.article < 1 || a.article > 99) throw ValidationError("synth: article outside [1, 99]");
    if (!std::isfinite(a.effect)) throw ValidationError("synth: non-finite article effect");
    if (!(a.weight > 0.0)) throw ValidationError("synth: article weights must be positive");
  }
  if (countries.empty() || years.empty() || sectors.empty()) throw ValidationError("synth: empty category pool");
  if (vocabulary.empty() || doc_length < 1) throw ValidationError("synth: empty vocabulary or document length");
  if (text_signal && (signal_lemmas.empty() || !(signal_rate >= 0.0)))
    throw ValidationError("synth: text signal needs lemmas and a non-negative rate");
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  // Independent streams so that changing the text model leaves fines untouched.
  SplitMix64 meta_rng(spec.seed);
  SplitMix64 noise_rng(spec.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  SplitMix64 text_rng(spec.seed ^ 0x5A5A5A5A5A5A5A5AULL);

  // Zipf-like term weights give the documents a realistic frequency profile.
  std::vector<double> term_weights(spec.vocabulary.size());
  for (std::size_t i = 0; i < term_weights.size(); ++i) term_weights[i] = 1.0 / (1.0 + 0.1 * static_cast<double>(i));

  SynthResult out;
  out.truth.seed = spec.seed;
  out.truth.base_log_fine = spec.base_log_fine;
  out.truth.noise_sd = spec.noise_sd;
  for (const auto& a : spec.articles) out.truth.effects[a.article] = a.effect;

  const int max_k = std::min<int>(spec.max_articles_per_case, static_cast<int>(spec.articles.size()));
  for (int i = 0; i < spec.n_cases; ++i) {
    EnforcementCase c;
    c.case_id = "SYN-" + padded(i + 1);
    c.decision_ref = "synth://decision/" + padded(i + 1);
    c.country = spec.countries[meta_rng.below(spec.countries.size())];
    c.year = spec.years[meta_rng.below(spec.years.size())];
    c.sector = spec.sectors[meta_rng.below(spec.sectors.size())];

    const int n_articles = 1 + static_cast<int>(meta_rng.below(static_cast<std::uint64_t>(max_k)));
    std::vector<double> weights;
    for (const auto& a : spec.articles) weights.push_back(a.weight);
    double log_fine = spec.base_log_fine;
    for (int k = 0; k < n_articles; ++k) {
      const std::size_t pick = weighted_pick(weights, meta_rng);
      weights[pick] = 0.0;
      c.articles.insert(spec.articles[pick].article);
      log_fine += spec.articles[pick].effect;
    }
    const double noise = spec.noise_sd * noise_rng.normal();
    log_fine += noise;
    c.fine_eur = std::exp(log_fine);

    std::string text = "Decision of the supervisory authority (" + c.country + ", " + std::to_string(c.year) + ").";
    for (int a : c.articles) text += " Art. " + std::to_string(a) + " GDPR.";
    for (int t = 0; t < spec.doc_length; ++t) {
      text += t > 0 && t % 12 == 0 ? ". " : " ";
      text += spec.vocabulary[weighted_pick(term_weights, text_rng)];
    }
    if (spec.text_signal) {
      const auto n_signal = static_cast<int>(std::lround(spec.signal_rate * std::max(0.0, log_fine)));
      for (int s = 0; s < n_signal; ++s) {
        text += ' ';
        text += spec.signal_lemmas[static_cast<std::size_t>(s) % spec.signal_lemmas.size()];
      }
    }
    c.text = text + ".";

    out.truth.noise.push_back(noise);
    out.truth.log_fines.push_back(log_fine);
    out.corpus.cases.push_back(std::move(c));
  }
  return out;
}

}  // namespace finelens
