#include "promptshield/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/rng.hpp"
#include "wordlists.hpp"

namespace promptshield::sim {

namespace {

// Distinct seed streams so ledger construction, suspect generation and
// attacks never share draws even under one master seed.
constexpr std::uint64_t kLedgerStream = 0x6c65646765722d73ULL;
constexpr std::uint64_t kAttackStream = 0x61747461636b2d73ULL;

// Weighted token sampler with lexicographically sorted tokens, so sampling
// does not depend on hash-map iteration order.
class VocabSampler {
 public:
  explicit VocabSampler(const corpus::FrequencyTable& table) {
    if (table.empty()) throw Error("base vocabulary is empty");
    tokens_.reserve(table.distinct());
    for (const auto& [token, count] : table.counts()) {
      tokens_.push_back(token);
    }
    std::sort(tokens_.begin(), tokens_.end());
    cumulative_.reserve(tokens_.size());
    std::uint64_t running = 0;
    for (const auto& token : tokens_) {
      running += table.count(token);
      cumulative_.push_back(running);
    }
    total_ = running;
  }

  const std::string& pick(std::mt19937_64& g) const {
    const std::uint64_t x = g() % total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return tokens_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

std::vector<std::string> filler_tokens(const VocabSampler& sampler,
                                       std::mt19937_64& g, std::size_t mean_length) {
  const std::size_t lo = std::max<std::size_t>(1, mean_length - mean_length / 4);
  const std::size_t span = mean_length / 2 + 1;
  const std::size_t length = lo + rng::bounded(g, span);
  std::vector<std::string> tokens;
  tokens.reserve(length + 8);
  for (std::size_t i = 0; i < length; ++i) tokens.push_back(sampler.pick(g));
  return tokens;
}

void splice_phrase(std::vector<std::string>& tokens, const std::string& phrase,
                   std::mt19937_64& g) {
  const std::size_t pos = rng::bounded(g, tokens.size() + 1);
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), phrase);
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string rfc3339_from_epoch(std::time_t t) {
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm_utc.tm_year + 1900, tm_utc.tm_mon + 1, tm_utc.tm_mday,
                tm_utc.tm_hour, tm_utc.tm_min, tm_utc.tm_sec);
  return buf;
}

constexpr std::time_t kSyntheticEpoch = 1704067200;  // 2024-01-01T00:00:00Z

}  // namespace

const corpus::FrequencyTable& default_filler_vocab() {
  return wordlists::filler_vocab();
}

ledger::Ledger make_synthetic_ledger(std::size_t n, std::uint64_t seed) {
  const VocabSampler sampler(default_filler_vocab());
  const auto& pool = wordlists::watermark_pool();
  const auto& topics = wordlists::query_topics();
  const auto& forms = wordlists::query_forms();
  const auto& fillers = wordlists::filler_words();

  ledger::Ledger out("synthetic");
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 g(rng::derive_seed(seed ^ kLedgerStream, i));

    const std::string_view topic = topics[rng::bounded(g, topics.size())];
    std::string query(forms[rng::bounded(g, forms.size())]);
    query.replace(query.find("{TOPIC}"), 7, topic);

    std::vector<std::string> watermarks;
    const std::size_t n_watermarks = 2 + rng::bounded(g, 4);  // 2..5
    while (watermarks.size() < n_watermarks) {
      std::string w(pool[rng::bounded(g, pool.size())]);
      bool dup = false;
      for (const auto& have : watermarks) dup = dup || have == w;
      if (!dup) watermarks.push_back(std::move(w));
    }
    // Occasionally a common word or the query topic itself ends up declared
    // as a watermark; these are what WM_H and WM_Q filter out.
    if (rng::unit(g) < 0.10) {
      watermarks.emplace_back(fillers[rng::bounded(g, 40)]);
    }
    if (rng::unit(g) < 0.10) {
      watermarks.emplace_back(topic);
    }
    watermarks = ledger::dedup_watermarks(watermarks);

    std::vector<std::string> answer_tokens = filler_tokens(sampler, g, 56);
    for (const auto& phrase : watermarks) splice_phrase(answer_tokens, phrase, g);

    ledger::QueryRecord record;
    char id[32];
    std::snprintf(id, sizeof(id), "q%06zu", i);
    record.query_id = id;
    record.query_text = std::move(query);
    record.answer_text = join(answer_tokens);
    record.watermark_set = std::move(watermarks);
    record.template_id = "p4";
    record.created_at = rfc3339_from_epoch(kSyntheticEpoch + static_cast<std::time_t>(i));
    out.append(std::move(record));
  }
  return out;
}

std::vector<detect::SuspectOutput> generate_suspect_corpus(const ledger::Ledger& ledger,
                                                           const SimModelSpec& spec) {
  return generate_suspect_corpus(
      ledger, spec,
      std::vector<double>(ledger.size(), spec.watermark_affinity));
}

std::vector<detect::SuspectOutput> generate_suspect_corpus(
    const ledger::Ledger& ledger, const SimModelSpec& spec,
    const std::vector<double>& affinities) {
  if (affinities.size() != ledger.size()) {
    throw Error("affinity vector size must match the ledger size");
  }
  if (spec.mean_length == 0) throw Error("mean_length must be positive");
  const VocabSampler sampler(spec.base_vocab);

  std::vector<detect::SuspectOutput> outputs;
  outputs.reserve(ledger.size());
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    const ledger::QueryRecord& record = ledger.records()[i];
    std::mt19937_64 g(rng::derive_seed(spec.seed, i));
    std::vector<std::string> tokens = filler_tokens(sampler, g, spec.mean_length);
    for (const auto& phrase : record.watermark_set) {
      const double roll = rng::unit(g);
      if (roll < affinities[i]) splice_phrase(tokens, phrase, g);
    }
    outputs.push_back(detect::SuspectOutput{record.query_id, join(tokens)});
  }
  return outputs;
}

Scenario scenario_from_json(const std::string& text) {
  auto obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw ParseError("scenario is not a JSON object");
  }

  Scenario scenario;
  scenario.spec.base_vocab = default_filler_vocab();
  if (obj.contains("spec")) {
    const auto& spec = obj.at("spec");
    if (spec.contains("mean_length")) {
      scenario.spec.mean_length = spec.at("mean_length").get<std::size_t>();
    }
    if (spec.contains("watermark_affinity")) {
      scenario.spec.watermark_affinity = spec.at("watermark_affinity").get<double>();
    }
    if (spec.contains("seed")) {
      scenario.spec.seed = spec.at("seed").get<std::uint64_t>();
    }
    if (spec.contains("base_vocab")) {
      const std::string source = spec.at("base_vocab").get<std::string>();
      if (source != "default") {
        std::ifstream in(source, std::ios::binary);
        if (!in) throw Error("cannot open base vocabulary file '" + source + "'");
        std::vector<std::string> texts;
        std::string line;
        while (std::getline(in, line)) texts.push_back(line);
        scenario.spec.base_vocab = corpus::build_frequency_table(texts);
      }
    }
  }
  if (scenario.spec.watermark_affinity < 0.0 || scenario.spec.watermark_affinity > 1.0) {
    throw ParseError("watermark_affinity must be in [0, 1]");
  }
  if (scenario.spec.mean_length == 0) {
    throw ParseError("mean_length must be positive");
  }

  if (obj.contains("attack") && !obj.at("attack").is_null()) {
    const auto& attack = obj.at("attack");
    attacks::EditAttackSpec spec;
    spec.kind = attacks::edit_kind_from_name(attack.at("kind").get<std::string>());
    if (attack.contains("rate")) spec.rate = attack.at("rate").get<double>();
    if (attack.contains("seed")) spec.seed = attack.at("seed").get<std::uint64_t>();
    if (spec.rate < 0.0 || spec.rate > 1.0) {
      throw ParseError("attack rate must be in [0, 1]");
    }
    scenario.attack = spec;
  }

  if (obj.contains("dilution") && !obj.at("dilution").is_null()) {
    const auto& dilution = obj.at("dilution");
    attacks::DilutionSpec spec;
    if (dilution.contains("eta")) spec.eta = dilution.at("eta").get<double>();
    if (dilution.contains("rho")) spec.rho = dilution.at("rho").get<double>();
    if (dilution.contains("seed")) spec.seed = dilution.at("seed").get<std::uint64_t>();
    if (spec.eta < 0.0 || spec.eta > 1.0) throw ParseError("eta must be in [0, 1]");
    if (spec.rho <= 0.0 || spec.rho > 1.0) throw ParseError("rho must be in (0, 1]");
    scenario.dilution = spec;
  }

  if (obj.contains("strategy")) {
    const auto& strategy = obj.at("strategy");
    if (strategy.contains("kind")) {
      scenario.strategy =
          scoring::strategy_from_name(strategy.at("kind").get<std::string>());
    }
    if (strategy.contains("rarity_threshold")) {
      scenario.rarity_threshold = strategy.at("rarity_threshold").get<int>();
      if (scenario.rarity_threshold < 1) {
        throw ParseError("rarity_threshold must be >= 1");
      }
    }
  }

  if (obj.contains("theta")) {
    scenario.threshold.theta = obj.at("theta").get<double>();
  }
  if (obj.contains("gamma")) {
    scenario.threshold.gamma = obj.at("gamma").get<double>();
  }
  if (obj.contains("alpha")) {
    scenario.alpha = obj.at("alpha").get<double>();
    if (scenario.alpha <= 0.0 || scenario.alpha >= 1.0) {
      throw ParseError("alpha must be in (0, 1)");
    }
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return scenario_from_json(buffer.str());
  } catch (const std::exception& e) {
    throw ParseError("scenario '" + path.string() + "': " + e.what());
  }
}

ScenarioRun run_scenario(const ledger::Ledger& ledger, const Scenario& scenario) {
  if (ledger.empty()) throw Error("scenario requires a non-empty ledger");

  // Dilution scales per-query affinity: only queries whose record landed in
  // the training subset A^D retain watermark preference.
  std::vector<double> affinities(ledger.size(), scenario.spec.watermark_affinity);
  if (scenario.dilution.has_value()) {
    const attacks::SubsetDilution subset =
        attacks::subset_dilution(ledger, scenario.dilution->eta, scenario.dilution->seed);
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(ledger.size());
    for (std::size_t i = 0; i < ledger.size(); ++i) {
      index.emplace(ledger.records()[i].query_id, i);
    }
    std::vector<double> scaled(ledger.size(), 0.0);
    for (const auto& record : subset.train_set.records()) {
      scaled[index.at(record.query_id)] = scenario.spec.watermark_affinity;
    }
    affinities = std::move(scaled);
  }

  ScenarioRun run;
  run.suspect_corpus = generate_suspect_corpus(ledger, scenario.spec, affinities);

  if (scenario.attack.has_value()) {
    for (std::size_t i = 0; i < run.suspect_corpus.size(); ++i) {
      attacks::EditAttackSpec per_output = *scenario.attack;
      per_output.seed = rng::derive_seed(scenario.attack->seed ^ kAttackStream, i);
      run.suspect_corpus[i].text = attacks::edit_attack(run.suspect_corpus[i].text,
                                                        per_output);
    }
  }

  scoring::WatermarkStrategy strategy;
  strategy.kind = scenario.strategy;
  strategy.rarity_threshold = scenario.rarity_threshold;
  if (strategy.kind == scoring::StrategyKind::HighEntropy) {
    strategy.frequency_table = &scenario.spec.base_vocab;
  }
  run.report = detect::rapid_verify(run.suspect_corpus, ledger, strategy,
                                    scenario.threshold, scenario.alpha);
  return run;
}

detect::VerificationReport run_scenario(
    const ledger::Ledger& ledger, const SimModelSpec& spec,
    const std::optional<attacks::EditAttackSpec>& attack,
    const std::optional<attacks::DilutionSpec>& dilution,
    const scoring::WatermarkStrategy& strategy,
    const stats::ThresholdConfig& threshold, double alpha) {
  Scenario scenario;
  scenario.spec = spec;
  scenario.attack = attack;
  scenario.dilution = dilution;
  scenario.strategy = strategy.kind;
  scenario.rarity_threshold = strategy.rarity_threshold;
  scenario.threshold = threshold;
  scenario.alpha = alpha;
  return run_scenario(ledger, scenario).report;
}

}  // namespace promptshield::sim
