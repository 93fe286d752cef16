#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "promptshield/attacks.hpp"
#include "promptshield/corpus.hpp"
#include "promptshield/detector.hpp"
#include "promptshield/ledger.hpp"
#include "promptshield/scoring.hpp"
#include "promptshield/stats.hpp"

namespace promptshield::sim {

// A synthetic suspect model: filler tokens drawn from base_vocab, each
// per-query watermark phrase emitted with probability watermark_affinity.
// Affinity 0 models a legitimate or origin model, affinity near 1 a
// well-trained imitation model.
struct SimModelSpec {
  corpus::FrequencyTable base_vocab;
  std::size_t mean_length = 40;  // tokens per output, +/- 25%
  double watermark_affinity = 0.0;
  std::uint64_t seed = 0;
};

// Bundled common-English word-frequency list.
const corpus::FrequencyTable& default_filler_vocab();

// Deterministic victim-interaction ledger: templated questions, watermark
// sets of 2-5 phrases from a rare-word pool (occasionally a common word or
// the query topic itself), answers containing every watermark phrase.
ledger::Ledger make_synthetic_ledger(std::size_t n, std::uint64_t seed);

// One output per ledger record, deterministic given spec.seed. Per-record
// sub-seeds keep outputs independent of processing order. Throws Error on an
// empty base vocabulary.
std::vector<detect::SuspectOutput> generate_suspect_corpus(const ledger::Ledger& ledger,
                                                           const SimModelSpec& spec);

// As above with a per-record affinity override (|affinities| == ledger size).
std::vector<detect::SuspectOutput> generate_suspect_corpus(
    const ledger::Ledger& ledger, const SimModelSpec& spec,
    const std::vector<double>& affinities);

// An end-to-end robustness scenario: optional eta-subset dilution scales the
// per-query affinity (a query outside A^D contributes 0), optional edit
// attack transforms the suspect outputs, then rapid verification replays all
// ledger queries.
struct Scenario {
  SimModelSpec spec;
  std::optional<attacks::EditAttackSpec> attack;
  std::optional<attacks::DilutionSpec> dilution;
  scoring::StrategyKind strategy = scoring::StrategyKind::All;
  int rarity_threshold = 5;
  stats::ThresholdConfig threshold;
  double alpha = stats::kDefaultAlpha;
};

// Scenario file: JSON with spec/attack/dilution/strategy/alpha blocks.
// spec.base_vocab is "default" or a path to a text file (one text per line).
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

struct ScenarioRun {
  detect::VerificationReport report;
  std::vector<detect::SuspectOutput> suspect_corpus;  // post-attack outputs
};

ScenarioRun run_scenario(const ledger::Ledger& ledger, const Scenario& scenario);

detect::VerificationReport run_scenario(
    const ledger::Ledger& ledger, const SimModelSpec& spec,
    const std::optional<attacks::EditAttackSpec>& attack,
    const std::optional<attacks::DilutionSpec>& dilution,
    const scoring::WatermarkStrategy& strategy,
    const stats::ThresholdConfig& threshold, double alpha);

}  // namespace promptshield::sim
