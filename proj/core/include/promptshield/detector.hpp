#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "promptshield/ledger.hpp"
#include "promptshield/scoring.hpp"
#include "promptshield/stats.hpp"

namespace promptshield::detect {

enum class Mode { Rapid, Contrastive };
enum class Verdict { Imitation, NotProven };

std::string_view mode_name(Mode mode);
std::string_view verdict_name(Verdict verdict);

struct SuspectOutput {
  std::string query_id;
  std::string text;
};

struct VerificationReport {
  Mode mode = Mode::Rapid;
  scoring::StrategyKind strategy = scoring::StrategyKind::All;
  std::size_t n_outputs = 0;
  std::size_t k = 0;
  double ws = 0.0;
  double theta = stats::kDefaultTheta;  // rapid only
  double alpha = stats::kDefaultAlpha;
  std::optional<stats::TestResult> t_result;      // rapid
  std::optional<stats::TestResult> ks_vs_legit;   // contrastive
  std::optional<stats::TestResult> ks_vs_origin;  // contrastive
  Verdict verdict = Verdict::NotProven;
};

// Sentence Watermark Scores for suspect outputs, each scored against its own
// query's effective watermark set. Throws Error listing unknown query ids.
std::vector<double> score_outputs(const std::vector<SuspectOutput>& outputs,
                                  const ledger::Ledger& ledger,
                                  const scoring::WatermarkStrategy& strategy);

// Prior rapid verification: one-sided t-test of the top-k Sentence Watermark
// Scores against theta. Verdict is Imitation iff p < alpha.
VerificationReport rapid_verify(const std::vector<SuspectOutput>& suspect_outputs,
                                const ledger::Ledger& ledger,
                                const scoring::WatermarkStrategy& strategy,
                                const stats::ThresholdConfig& threshold,
                                double alpha);

// Detailed contrastive verification: two-sample KS tests of the suspect SWS
// distribution against legitimate-model and origin-model baselines. Verdict
// is Imitation iff both tests reject.
VerificationReport contrastive_verify(const std::vector<double>& suspect_sws,
                                      const std::vector<double>& legit_sws,
                                      const std::vector<double>& origin_sws,
                                      double alpha,
                                      scoring::StrategyKind strategy =
                                          scoring::StrategyKind::All);

// JSON serialization with stable key order; identical reports serialize to
// identical bytes.
std::string report_to_json(const VerificationReport& report);
void save_report(const VerificationReport& report, const std::filesystem::path& path);

// Suspect corpus files: JSON-lines {"query_id": ..., "text": ...}.
std::vector<SuspectOutput> load_suspect_corpus(const std::filesystem::path& path);
void save_suspect_corpus(const std::vector<SuspectOutput>& outputs,
                         const std::filesystem::path& path);

}  // namespace promptshield::detect
