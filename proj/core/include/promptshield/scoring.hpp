#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptshield/corpus.hpp"

namespace promptshield::scoring {

// Which watermark subset scoring uses. The chain is
// HighEntropy ⊆ QueryExcluded ⊆ All for any fixed inputs.
enum class StrategyKind { All, QueryExcluded, HighEntropy };

StrategyKind strategy_from_name(std::string_view name);
std::string_view strategy_name(StrategyKind kind);

struct WatermarkStrategy {
  StrategyKind kind = StrategyKind::All;
  // HighEntropy keeps a phrase iff any of its tokens occurs fewer than
  // rarity_threshold times in frequency_table.
  int rarity_threshold = 5;
  const corpus::FrequencyTable* frequency_table = nullptr;
};

// All: unchanged. QueryExcluded: drops phrases found in the query.
// HighEntropy: additionally drops phrases whose every token is common.
// Throws Error for HighEntropy without a frequency table.
std::vector<std::string> effective_watermarks(const std::vector<std::string>& wm_set,
                                              const std::string& query_text,
                                              const WatermarkStrategy& strategy);

// A suspect output with its Sentence Watermark Score: total token length of
// the distinct watermark phrases found, divided by the output token length.
struct ScoredText {
  std::string text;
  double sws = 0.0;
  std::vector<std::string> matched;
  std::size_t wm_count = 0;  // size of the effective watermark set
};

ScoredText sentence_watermark_score(const std::string& answer_text,
                                    const std::vector<std::string>& effective_wm);

// Arithmetic mean of sws values. Throws Error on an empty list.
double average_sws(const std::vector<ScoredText>& scored);

struct TopKScore {
  double ws = 0.0;
  std::size_t k = 0;
};

// Mean of the k largest values, k = min(n, max(ceil(0.01*n), 100)), ties
// broken by stable original order. Throws Error on an empty list.
TopKScore top_k_mean(const std::vector<double>& sws_values);
// The values actually averaged, in descending stable order.
std::vector<double> top_k_values(const std::vector<double>& sws_values);
TopKScore watermark_score(const std::vector<ScoredText>& scored);

// Fraction of the watermark set found in the answer. Throws Error on an
// empty set.
double watermark_recall(const std::string& answer_text,
                        const std::vector<std::string>& wm_set);

struct IntensityBucket {
  double mean_sws = 0.0;
  std::size_t count = 0;
};

// Groups (wm_count, sws) pairs by wm_count.
std::map<std::size_t, IntensityBucket> intensity_profile(
    const std::vector<std::pair<std::size_t, double>>& records);

}  // namespace promptshield::scoring
