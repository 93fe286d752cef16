#include "promptshield/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "promptshield/errors.hpp"

namespace promptshield::scoring {

StrategyKind strategy_from_name(std::string_view name) {
  if (name == "all") return StrategyKind::All;
  if (name == "query-excluded") return StrategyKind::QueryExcluded;
  if (name == "high-entropy") return StrategyKind::HighEntropy;
  throw Error("unknown strategy '" + std::string(name) +
              "' (expected all, query-excluded or high-entropy)");
}

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::All:
      return "all";
    case StrategyKind::QueryExcluded:
      return "query-excluded";
    case StrategyKind::HighEntropy:
      return "high-entropy";
  }
  return "all";
}

std::vector<std::string> effective_watermarks(const std::vector<std::string>& wm_set,
                                              const std::string& query_text,
                                              const WatermarkStrategy& strategy) {
  if (strategy.kind == StrategyKind::All) return wm_set;
  if (strategy.kind == StrategyKind::HighEntropy && strategy.frequency_table == nullptr) {
    throw Error("high-entropy strategy requires a frequency table");
  }

  const corpus::TokenSeq query_tokens = corpus::tokenize(query_text);
  std::vector<std::string> out;
  for (const auto& phrase : wm_set) {
    const corpus::TokenSeq phrase_tokens = corpus::tokenize(phrase);
    if (!phrase_tokens.empty() && corpus::find_phrase(query_tokens, phrase_tokens)) {
      continue;  // present in the query
    }
    if (strategy.kind == StrategyKind::HighEntropy) {
      bool any_rare = false;
      for (const auto& token : phrase_tokens) {
        if (strategy.frequency_table->count(token) <
            static_cast<std::uint64_t>(strategy.rarity_threshold)) {
          any_rare = true;
          break;
        }
      }
      if (!any_rare) continue;  // every token is common (or phrase is empty)
    }
    out.push_back(phrase);
  }
  return out;
}

ScoredText sentence_watermark_score(const std::string& answer_text,
                                    const std::vector<std::string>& effective_wm) {
  ScoredText result;
  result.text = answer_text;

  const corpus::TokenSeq answer_tokens = corpus::tokenize(answer_text);
  std::unordered_set<std::string> seen;
  std::size_t matched_length = 0;
  for (const auto& phrase : effective_wm) {
    const corpus::TokenSeq phrase_tokens = corpus::tokenize(phrase);
    if (phrase_tokens.empty()) continue;
    std::string key = corpus::join_tokens(phrase_tokens);
    if (!seen.insert(key).second) continue;  // count each distinct phrase once
    ++result.wm_count;
    if (corpus::find_phrase(answer_tokens, phrase_tokens)) {
      result.matched.push_back(phrase);
      matched_length += phrase_tokens.size();
    }
  }
  result.sws = answer_tokens.empty()
                   ? 0.0
                   : static_cast<double>(matched_length) /
                         static_cast<double>(answer_tokens.size());
  return result;
}

double average_sws(const std::vector<ScoredText>& scored) {
  if (scored.empty()) throw Error("average_sws requires a non-empty list");
  double sum = 0.0;
  for (const auto& s : scored) sum += s.sws;
  return sum / static_cast<double>(scored.size());
}

std::vector<double> top_k_values(const std::vector<double>& sws_values) {
  if (sws_values.empty()) throw Error("watermark_score requires a non-empty list");
  const std::size_t n = sws_values.size();
  const std::size_t wanted = static_cast<std::size_t>(
      std::max(std::ceil(0.01 * static_cast<double>(n)), 100.0));
  const std::size_t k = std::min(n, wanted);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sws_values[a] > sws_values[b];
  });
  std::vector<double> top;
  top.reserve(k);
  for (std::size_t i = 0; i < k; ++i) top.push_back(sws_values[order[i]]);
  return top;
}

TopKScore top_k_mean(const std::vector<double>& sws_values) {
  std::vector<double> top = top_k_values(sws_values);
  double sum = 0.0;
  for (double v : top) sum += v;
  return TopKScore{sum / static_cast<double>(top.size()), top.size()};
}

TopKScore watermark_score(const std::vector<ScoredText>& scored) {
  std::vector<double> values;
  values.reserve(scored.size());
  for (const auto& s : scored) values.push_back(s.sws);
  return top_k_mean(values);
}

double watermark_recall(const std::string& answer_text,
                        const std::vector<std::string>& wm_set) {
  if (wm_set.empty()) throw Error("watermark_recall requires a non-empty set");
  const corpus::TokenSeq answer_tokens = corpus::tokenize(answer_text);
  std::unordered_set<std::string> seen;
  std::size_t distinct = 0;
  std::size_t found = 0;
  for (const auto& phrase : wm_set) {
    const corpus::TokenSeq phrase_tokens = corpus::tokenize(phrase);
    std::string key = corpus::join_tokens(phrase_tokens);
    if (key.empty()) key = phrase;
    if (!seen.insert(key).second) continue;
    ++distinct;
    if (!phrase_tokens.empty() && corpus::find_phrase(answer_tokens, phrase_tokens)) {
      ++found;
    }
  }
  return static_cast<double>(found) / static_cast<double>(distinct);
}

std::map<std::size_t, IntensityBucket> intensity_profile(
    const std::vector<std::pair<std::size_t, double>>& records) {
  std::map<std::size_t, IntensityBucket> buckets;
  for (const auto& [wm_count, sws] : records) {
    auto& bucket = buckets[wm_count];
    bucket.mean_sws += sws;
    bucket.count += 1;
  }
  for (auto& [wm_count, bucket] : buckets) {
    bucket.mean_sws /= static_cast<double>(bucket.count);
  }
  return buckets;
}

}  // namespace promptshield::scoring
