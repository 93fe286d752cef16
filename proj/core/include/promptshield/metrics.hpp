#pragma once

#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "promptshield/corpus.hpp"

namespace promptshield::metrics {

// Standard longest-common-subsequence length, O(|a|*|b|).
std::size_t lcs_length(const corpus::TokenSeq& a, const corpus::TokenSeq& b);

// Cumulative BLEU-4: clipped n-gram precisions for n = 1..4 with uniform
// weights 0.25 and brevity penalty BP = 1 if c > r else exp(1 - r/c).
// Any zero precision (or an empty candidate) gives 0.
double bleu4(const std::string& candidate, const std::string& reference);

// Sentence split on '.', '!', '?' boundaries; fragments with no tokens are
// dropped.
std::vector<std::string> split_sentences(const std::string& text);

// ROUGE-Lsum: per reference sentence, LCS against the candidate's
// concatenated tokens gives R = LCS/len(ref_i) and P = LCS/len(cand); the
// per-sentence F scores are summed and normalized by the sentence count.
// Zero denominators contribute 0. Throws on beta <= 0.
double rouge_lsum(const std::string& candidate, const std::string& reference,
                  double beta = 1.0);

struct ItemScore {
  std::string item_id;
  double bleu4 = 0.0;
  double rouge_lsum = 0.0;
};

struct MetricReport {
  double bleu4 = 0.0;         // mean of per-item scores
  double rouge_lsum = 0.0;    // mean of per-item scores
  double corpus_bleu4 = 0.0;  // n-gram counts pooled over the corpus
  std::vector<ItemScore> per_item;
  std::size_t n_items = 0;
};

// items: (item_id, candidate, reference).
MetricReport evaluate(
    const std::vector<std::tuple<std::string, std::string, std::string>>& items,
    double beta = 1.0);

std::string report_to_csv(const MetricReport& report);
std::string report_to_json(const MetricReport& report);

}  // namespace promptshield::metrics
