#include "promptshield/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "promptshield/errors.hpp"

namespace promptshield::metrics {

namespace {

constexpr int kMaxOrder = 4;

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngram_counts(const corpus::TokenSeq& tokens, int order) {
  NgramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(order)) return counts;
  for (std::size_t start = 0; start + order <= tokens.size(); ++start) {
    std::vector<std::string> gram(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(start) +
                                      order);
    counts[std::move(gram)] += 1;
  }
  return counts;
}

struct ClippedPrecision {
  std::size_t matched = 0;
  std::size_t total = 0;
};

ClippedPrecision clipped_precision(const corpus::TokenSeq& candidate,
                                   const corpus::TokenSeq& reference, int order) {
  ClippedPrecision result;
  const NgramCounts cand = ngram_counts(candidate, order);
  const NgramCounts ref = ngram_counts(reference, order);
  for (const auto& [gram, count] : cand) {
    result.total += count;
    auto it = ref.find(gram);
    if (it != ref.end()) result.matched += std::min(count, it->second);
  }
  return result;
}

double bleu_from_counts(const std::array<ClippedPrecision, kMaxOrder>& precisions,
                        std::size_t c, std::size_t r) {
  if (c == 0) return 0.0;
  double log_sum = 0.0;
  for (const auto& p : precisions) {
    if (p.total == 0 || p.matched == 0) return 0.0;
    log_sum += 0.25 * std::log(static_cast<double>(p.matched) /
                               static_cast<double>(p.total));
  }
  const double bp = c > r ? 1.0
                          : std::exp(1.0 - static_cast<double>(r) /
                                               static_cast<double>(c));
  return bp * std::exp(log_sum);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace

std::size_t lcs_length(const corpus::TokenSeq& a, const corpus::TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> previous(b.size() + 1, 0);
  std::vector<std::size_t> current(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        current[j] = previous[j - 1] + 1;
      } else {
        current[j] = std::max(previous[j], current[j - 1]);
      }
    }
    std::swap(previous, current);
  }
  return previous[b.size()];
}

double bleu4(const std::string& candidate, const std::string& reference) {
  const corpus::TokenSeq cand = corpus::tokenize(candidate);
  const corpus::TokenSeq ref = corpus::tokenize(reference);
  std::array<ClippedPrecision, kMaxOrder> precisions;
  for (int order = 1; order <= kMaxOrder; ++order) {
    precisions[static_cast<std::size_t>(order - 1)] =
        clipped_precision(cand, ref, order);
  }
  return bleu_from_counts(precisions, cand.size(), ref.size());
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  for (char ch : text) {
    current.push_back(ch);
    if (ch == '.' || ch == '!' || ch == '?') {
      if (corpus::token_count(current) > 0) sentences.push_back(current);
      current.clear();
    }
  }
  if (corpus::token_count(current) > 0) sentences.push_back(current);
  return sentences;
}

double rouge_lsum(const std::string& candidate, const std::string& reference,
                  double beta) {
  if (beta <= 0.0) throw std::invalid_argument("rouge_lsum requires beta > 0");

  const std::vector<std::string> ref_sentences = split_sentences(reference);
  if (ref_sentences.empty()) return 0.0;
  const corpus::TokenSeq cand_tokens = corpus::tokenize(candidate);

  const double beta_sq = beta * beta;
  double f_sum = 0.0;
  for (const auto& sentence : ref_sentences) {
    const corpus::TokenSeq ref_tokens = corpus::tokenize(sentence);
    const std::size_t lcs = lcs_length(ref_tokens, cand_tokens);
    const double recall =
        static_cast<double>(lcs) / static_cast<double>(ref_tokens.size());
    const double precision =
        cand_tokens.empty() ? 0.0
                            : static_cast<double>(lcs) /
                                  static_cast<double>(cand_tokens.size());
    const double denom = recall + beta_sq * precision;
    if (denom > 0.0) {
      f_sum += (1.0 + beta_sq) * recall * precision / denom;
    }
  }
  return f_sum / static_cast<double>(ref_sentences.size());
}

MetricReport evaluate(
    const std::vector<std::tuple<std::string, std::string, std::string>>& items,
    double beta) {
  MetricReport report;
  report.n_items = items.size();
  if (items.empty()) return report;

  std::array<ClippedPrecision, kMaxOrder> pooled;
  std::size_t pooled_c = 0;
  std::size_t pooled_r = 0;
  double bleu_sum = 0.0;
  double rouge_sum = 0.0;
  for (const auto& [item_id, candidate, reference] : items) {
    ItemScore score;
    score.item_id = item_id;
    score.bleu4 = bleu4(candidate, reference);
    score.rouge_lsum = rouge_lsum(candidate, reference, beta);
    bleu_sum += score.bleu4;
    rouge_sum += score.rouge_lsum;
    report.per_item.push_back(std::move(score));

    const corpus::TokenSeq cand = corpus::tokenize(candidate);
    const corpus::TokenSeq ref = corpus::tokenize(reference);
    pooled_c += cand.size();
    pooled_r += ref.size();
    for (int order = 1; order <= kMaxOrder; ++order) {
      const ClippedPrecision p = clipped_precision(cand, ref, order);
      pooled[static_cast<std::size_t>(order - 1)].matched += p.matched;
      pooled[static_cast<std::size_t>(order - 1)].total += p.total;
    }
  }
  report.bleu4 = bleu_sum / static_cast<double>(items.size());
  report.rouge_lsum = rouge_sum / static_cast<double>(items.size());
  report.corpus_bleu4 = bleu_from_counts(pooled, pooled_c, pooled_r);
  return report;
}

std::string report_to_csv(const MetricReport& report) {
  std::string csv = "item_id,bleu4,rouge_lsum\n";
  for (const auto& item : report.per_item) {
    csv += item.item_id;
    csv += ',';
    csv += format_double(item.bleu4);
    csv += ',';
    csv += format_double(item.rouge_lsum);
    csv += '\n';
  }
  return csv;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json obj;
  obj["n_items"] = report.n_items;
  obj["bleu4"] = report.bleu4;
  obj["rouge_lsum"] = report.rouge_lsum;
  obj["corpus_bleu4"] = report.corpus_bleu4;
  return obj.dump(2) + "\n";
}

}  // namespace promptshield::metrics
