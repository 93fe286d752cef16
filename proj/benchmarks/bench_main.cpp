#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "promptshield/attacks.hpp"
#include "promptshield/corpus.hpp"
#include "promptshield/detector.hpp"
#include "promptshield/scoring.hpp"
#include "promptshield/sim.hpp"
#include "promptshield/stats.hpp"

namespace ps = promptshield;

namespace {

std::string make_text(std::size_t tokens, std::uint64_t seed) {
  const auto& vocab = ps::sim::default_filler_vocab();
  std::vector<std::string> words;
  for (const auto& [token, count] : vocab.counts()) words.push_back(token);
  std::sort(words.begin(), words.end());
  std::mt19937_64 g(seed);
  std::string text;
  for (std::size_t i = 0; i < tokens; ++i) {
    if (i > 0) text.push_back(' ');
    text += words[g() % words.size()];
  }
  return text;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string text = make_text(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::corpus::tokenize(text));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(16)->Arg(64)->Arg(256);

void BM_SentenceWatermarkScore(benchmark::State& state) {
  const std::string text = make_text(64, 2) + " zephyr orrery temporal allocation";
  const std::vector<std::string> wm = {"zephyr", "orrery", "temporal allocation",
                                       "petrichor"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::scoring::sentence_watermark_score(text, wm));
  }
}
BENCHMARK(BM_SentenceWatermarkScore);

void BM_TopKMean(benchmark::State& state) {
  std::mt19937_64 g(3);
  std::vector<double> values(static_cast<std::size_t>(state.range(0)));
  for (auto& v : values) v = static_cast<double>(g() % 10000) / 10000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::scoring::top_k_mean(values));
  }
}
BENCHMARK(BM_TopKMean)->Arg(1000)->Arg(4000)->Arg(20000);

void BM_StudentTTail(benchmark::State& state) {
  double t = 0.0;
  for (auto _ : state) {
    t += 0.001;
    benchmark::DoNotOptimize(ps::stats::student_t_upper_tail(t, 99.0));
  }
}
BENCHMARK(BM_StudentTTail);

void BM_KsTwoSample(benchmark::State& state) {
  std::mt19937_64 g(4);
  std::vector<double> a(static_cast<std::size_t>(state.range(0)));
  std::vector<double> b(a.size());
  for (auto& v : a) v = static_cast<double>(g() % 10000) / 10000.0;
  for (auto& v : b) v = static_cast<double>(g() % 10000) / 10000.0 + 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::stats::ks_two_sample(a, b, 0.05));
  }
}
BENCHMARK(BM_KsTwoSample)->Arg(100)->Arg(1000)->Arg(4000);

void BM_EditAttack(benchmark::State& state) {
  const std::string text = make_text(64, 5);
  const ps::attacks::EditAttackSpec spec{ps::attacks::EditKind::Insert, 0.1, 7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::attacks::edit_attack(text, spec));
  }
}
BENCHMARK(BM_EditAttack);

void BM_GenerateSuspectCorpus(benchmark::State& state) {
  const ps::ledger::Ledger ledger =
      ps::sim::make_synthetic_ledger(static_cast<std::size_t>(state.range(0)), 6);
  ps::sim::SimModelSpec spec;
  spec.base_vocab = ps::sim::default_filler_vocab();
  spec.watermark_affinity = 0.8;
  spec.seed = 8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ps::sim::generate_suspect_corpus(ledger, spec));
  }
}
BENCHMARK(BM_GenerateSuspectCorpus)->Arg(100)->Arg(1000);

void BM_RapidVerify(benchmark::State& state) {
  const ps::ledger::Ledger ledger =
      ps::sim::make_synthetic_ledger(static_cast<std::size_t>(state.range(0)), 9);
  ps::sim::SimModelSpec spec;
  spec.base_vocab = ps::sim::default_filler_vocab();
  spec.watermark_affinity = 0.8;
  spec.seed = 10;
  const auto outputs = ps::sim::generate_suspect_corpus(ledger, spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ps::detect::rapid_verify(outputs, ledger, {}, {}, 0.05));
  }
}
BENCHMARK(BM_RapidVerify)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
