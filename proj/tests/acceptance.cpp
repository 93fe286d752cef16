// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.
//
// Usage: acceptance --cli <path-to-promptshield-binary>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "oracles.hpp"
#include "promptshield/attacks.hpp"
#include "promptshield/detector.hpp"
#include "promptshield/ledger.hpp"
#include "promptshield/metrics.hpp"
#include "promptshield/scoring.hpp"
#include "promptshield/sim.hpp"
#include "promptshield/stats.hpp"

namespace fs = std::filesystem;
namespace ps = promptshield;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
fs::path g_dir;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = "cd '" + g_dir.string() + "' && '" + g_cli + "' " + args +
                          " > /dev/null 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Shared fixtures for the end-to-end criteria.
const ps::ledger::Ledger& acceptance_ledger() {
  static const ps::ledger::Ledger ledger = ps::sim::make_synthetic_ledger(4000, 20240401);
  return ledger;
}

ps::sim::Scenario scenario_with(double affinity, std::uint64_t seed) {
  ps::sim::Scenario scenario;
  scenario.spec.base_vocab = ps::sim::default_filler_vocab();
  scenario.spec.watermark_affinity = affinity;
  scenario.spec.seed = seed;
  return scenario;
}

// --- criterion 1 -----------------------------------------------------------

void criterion_scoring_oracle() {
  const auto start = Clock::now();
  std::mt19937 g(101);
  const std::vector<std::string> vocabulary = {"time",  "zephyr", "orrery", "brown",
                                               "quick", "lait",   "au",     "café"};
  for (int i = 0; i < 200; ++i) {
    std::string answer;
    for (std::size_t j = 0; j < g() % 60; ++j) {
      answer += vocabulary[g() % vocabulary.size()] + " ";
    }
    std::vector<std::string> wm;
    for (std::size_t j = 0; j < 1 + g() % 5; ++j) {
      std::string phrase(vocabulary[g() % vocabulary.size()]);
      if (g() % 3 == 0) phrase += " " + std::string(vocabulary[g() % vocabulary.size()]);
      wm.push_back(phrase);
    }
    const double sws = ps::scoring::sentence_watermark_score(answer, wm).sws;
    const double reference = oracles::sws_bruteforce(answer, wm);
    require(sws == reference, "SWS mismatch vs brute force on case " + std::to_string(i));
  }
  for (int i = 0; i < 200; ++i) {
    std::vector<double> values(1 + g() % 5000);
    for (auto& v : values) v = static_cast<double>(g() % 10000) / 10000.0;
    require(ps::scoring::top_k_mean(values).ws == oracles::top_k_mean_bruteforce(values),
            "watermark_score mismatch vs sort-and-average on case " + std::to_string(i));
  }
  require(seconds_since(start) < 5.0, "criterion 1 exceeded the 5 s budget");
}

// --- criterion 2 -----------------------------------------------------------

void criterion_strategy_chain() {
  std::mt19937 g(202);
  const std::vector<std::string> vocabulary = {
      "the",   "chronos", "zephyr", "about",  "orrery", "tell",
      "common", "lattice", "me",     "quanta", "nacre",  "words"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> wm;
    for (std::size_t j = 0; j < 1 + g() % 6; ++j) {
      std::string phrase(vocabulary[g() % vocabulary.size()]);
      if (g() % 4 == 0) phrase += " " + std::string(vocabulary[g() % vocabulary.size()]);
      wm.push_back(phrase);
    }
    std::string query;
    for (std::size_t j = 0; j < g() % 8; ++j) {
      query += vocabulary[g() % vocabulary.size()] + " ";
    }
    ps::corpus::FrequencyTable table;
    for (const auto& token : vocabulary) table.add(token, g() % 12);

    ps::scoring::WatermarkStrategy all;
    ps::scoring::WatermarkStrategy query_excluded;
    query_excluded.kind = ps::scoring::StrategyKind::QueryExcluded;
    ps::scoring::WatermarkStrategy high_entropy;
    high_entropy.kind = ps::scoring::StrategyKind::HighEntropy;
    high_entropy.frequency_table = &table;

    const auto wm_all = ps::scoring::effective_watermarks(wm, query, all);
    const auto wm_q = ps::scoring::effective_watermarks(wm, query, query_excluded);
    const auto wm_h = ps::scoring::effective_watermarks(wm, query, high_entropy);

    auto contains = [](const std::vector<std::string>& haystack,
                       const std::string& needle) {
      for (const auto& phrase : haystack) {
        if (phrase == needle) return true;
      }
      return false;
    };
    for (const auto& phrase : wm_h) {
      require(contains(wm_q, phrase), "WM_H not a subset of WM_Q");
    }
    for (const auto& phrase : wm_q) {
      require(contains(wm_all, phrase), "WM_Q not a subset of WM");
    }
  }
}

// --- criterion 3 -----------------------------------------------------------

void criterion_t_test_accuracy() {
  const auto start = Clock::now();
  require(ps::stats::student_t_upper_tail(0.0, 7.0) == 0.5, "p(t=0) must be exactly 0.5");
  for (double df : {1.0, 2.0, 5.0, 10.0, 30.0, 99.0}) {
    for (double t = -10.0; t <= 10.0; t += 0.5) {
      const double p = ps::stats::student_t_upper_tail(t, df);
      const double reference = oracles::student_t_tail_quadrature(t, df);
      if (std::fabs(p - reference) >= 1e-6) {
        std::ostringstream message;
        message << "t-tail mismatch at t=" << t << " df=" << df << ": " << p << " vs "
                << reference;
        throw std::runtime_error(message.str());
      }
    }
  }
  require(seconds_since(start) < 10.0, "criterion 3 exceeded the 10 s budget");
}

// --- criterion 4 -----------------------------------------------------------

void criterion_ks_accuracy() {
  const auto start = Clock::now();
  std::mt19937 g(404);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> a(1 + g() % 50);
    std::vector<double> b(1 + g() % 50);
    for (auto& v : a) v = static_cast<double>(g() % 20) / 20.0;
    for (auto& v : b) v = static_cast<double>(g() % 20) / 20.0;
    const double d = ps::stats::ks_statistic(a, b);
    require(d == oracles::ks_d_bruteforce(a, b),
            "KS D mismatch vs brute force on pair " + std::to_string(i));
  }
  std::vector<double> sample(40);
  for (auto& v : sample) v = static_cast<double>(g() % 100) / 100.0;
  const auto identical = ps::stats::ks_two_sample(sample, sample, 0.05);
  require(identical.statistic == 0.0, "identical samples must give D = 0");
  require(identical.p_value == 1.0, "identical samples must give p = 1");
  require(seconds_since(start) < 10.0, "criterion 4 exceeded the 10 s budget");
}

// --- criterion 5 -----------------------------------------------------------

void criterion_end_to_end() {
  const auto& ledger = acceptance_ledger();
  require(ledger.size() == 4000, "synthetic ledger must have 4000 records");

  auto start = Clock::now();
  const auto imitation = ps::sim::run_scenario(ledger, scenario_with(0.8, 814));
  require(seconds_since(start) < 60.0, "imitation run exceeded the 60 s budget");
  require(imitation.report.verdict == ps::detect::Verdict::Imitation,
          "affinity 0.8 must be flagged as imitation");
  require(imitation.report.t_result->p_value < 1e-9,
          "affinity 0.8 p-value must be below 1e-9, got " +
              std::to_string(imitation.report.t_result->p_value));

  start = Clock::now();
  const auto legitimate = ps::sim::run_scenario(ledger, scenario_with(0.0, 815));
  require(seconds_since(start) < 60.0, "legitimate run exceeded the 60 s budget");
  require(legitimate.report.verdict == ps::detect::Verdict::NotProven,
          "affinity 0 must stay NotProven at alpha = 0.05");
}

// --- criteria 6-8 ----------------------------------------------------------

std::size_t imitation_count(const std::function<ps::sim::Scenario(std::uint64_t)>& make,
                            int runs) {
  const auto& ledger = acceptance_ledger();
  std::size_t imitations = 0;
  for (int seed = 1; seed <= runs; ++seed) {
    const auto run = ps::sim::run_scenario(ledger, make(static_cast<std::uint64_t>(seed)));
    if (run.report.verdict == ps::detect::Verdict::Imitation) ++imitations;
  }
  return imitations;
}

void criterion_dilution_robustness() {
  const std::size_t detected = imitation_count(
      [](std::uint64_t seed) {
        auto scenario = scenario_with(0.8, seed);
        scenario.dilution = ps::attacks::DilutionSpec{0.1, 1.0, seed + 1000};
        return scenario;
      },
      100);
  require(detected >= 95, "eta=0.1 dilution detected in only " +
                              std::to_string(detected) + "/100 runs (need >= 95)");
  std::cout << "    eta=0.1: " << detected << "/100 imitation verdicts\n";
}

void criterion_attack_robustness() {
  using ps::attacks::EditKind;
  for (EditKind kind :
       {EditKind::Insert, EditKind::Delete, EditKind::Replace, EditKind::Swap}) {
    const std::size_t detected = imitation_count(
        [kind](std::uint64_t seed) {
          auto scenario = scenario_with(0.8, seed);
          scenario.attack = ps::attacks::EditAttackSpec{kind, 0.1, seed + 2000};
          return scenario;
        },
        100);
    std::cout << "    " << ps::attacks::edit_kind_name(kind) << ": " << detected
              << "/100 imitation verdicts\n";
    require(detected >= 95, std::string(ps::attacks::edit_kind_name(kind)) +
                                " attack detected in only " + std::to_string(detected) +
                                "/100 runs (need >= 95)");
  }
}

void criterion_false_positive_control() {
  const std::size_t false_positives = imitation_count(
      [](std::uint64_t seed) { return scenario_with(0.0, seed + 5000); }, 100);
  std::cout << "    affinity 0: " << false_positives << "/100 imitation verdicts\n";
  require(false_positives <= 7, "false-positive rate " +
                                    std::to_string(false_positives) +
                                    "/100 exceeds 0.07");
}

// --- criterion 9 -----------------------------------------------------------

void criterion_metrics_identities() {
  std::mt19937 g(909);
  const std::vector<std::string> vocab_a = {"alpha", "beta", "gamma", "delta", "epsilon"};
  const std::vector<std::string> vocab_b = {"one", "two", "three", "four", "five"};
  for (int i = 0; i < 50; ++i) {
    std::string text;
    const std::size_t length = 4 + g() % 20;
    for (std::size_t j = 0; j < length; ++j) {
      text += vocab_a[g() % vocab_a.size()];
      if (j + 1 < length) text += " ";
    }
    require(ps::metrics::bleu4(text, text) == 1.0, "bleu4(x, x) must be 1");
    require(std::fabs(ps::metrics::rouge_lsum(text, text, 1.0) - 1.0) < 1e-12,
            "rouge_lsum(x, x, 1) must be 1");

    std::string other;
    for (std::size_t j = 0; j < length; ++j) other += vocab_b[g() % vocab_b.size()] + " ";
    require(ps::metrics::bleu4(text, other) == 0.0, "disjoint bleu4 must be 0");
    require(ps::metrics::rouge_lsum(text, other, 1.0) == 0.0,
            "disjoint rouge_lsum must be 0");
  }

  require(ps::metrics::bleu4("the cat sat on the mat", "the cat is on the mat") == 0.0,
          "fixture 1: no common 4-gram, cumulative BLEU-4 is 0");
  const double expected2 =
      std::pow((5.0 / 6.0) * (3.0 / 5.0) * (2.0 / 4.0) * (1.0 / 3.0), 0.25);
  require(std::fabs(ps::metrics::bleu4("a b c d e f", "a b c d x f") - expected2) < 1e-9,
          "fixture 2: clipped precisions (5/6)(3/5)(1/2)(1/3)");
  const double expected3 = std::exp(1.0 - 6.0 / 4.0);
  require(std::fabs(ps::metrics::bleu4("a b c d", "a b c d e f") - expected3) < 1e-9,
          "fixture 3: brevity penalty exp(1 - 6/4)");
}

// --- criterion 10 ----------------------------------------------------------

void criterion_threshold_default() {
  const auto fallback = ps::stats::calibrate_threshold({}, {"zephyr"}, 0.0);
  require(fallback.theta == 0.11, "theta must default to 0.11 with no corpora");

  std::vector<std::string> texts;
  std::mt19937 g(1010);
  for (int i = 0; i < 250; ++i) {
    std::string text = "plain filler words";
    if (g() % 3 == 0) text += " zephyr";
    for (std::size_t j = 0; j < g() % 10; ++j) text += " more";
    texts.push_back(text);
  }
  std::vector<ps::scoring::ScoredText> scored;
  for (const auto& text : texts) {
    scored.push_back(ps::scoring::sentence_watermark_score(text, {"zephyr"}));
  }
  const double expected_ws = ps::scoring::watermark_score(scored).ws;
  const auto config =
      ps::stats::calibrate_threshold({{"single", texts}}, {"zephyr"}, 0.0);
  require(std::fabs(config.theta - expected_ws) < 1e-12,
          "theta must equal the single corpus WS to 1e-12 at gamma = 0");
}

// --- criterion 11 ----------------------------------------------------------

void expect_identical(const fs::path& a, const fs::path& b, const std::string& what) {
  const std::string lhs = slurp(a);
  require(!lhs.empty(), what + ": first run produced no output");
  require(lhs == slurp(b), what + ": outputs differ between identical seeded runs");
}

pid_t spawn_serve(const std::string& ledger_name, int port) {
  const pid_t pid = fork();
  if (pid == 0) {
    const std::string port_str = std::to_string(port);
    if (::chdir(g_dir.string().c_str()) != 0) _exit(126);
    ::execl(g_cli.c_str(), "promptshield", "serve", "--ledger", ledger_name.c_str(),
            "--mock", "--seed", "4", "--host", "127.0.0.1", "--port", port_str.c_str(),
            static_cast<char*>(nullptr));
    _exit(127);
  }
  return pid;
}

void serve_session(const std::string& ledger_name, int port) {
  const pid_t pid = spawn_serve(ledger_name, port);
  require(pid > 0, "fork failed");
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(1, 0);
  bool ready = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (auto res = client.Get("/healthz"); res && res->status == 200) {
      ready = true;
      break;
    }
    ::usleep(50 * 1000);
  }
  if (!ready) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    throw std::runtime_error("gateway did not become ready");
  }
  for (const char* query : {"first question", "second question"}) {
    nlohmann::json body{{"query", query}};
    auto res = client.Post("/v1/query", body.dump(), "application/json");
    require(res && res->status == 200, "gateway POST failed");
  }
  ::kill(pid, SIGTERM);
  ::waitpid(pid, nullptr, 0);
}

void criterion_cli_determinism() {
  // Fixtures.
  write(g_dir / "queries.txt", "why is the sky blue\nhow do tides work\n");
  write(g_dir / "human.txt", "the quick brown fox\nwords without marks\n");
  require(run_cli("simulate --make-ledger 500 --seed 3 --ledger det_led.jsonl") == 0,
          "make-ledger failed");
  write(g_dir / "det_scenario.json",
        R"({"spec": {"watermark_affinity": 0.7, "seed": 6},)"
        R"( "attack": {"kind": "swap", "rate": 0.1, "seed": 8}})");

  const std::vector<std::pair<std::string, std::string>> cases = {
      {"embed --queries queries.txt --mock --seed 5 --ledger OUT.jsonl", "embed"},
      {"calibrate --corpus h=human.txt --wm human.txt --gamma 0 --out OUT.json",
       "calibrate"},
      {"simulate --scenario det_scenario.json --ledger det_led.jsonl --out OUT.json "
       "--suspect-out OUT.sus.jsonl",
       "simulate"},
  };
  for (const auto& [templ, name] : cases) {
    for (int round = 1; round <= 2; ++round) {
      std::string cmd = templ;
      const std::string out = "det_" + name + std::to_string(round);
      std::size_t pos;
      while ((pos = cmd.find("OUT")) != std::string::npos) cmd.replace(pos, 3, out);
      const int code = run_cli(cmd);
      require(code == 0, name + " exited with " + std::to_string(code));
    }
  }
  expect_identical(g_dir / "det_embed1.jsonl", g_dir / "det_embed2.jsonl", "embed");
  expect_identical(g_dir / "det_calibrate1.json", g_dir / "det_calibrate2.json",
                   "calibrate");
  expect_identical(g_dir / "det_simulate1.json", g_dir / "det_simulate2.json",
                   "simulate report");
  expect_identical(g_dir / "det_simulate1.sus.jsonl", g_dir / "det_simulate2.sus.jsonl",
                   "simulate suspect corpus");

  // attack / detect / metrics consume the simulated corpus.
  for (int round = 1; round <= 2; ++round) {
    const std::string r = std::to_string(round);
    require(run_cli("attack --kind insert --rate 0.2 --seed 9 --in det_simulate1.sus.jsonl "
                    "--out det_attack" + r + ".jsonl") == 0,
            "attack failed");
    const int detect_code =
        run_cli("detect --suspect det_simulate1.sus.jsonl --ledger det_led.jsonl "
                "--out det_detect" + r + ".json");
    require(detect_code == 0 || detect_code == 10, "detect failed");
    require(run_cli("metrics --suspect det_simulate1.sus.jsonl --ledger det_led.jsonl "
                    "--csv det_metrics" + r + ".csv --json det_metrics" + r + ".json") == 0,
            "metrics failed");
  }
  expect_identical(g_dir / "det_attack1.jsonl", g_dir / "det_attack2.jsonl", "attack");
  expect_identical(g_dir / "det_detect1.json", g_dir / "det_detect2.json", "detect");
  expect_identical(g_dir / "det_metrics1.csv", g_dir / "det_metrics2.csv",
                   "metrics csv");
  expect_identical(g_dir / "det_metrics1.json", g_dir / "det_metrics2.json",
                   "metrics json");

  // serve: same seeded session twice, byte-identical ledgers.
  const int port = 18000 + static_cast<int>(::getpid() % 4000);
  serve_session("det_serve1.jsonl", port);
  serve_session("det_serve2.jsonl", port);
  expect_identical(g_dir / "det_serve1.jsonl", g_dir / "det_serve2.jsonl", "serve");
}

struct Criterion {
  int id;
  std::string name;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
  }
  if (g_cli.empty()) {
    std::cerr << "usage: acceptance --cli <path-to-promptshield>\n";
    return 2;
  }
  g_dir = fs::temp_directory_path() / ("ps_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);

  const std::vector<Criterion> criteria = {
      {1, "scoring oracle equivalence (200 randomized cases, exact)",
       criterion_scoring_oracle},
      {2, "strategy chain WM_H ⊆ WM_Q ⊆ WM (1000 fuzzed triples)",
       criterion_strategy_chain},
      {3, "t-test within 1e-6 of quadrature oracle on the (t, df) grid",
       criterion_t_test_accuracy},
      {4, "KS statistic exact vs brute force (500 pairs)", criterion_ks_accuracy},
      {5, "end-to-end detection on 4000 queries (p < 1e-9 / NotProven)",
       criterion_end_to_end},
      {6, "dilution robustness at eta = 0.1 (>= 95/100 seeds)",
       criterion_dilution_robustness},
      {7, "edit-attack robustness at rate 0.1 (>= 95/100 seeds, all four)",
       criterion_attack_robustness},
      {8, "false-positive control at affinity 0 (<= 7/100)",
       criterion_false_positive_control},
      {9, "metrics identities and hand-computed BLEU fixtures",
       criterion_metrics_identities},
      {10, "threshold default 0.11 and single-corpus calibration",
       criterion_threshold_default},
      {11, "CLI determinism: identical seeded runs, byte-identical outputs",
       criterion_cli_determinism},
  };

  int passed = 0;
  for (const auto& criterion : criteria) {
    const auto start = Clock::now();
    try {
      criterion.run();
      std::printf("[%2d] PASS %s (%.2fs)\n", criterion.id, criterion.name.c_str(),
                  seconds_since(start));
      ++passed;
    } catch (const std::exception& e) {
      std::printf("[%2d] FAIL %s: %s\n", criterion.id, criterion.name.c_str(), e.what());
    }
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
  fs::remove_all(g_dir);
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
