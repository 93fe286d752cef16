#include <random>

#include "doctest.h"
#include "promptshield/corpus.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/scoring.hpp"
#include "promptshield/sim.hpp"

using namespace promptshield;

namespace {

// Ledger with watermark phrases guaranteed absent from the filler vocabulary.
ledger::Ledger rare_ledger(std::size_t n) {
  ledger::Ledger led;
  for (std::size_t i = 0; i < n; ++i) {
    ledger::QueryRecord record;
    record.query_id = "q" + std::to_string(i);
    record.query_text = "question " + std::to_string(i);
    record.answer_text = "xqzwv1 xqzwv2 answer";
    record.watermark_set = {"xqzwv1", "xqzwv2"};
    record.template_id = "p4";
    record.created_at = "2024-01-01T00:00:00Z";
    led.append(record);
  }
  return led;
}

sim::SimModelSpec make_spec(double affinity, std::uint64_t seed) {
  sim::SimModelSpec spec;
  spec.base_vocab = sim::default_filler_vocab();
  spec.watermark_affinity = affinity;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("synthetic ledger is deterministic and internally consistent") {
  const ledger::Ledger a = sim::make_synthetic_ledger(200, 5);
  const ledger::Ledger b = sim::make_synthetic_ledger(200, 5);
  CHECK(a == b);
  CHECK(a.size() == 200);

  const ledger::Ledger c = sim::make_synthetic_ledger(200, 6);
  CHECK_FALSE(a == c);

  for (const auto& record : a.records()) {
    CHECK_FALSE(record.watermark_set.empty());
    // The victim's answer carries every declared watermark (recall 1).
    CHECK(scoring::watermark_recall(record.answer_text, record.watermark_set) == 1.0);
  }
}

TEST_CASE("affinity 0 emits no rare watermark") {
  const ledger::Ledger led = rare_ledger(100);
  const auto outputs = sim::generate_suspect_corpus(led, make_spec(0.0, 9));
  REQUIRE(outputs.size() == 100);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto scored = scoring::sentence_watermark_score(
        outputs[i].text, led.records()[i].watermark_set);
    CHECK(scored.sws == 0.0);
  }
}

TEST_CASE("affinity 1 emits every watermark (per-output recall 1)") {
  const ledger::Ledger led = rare_ledger(100);
  const auto outputs = sim::generate_suspect_corpus(led, make_spec(1.0, 9));
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    CHECK(scoring::watermark_recall(outputs[i].text,
                                    led.records()[i].watermark_set) == 1.0);
  }
}

TEST_CASE("affinity 0.5 inclusion rate concentrates near 0.5") {
  const ledger::Ledger led = rare_ledger(4000);
  const auto outputs = sim::generate_suspect_corpus(led, make_spec(0.5, 31));
  std::size_t included = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto tokens = corpus::tokenize(outputs[i].text);
    for (const auto& phrase : led.records()[i].watermark_set) {
      ++total;
      if (corpus::find_phrase(tokens, corpus::tokenize(phrase))) ++included;
    }
  }
  const double rate = static_cast<double>(included) / static_cast<double>(total);
  CHECK(total == 8000);
  CHECK(rate > 0.47);
  CHECK(rate < 0.53);
}

TEST_CASE("generation is bitwise deterministic") {
  const ledger::Ledger led = sim::make_synthetic_ledger(150, 2);
  const auto a = sim::generate_suspect_corpus(led, make_spec(0.7, 11));
  const auto b = sim::generate_suspect_corpus(led, make_spec(0.7, 11));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].query_id == b[i].query_id);
    CHECK(a[i].text == b[i].text);
  }
}

TEST_CASE("empty base vocabulary is an error") {
  const ledger::Ledger led = rare_ledger(3);
  sim::SimModelSpec spec;
  spec.watermark_affinity = 0.5;
  CHECK_THROWS_AS(sim::generate_suspect_corpus(led, spec), Error);
}

TEST_CASE("scenario JSON parsing") {
  SUBCASE("full scenario") {
    const auto scenario = sim::scenario_from_json(R"({
      "spec": {"mean_length": 50, "watermark_affinity": 0.8, "seed": 7},
      "attack": {"kind": "swap", "rate": 0.2, "seed": 3},
      "dilution": {"eta": 0.25, "rho": 0.5, "seed": 4},
      "strategy": {"kind": "query-excluded"},
      "alpha": 0.01,
      "theta": 0.13
    })");
    CHECK(scenario.spec.mean_length == 50);
    CHECK(scenario.spec.watermark_affinity == 0.8);
    REQUIRE(scenario.attack.has_value());
    CHECK(scenario.attack->kind == attacks::EditKind::Swap);
    REQUIRE(scenario.dilution.has_value());
    CHECK(scenario.dilution->eta == 0.25);
    CHECK(scenario.strategy == scoring::StrategyKind::QueryExcluded);
    CHECK(scenario.alpha == 0.01);
    CHECK(scenario.threshold.theta == 0.13);
  }
  SUBCASE("defaults") {
    const auto scenario = sim::scenario_from_json("{}");
    CHECK(scenario.spec.mean_length == 40);
    CHECK(scenario.spec.watermark_affinity == 0.0);
    CHECK_FALSE(scenario.attack.has_value());
    CHECK_FALSE(scenario.dilution.has_value());
    CHECK(scenario.alpha == 0.05);
    CHECK(scenario.threshold.theta == 0.11);
  }
  SUBCASE("invalid values are rejected") {
    CHECK_THROWS_AS(sim::scenario_from_json("not json"), ParseError);
    CHECK_THROWS_AS(
        sim::scenario_from_json(R"({"spec": {"watermark_affinity": 1.5}})"),
        ParseError);
    CHECK_THROWS_AS(
        sim::scenario_from_json(R"({"attack": {"kind": "paraphrase"}})"), Error);
    CHECK_THROWS_AS(sim::scenario_from_json(R"({"alpha": 1.0})"), ParseError);
    CHECK_THROWS_AS(sim::scenario_from_json(R"({"dilution": {"rho": 0.0}})"),
                    ParseError);
  }
}

TEST_CASE("run_scenario end-to-end behavior") {
  const ledger::Ledger led = sim::make_synthetic_ledger(1000, 13);

  SUBCASE("high affinity, no interference: imitation") {
    sim::Scenario scenario;
    scenario.spec = make_spec(0.8, 21);
    const auto run = sim::run_scenario(led, scenario);
    CHECK(run.report.verdict == detect::Verdict::Imitation);
    CHECK(run.suspect_corpus.size() == 1000);
  }
  SUBCASE("affinity 0 with an attack: not proven") {
    sim::Scenario scenario;
    scenario.spec = make_spec(0.0, 21);
    scenario.attack = attacks::EditAttackSpec{attacks::EditKind::Replace, 0.1, 5};
    const auto run = sim::run_scenario(led, scenario);
    CHECK(run.report.verdict == detect::Verdict::NotProven);
  }
  SUBCASE("dilution zeroes affinity outside the training subset") {
    sim::Scenario scenario;
    scenario.spec = make_spec(1.0, 21);
    scenario.dilution = attacks::DilutionSpec{0.5, 1.0, 77};
    const auto run = sim::run_scenario(led, scenario);
    // Exactly half the outputs can contain watermarks.
    std::size_t with_watermarks = 0;
    for (std::size_t i = 0; i < run.suspect_corpus.size(); ++i) {
      const auto scored = scoring::sentence_watermark_score(
          run.suspect_corpus[i].text, led.records()[i].watermark_set);
      if (scored.sws > 0.0) ++with_watermarks;
    }
    // Affinity-1 outputs inside A^D always contain their watermarks; the
    // rest can only match accidentally (common-word watermarks).
    CHECK(with_watermarks >= 500);
    CHECK(with_watermarks <= 700);
    CHECK(run.report.n_outputs == 1000);  // detection replays all of Q
  }
  SUBCASE("reports are byte-identical across runs") {
    sim::Scenario scenario;
    scenario.spec = make_spec(0.6, 3);
    scenario.attack = attacks::EditAttackSpec{attacks::EditKind::Insert, 0.1, 9};
    const auto a = sim::run_scenario(led, scenario);
    const auto b = sim::run_scenario(led, scenario);
    CHECK(detect::report_to_json(a.report) == detect::report_to_json(b.report));
  }
}

TEST_CASE("rapid p-value is non-increasing in affinity (averaged over seeds)") {
  const ledger::Ledger led = sim::make_synthetic_ledger(800, 4);
  auto mean_p = [&](double affinity) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      sim::Scenario scenario;
      scenario.spec = make_spec(affinity, seed);
      const auto run = sim::run_scenario(led, scenario);
      sum += run.report.t_result->p_value;
    }
    return sum / 10.0;
  };
  const double p_none = mean_p(0.0);
  const double p_mid = mean_p(0.4);
  const double p_high = mean_p(0.8);
  CHECK(p_none >= p_mid - 1e-12);
  CHECK(p_mid >= p_high - 1e-12);
}

TEST_CASE("affinity 0 rarely produces an imitation verdict") {
  const ledger::Ledger led = sim::make_synthetic_ledger(500, 8);
  std::size_t imitations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    sim::Scenario scenario;
    scenario.spec = make_spec(0.0, seed);
    if (sim::run_scenario(led, scenario).report.verdict ==
        detect::Verdict::Imitation) {
      ++imitations;
    }
  }
  CHECK(imitations <= 1);
}

TEST_CASE("spec-signature run_scenario matches the struct form") {
  const ledger::Ledger led = sim::make_synthetic_ledger(300, 14);
  sim::Scenario scenario;
  scenario.spec = make_spec(0.7, 2);
  scenario.attack = attacks::EditAttackSpec{attacks::EditKind::Delete, 0.1, 4};

  scoring::WatermarkStrategy strategy;
  const auto direct = sim::run_scenario(led, scenario.spec, scenario.attack,
                                        std::nullopt, strategy, {}, 0.05);
  const auto via_struct = sim::run_scenario(led, scenario);
  CHECK(detect::report_to_json(direct) == detect::report_to_json(via_struct.report));
}
