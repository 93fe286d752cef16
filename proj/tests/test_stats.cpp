#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/stats.hpp"

using namespace promptshield;

TEST_CASE("t-test at the mean gives p exactly 0.5") {
  // Symmetric sample around mu0: t = 0.
  const auto result = stats::t_test_one_sample_greater({0.1, 0.3}, 0.2, 0.05);
  CHECK(result.statistic == 0.0);
  CHECK(result.p_value == 0.5);
  CHECK_FALSE(result.reject_null);
  CHECK(result.df_or_sizes == std::vector<double>{1.0});
}

TEST_CASE("t-test degenerate zero-variance rules") {
  auto above = stats::t_test_one_sample_greater({0.2, 0.2, 0.2}, 0.1, 0.05);
  CHECK(above.p_value == 0.0);
  CHECK(above.reject_null);

  auto below = stats::t_test_one_sample_greater({0.05, 0.05}, 0.1, 0.05);
  CHECK(below.p_value == 1.0);
  CHECK_FALSE(below.reject_null);

  auto equal = stats::t_test_one_sample_greater({0.1, 0.1}, 0.1, 0.05);
  CHECK(equal.p_value == 0.5);
}

TEST_CASE("t-test rejects tiny samples") {
  CHECK_THROWS_AS(stats::t_test_one_sample_greater({0.1}, 0.0, 0.05), Error);
  CHECK_THROWS_AS(stats::t_test_one_sample_greater({}, 0.0, 0.05), Error);
}

TEST_CASE("t statistic matches the textbook formula") {
  const std::vector<double> sample = {0.12, 0.18, 0.11, 0.2, 0.16};
  const double mean = (0.12 + 0.18 + 0.11 + 0.2 + 0.16) / 5.0;
  double ss = 0.0;
  for (double v : sample) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / 4.0);
  const double expected_t = (mean - 0.11) / (sd / std::sqrt(5.0));
  const auto result = stats::t_test_one_sample_greater(sample, 0.11, 0.05);
  CHECK(result.statistic == doctest::Approx(expected_t).epsilon(1e-12));
}

TEST_CASE("student t tail agrees with the quadrature oracle") {
  for (double df : {1.0, 5.0, 30.0}) {
    for (double t : {-5.0, -1.0, -0.25, 0.0, 0.25, 1.0, 5.0}) {
      const double p = stats::student_t_upper_tail(t, df);
      const double reference = oracles::student_t_tail_quadrature(t, df);
      CHECK(std::fabs(p - reference) < 1e-6);
    }
  }
}

TEST_CASE("t-test p decreases in t for fixed df") {
  for (double df : {1.0, 2.0, 10.0, 99.0}) {
    double previous = 1.1;
    for (double t = -10.0; t <= 10.0; t += 0.25) {
      const double p = stats::student_t_upper_tail(t, df);
      CHECK(p < previous);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      previous = p;
    }
  }
}

TEST_CASE("KS identical samples") {
  const std::vector<double> sample = {0.1, 0.2, 0.2, 0.5};
  const auto result = stats::ks_two_sample(sample, sample, 0.05);
  CHECK(result.statistic == 0.0);
  CHECK(result.p_value == 1.0);
  CHECK_FALSE(result.reject_null);
  CHECK(result.df_or_sizes == std::vector<double>{4.0, 4.0});
}

TEST_CASE("KS disjoint supports give D = 1") {
  const auto result = stats::ks_two_sample({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 0.05);
  CHECK(result.statistic == 1.0);
}

TEST_CASE("KS rejects empty samples") {
  CHECK_THROWS_AS(stats::ks_two_sample({}, {1.0}, 0.05), Error);
  CHECK_THROWS_AS(stats::ks_two_sample({1.0}, {}, 0.05), Error);
}

TEST_CASE("KS D matches brute-force sweep, symmetry and shift invariance") {
  std::mt19937 g(31337);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(1 + g() % 50);
    std::vector<double> b(1 + g() % 50);
    // Coarse grid so ties across samples actually occur.
    for (auto& v : a) v = static_cast<double>(g() % 10) / 10.0;
    for (auto& v : b) v = static_cast<double>(g() % 10) / 10.0;

    const double d = stats::ks_statistic(a, b);
    CHECK(d == oracles::ks_d_bruteforce(a, b));
    CHECK(d == stats::ks_statistic(b, a));
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);

    std::vector<double> a_shift = a;
    std::vector<double> b_shift = b;
    for (auto& v : a_shift) v += 5.0;
    for (auto& v : b_shift) v += 5.0;
    CHECK(stats::ks_statistic(a_shift, b_shift) == d);
  }
}

TEST_CASE("KS p-value is small for clearly shifted samples") {
  std::mt19937 g(11);
  std::vector<double> a(1000);
  std::vector<double> b(1000);
  for (auto& v : a) v = static_cast<double>(g() % 1000) / 1000.0;
  for (auto& v : b) v = static_cast<double>(g() % 1000) / 1000.0 + 0.3;
  const auto result = stats::ks_two_sample(a, b, 0.05);
  CHECK(result.p_value < 1e-12);
  CHECK(result.reject_null);
}

TEST_CASE("threshold calibration") {
  SUBCASE("paper arithmetic: mean corpus WS plus gamma") {
    CHECK(stats::theta_from_ws({0.0692}, 0.0408) ==
          doctest::Approx(0.11).epsilon(1e-12));
  }
  SUBCASE("no corpora falls back to the 0.11 default") {
    const auto config = stats::calibrate_threshold({}, {"zephyr"}, 0.0);
    CHECK(config.theta == 0.11);
    CHECK(config.corpora_ws.empty());
  }
  SUBCASE("gamma zero, single corpus: theta equals that corpus WS") {
    // Every text scores SWS = 1/4 exactly.
    const std::vector<std::string> texts(10, "the quick brown fox");
    const auto config =
        stats::calibrate_threshold({{"mini", texts}}, {"fox"}, 0.0);
    REQUIRE(config.corpora_ws.size() == 1);
    CHECK(config.corpora_ws[0].name == "mini");
    CHECK(config.corpora_ws[0].n == 10);
    CHECK(config.corpora_ws[0].ws == 0.25);
    CHECK(std::fabs(config.theta - 0.25) < 1e-12);
  }
  SUBCASE("empty corpus is an error") {
    CHECK_THROWS_AS(stats::calibrate_threshold({{"empty", {}}}, {"x"}, 0.0), Error);
  }
  SUBCASE("monotone in gamma") {
    const std::vector<std::string> texts(4, "a fox here");
    double previous = -1.0;
    for (double gamma : {0.0, 0.01, 0.05, 0.2}) {
      const auto config =
          stats::calibrate_threshold({{"c", texts}}, {"fox"}, gamma);
      CHECK(config.theta > previous);
      previous = config.theta;
    }
  }
}

TEST_CASE("threshold JSON round trip") {
  stats::ThresholdConfig config;
  config.theta = 0.137;
  config.gamma = 0.02;
  config.corpora_ws.push_back({"tweets", 0.0692, 2588579});
  const auto parsed = stats::threshold_from_json(stats::threshold_to_json(config));
  CHECK(parsed.theta == config.theta);
  CHECK(parsed.gamma == config.gamma);
  REQUIRE(parsed.corpora_ws.size() == 1);
  CHECK(parsed.corpora_ws[0].name == "tweets");
  CHECK(parsed.corpora_ws[0].ws == 0.0692);
  CHECK(parsed.corpora_ws[0].n == 2588579);
}
