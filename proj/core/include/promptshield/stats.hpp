#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace promptshield::stats {

// The paper-anchored defaults: rapid-test threshold and significance level.
inline constexpr double kDefaultTheta = 0.11;
inline constexpr double kDefaultAlpha = 0.05;

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  // {df} for the t-test, {n_a, n_b} for the KS test.
  std::vector<double> df_or_sizes;
  double alpha = kDefaultAlpha;
  bool reject_null = false;  // p_value < alpha
};

// Regularized incomplete beta I_x(a, b) via continued fraction (Lentz),
// absolute error target 1e-10.
double incomplete_beta(double a, double b, double x);

// Upper-tail probability of Student's t with df degrees of freedom.
// Exactly 0.5 at t = 0.
double student_t_upper_tail(double t, double df);

// One-sided one-sample t-test of H0: mean <= mu0 against mean > mu0.
// Zero-variance samples short-circuit: p = 0 if mean > mu0, 1 if mean < mu0,
// 0.5 if equal. Throws Error when |sample| < 2.
TestResult t_test_one_sample_greater(const std::vector<double>& sample, double mu0,
                                     double alpha);

// Max distance between the right-continuous empirical CDFs.
double ks_statistic(const std::vector<double>& a, const std::vector<double>& b);

// Asymptotic Kolmogorov p-value with the small-sample correction term
// lambda = (sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * d, clamped to [0, 1].
double ks_asymptotic_p(double d, std::size_t n_a, std::size_t n_b);

// Two-sample KS test. Throws Error on empty samples.
TestResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha);

struct CorpusScore {
  std::string name;
  double ws = 0.0;
  std::size_t n = 0;  // texts scored
};

// Rapid-test threshold: mean of per-corpus Watermark Scores plus the
// relaxation coefficient gamma. Falls back to theta = 0.11 when no corpora
// are supplied.
struct ThresholdConfig {
  double theta = kDefaultTheta;
  double gamma = 0.0;
  std::vector<CorpusScore> corpora_ws;
};

double theta_from_ws(const std::vector<double>& ws_values, double gamma);

// Scores every text of every corpus with SWS against the union watermark
// set, takes the top-k Watermark Score per corpus and averages. Throws
// Error on an empty corpus.
ThresholdConfig calibrate_threshold(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& human_corpora,
    const std::vector<std::string>& union_wm, double gamma);

std::string threshold_to_json(const ThresholdConfig& config);
ThresholdConfig threshold_from_json(const std::string& text);
ThresholdConfig load_threshold(const std::filesystem::path& path);
void save_threshold(const ThresholdConfig& config, const std::filesystem::path& path);

}  // namespace promptshield::stats
