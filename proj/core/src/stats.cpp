#include "promptshield/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/scoring.hpp"

namespace promptshield::stats {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3.0e-16;
  constexpr double kFpMin = 1.0e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log(1.0 - x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double t, double df) {
  if (df <= 0.0) throw Error("student_t_upper_tail requires df > 0");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double half_tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? half_tail : 1.0 - half_tail;
}

TestResult t_test_one_sample_greater(const std::vector<double>& sample, double mu0,
                                     double alpha) {
  const std::size_t n = sample.size();
  if (n < 2) throw Error("t-test requires at least 2 observations");

  // Degenerate check is structural (all observations equal) so that float
  // noise in the mean cannot turn a constant sample into a huge t statistic.
  bool all_equal = true;
  for (double v : sample) all_equal = all_equal && v == sample.front();

  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (double v : sample) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TestResult result;
  result.alpha = alpha;
  result.df_or_sizes = {static_cast<double>(n - 1)};
  if (all_equal || sd == 0.0) {
    if (all_equal) mean = sample.front();
    if (mean > mu0) {
      result.statistic = std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
    } else if (mean < mu0) {
      result.statistic = -std::numeric_limits<double>::infinity();
      result.p_value = 1.0;
    } else {
      result.statistic = 0.0;
      result.p_value = 0.5;
    }
  } else {
    result.statistic = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
    result.p_value = student_t_upper_tail(result.statistic, static_cast<double>(n - 1));
  }
  result.reject_null = result.p_value < alpha;
  return result;
}

double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw Error("KS test requires non-empty samples");
  std::vector<double> sa = a;
  std::vector<double> sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double ks_asymptotic_p(double d, std::size_t n_a, std::size_t n_b) {
  const double n_e = static_cast<double>(n_a) * static_cast<double>(n_b) /
                     static_cast<double>(n_a + n_b);
  const double lambda = (std::sqrt(n_e) + 0.12 + 0.11 / std::sqrt(n_e)) * d;
  if (lambda < 1.0e-12) return 1.0;

  constexpr double kTermEps = 1.0e-12;
  constexpr int kMaxTerms = 100000;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= kMaxTerms; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < kTermEps) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                         double alpha) {
  TestResult result;
  result.alpha = alpha;
  result.statistic = ks_statistic(a, b);
  result.df_or_sizes = {static_cast<double>(a.size()), static_cast<double>(b.size())};
  result.p_value = ks_asymptotic_p(result.statistic, a.size(), b.size());
  result.reject_null = result.p_value < alpha;
  return result;
}

double theta_from_ws(const std::vector<double>& ws_values, double gamma) {
  if (ws_values.empty()) return kDefaultTheta;
  double sum = 0.0;
  for (double ws : ws_values) sum += ws;
  return sum / static_cast<double>(ws_values.size()) + gamma;
}

ThresholdConfig calibrate_threshold(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& human_corpora,
    const std::vector<std::string>& union_wm, double gamma) {
  ThresholdConfig config;
  config.gamma = gamma;
  std::vector<double> ws_values;
  for (const auto& [name, texts] : human_corpora) {
    if (texts.empty()) throw Error("calibration corpus '" + name + "' is empty");
    std::vector<double> sws;
    sws.reserve(texts.size());
    for (const auto& text : texts) {
      sws.push_back(scoring::sentence_watermark_score(text, union_wm).sws);
    }
    const scoring::TopKScore top = scoring::top_k_mean(sws);
    config.corpora_ws.push_back(CorpusScore{name, top.ws, texts.size()});
    ws_values.push_back(top.ws);
  }
  config.theta = theta_from_ws(ws_values, gamma);
  return config;
}

std::string threshold_to_json(const ThresholdConfig& config) {
  nlohmann::ordered_json obj;
  obj["theta"] = config.theta;
  obj["gamma"] = config.gamma;
  obj["corpora_ws"] = nlohmann::ordered_json::array();
  for (const auto& corpus : config.corpora_ws) {
    obj["corpora_ws"].push_back({{"name", corpus.name},
                                 {"ws", corpus.ws},
                                 {"n", corpus.n}});
  }
  return obj.dump(2) + "\n";
}

ThresholdConfig threshold_from_json(const std::string& text) {
  auto obj = nlohmann::json::parse(text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw ParseError("threshold file is not a JSON object");
  }
  ThresholdConfig config;
  if (obj.contains("theta")) config.theta = obj.at("theta").get<double>();
  if (obj.contains("gamma")) config.gamma = obj.at("gamma").get<double>();
  if (obj.contains("corpora_ws")) {
    for (const auto& entry : obj.at("corpora_ws")) {
      config.corpora_ws.push_back(CorpusScore{entry.at("name").get<std::string>(),
                                              entry.at("ws").get<double>(),
                                              entry.at("n").get<std::size_t>()});
    }
  }
  return config;
}

ThresholdConfig load_threshold(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open threshold file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return threshold_from_json(buffer.str());
  } catch (const std::exception& e) {
    throw ParseError("threshold file '" + path.string() + "': " + e.what());
  }
}

void save_threshold(const ThresholdConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << threshold_to_json(config);
}

}  // namespace promptshield::stats
