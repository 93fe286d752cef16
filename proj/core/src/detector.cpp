#include "promptshield/detector.hpp"

#include <fstream>

#include "json.hpp"
#include "promptshield/errors.hpp"

namespace promptshield::detect {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json test_result_to_json(const stats::TestResult& result) {
  ordered_json obj;
  obj["statistic"] = result.statistic;
  obj["p_value"] = result.p_value;
  obj["df_or_sizes"] = result.df_or_sizes;
  obj["alpha"] = result.alpha;
  obj["reject_null"] = result.reject_null;
  return obj;
}

}  // namespace

std::string_view mode_name(Mode mode) {
  return mode == Mode::Rapid ? "rapid" : "contrastive";
}

std::string_view verdict_name(Verdict verdict) {
  return verdict == Verdict::Imitation ? "imitation" : "not_proven";
}

std::vector<double> score_outputs(const std::vector<SuspectOutput>& outputs,
                                  const ledger::Ledger& ledger,
                                  const scoring::WatermarkStrategy& strategy) {
  std::vector<std::string> unknown;
  for (const auto& output : outputs) {
    if (!ledger.contains(output.query_id)) unknown.push_back(output.query_id);
  }
  if (!unknown.empty()) {
    std::string message = "suspect outputs reference unknown query ids:";
    std::size_t shown = 0;
    for (const auto& id : unknown) {
      if (shown++ == 20) {
        message += " ... (" + std::to_string(unknown.size()) + " total)";
        break;
      }
      message += " '" + id + "'";
    }
    throw Error(message);
  }

  std::vector<double> sws;
  sws.reserve(outputs.size());
  for (const auto& output : outputs) {
    const ledger::QueryRecord& record = ledger.at(output.query_id);
    const std::vector<std::string> effective = scoring::effective_watermarks(
        record.watermark_set, record.query_text, strategy);
    sws.push_back(scoring::sentence_watermark_score(output.text, effective).sws);
  }
  return sws;
}

VerificationReport rapid_verify(const std::vector<SuspectOutput>& suspect_outputs,
                                const ledger::Ledger& ledger,
                                const scoring::WatermarkStrategy& strategy,
                                const stats::ThresholdConfig& threshold,
                                double alpha) {
  if (suspect_outputs.empty()) {
    throw Error("rapid_verify requires at least one suspect output");
  }
  const std::vector<double> sws = score_outputs(suspect_outputs, ledger, strategy);
  const std::vector<double> top = scoring::top_k_values(sws);

  VerificationReport report;
  report.mode = Mode::Rapid;
  report.strategy = strategy.kind;
  report.n_outputs = suspect_outputs.size();
  report.k = top.size();
  double sum = 0.0;
  for (double v : top) sum += v;
  report.ws = sum / static_cast<double>(top.size());
  report.theta = threshold.theta;
  report.alpha = alpha;
  report.t_result = stats::t_test_one_sample_greater(top, threshold.theta, alpha);
  report.verdict =
      report.t_result->reject_null ? Verdict::Imitation : Verdict::NotProven;
  return report;
}

VerificationReport contrastive_verify(const std::vector<double>& suspect_sws,
                                      const std::vector<double>& legit_sws,
                                      const std::vector<double>& origin_sws,
                                      double alpha,
                                      scoring::StrategyKind strategy) {
  if (suspect_sws.empty() || legit_sws.empty() || origin_sws.empty()) {
    throw Error("contrastive_verify requires non-empty SWS samples");
  }
  VerificationReport report;
  report.mode = Mode::Contrastive;
  report.strategy = strategy;
  report.n_outputs = suspect_sws.size();
  const scoring::TopKScore top = scoring::top_k_mean(suspect_sws);
  report.k = top.k;
  report.ws = top.ws;
  report.alpha = alpha;
  report.ks_vs_legit = stats::ks_two_sample(suspect_sws, legit_sws, alpha);
  report.ks_vs_origin = stats::ks_two_sample(suspect_sws, origin_sws, alpha);
  report.verdict = (report.ks_vs_legit->reject_null && report.ks_vs_origin->reject_null)
                       ? Verdict::Imitation
                       : Verdict::NotProven;
  return report;
}

std::string report_to_json(const VerificationReport& report) {
  ordered_json obj;
  obj["mode"] = std::string(mode_name(report.mode));
  obj["strategy"] = std::string(scoring::strategy_name(report.strategy));
  obj["n_outputs"] = report.n_outputs;
  obj["k"] = report.k;
  obj["ws"] = report.ws;
  if (report.mode == Mode::Rapid) obj["theta"] = report.theta;
  obj["alpha"] = report.alpha;
  if (report.t_result) obj["t_result"] = test_result_to_json(*report.t_result);
  if (report.ks_vs_legit) obj["ks_vs_legit"] = test_result_to_json(*report.ks_vs_legit);
  if (report.ks_vs_origin) {
    obj["ks_vs_origin"] = test_result_to_json(*report.ks_vs_origin);
  }
  obj["verdict"] = std::string(verdict_name(report.verdict));
  return obj.dump(2) + "\n";
}

void save_report(const VerificationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << report_to_json(report);
  if (!out) throw Error("failed while writing report '" + path.string() + "'");
}

std::vector<SuspectOutput> load_suspect_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open suspect corpus '" + path.string() + "'");
  std::vector<SuspectOutput> outputs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw ParseError("suspect corpus '" + path.string() + "' line " +
                       std::to_string(line_no) + ": invalid JSON");
    }
    if (!obj.contains("query_id") || !obj["query_id"].is_string()) {
      throw ParseError("suspect corpus '" + path.string() + "' line " +
                       std::to_string(line_no) + ": missing string field 'query_id'");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw ParseError("suspect corpus '" + path.string() + "' line " +
                       std::to_string(line_no) + ": missing string field 'text'");
    }
    outputs.push_back(SuspectOutput{obj["query_id"].get<std::string>(),
                                    obj["text"].get<std::string>()});
  }
  return outputs;
}

void save_suspect_corpus(const std::vector<SuspectOutput>& outputs,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  for (const auto& output : outputs) {
    ordered_json obj;
    obj["query_id"] = output.query_id;
    obj["text"] = output.text;
    out << obj.dump() << '\n';
  }
  if (!out) throw Error("failed while writing suspect corpus '" + path.string() + "'");
}

}  // namespace promptshield::detect
