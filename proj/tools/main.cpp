// promptshield CLI: embed | serve | calibrate | detect | attack | simulate | metrics

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "app_config.hpp"
#include "gateway.hpp"
#include "json.hpp"
#include "promptshield/attacks.hpp"
#include "promptshield/detector.hpp"
#include "promptshield/embedder.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/ledger.hpp"
#include "promptshield/metrics.hpp"
#include "promptshield/rng.hpp"
#include "promptshield/scoring.hpp"
#include "promptshield/sim.hpp"
#include "promptshield/stats.hpp"

namespace ps = promptshield;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitImitation = 10;

std::vector<std::string> read_lines(const std::string& path, bool keep_empty = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ps::Error("cannot open file '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (keep_empty || line.find_first_not_of(" \t") != std::string::npos) {
      lines.push_back(line);
    }
  }
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ps::Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ps::Error("failed while writing '" + path + "'");
}

struct UpstreamChoice {
  bool mock = false;
  std::unique_ptr<ps::embed::UpstreamClient> client;
};

UpstreamChoice make_upstream(const ps::cli::AppConfig& config, bool mock,
                             bool declares) {
  UpstreamChoice choice;
  choice.mock = mock;
  if (mock) {
    choice.client = std::make_unique<ps::embed::MockUpstreamClient>(
        config.seed.value_or(0), declares);
    return choice;
  }
  if (config.upstream_base_url.empty()) {
    throw ps::Error("no upstream configured: pass --base-url or use --mock");
  }
  const char* key = std::getenv("PROMPTSHIELD_API_KEY");
  if (key == nullptr || *key == '\0') {
    throw ps::Error("environment variable PROMPTSHIELD_API_KEY is not set");
  }
  ps::embed::HttpUpstreamConfig http;
  http.base_url = config.upstream_base_url;
  http.model_name = config.upstream_model_name;
  http.api_key = key;
  choice.client = std::make_unique<ps::embed::HttpUpstreamClient>(std::move(http));
  return choice;
}

int serve_command(const ps::cli::AppConfig& config, bool mock, const std::string& host,
                  int port) {
  if (config.ledger_path.empty()) throw ps::Error("--ledger is required");
  const ps::embed::PromptTemplate& tpl = ps::embed::builtin_template(config.template_id);
  UpstreamChoice upstream = make_upstream(config, mock, tpl.declares_watermarks());
  ps::ledger::LedgerAppender sink((std::filesystem::path(config.ledger_path)));

  ps::cli::Gateway gateway(tpl, *upstream.client, sink, config.seed);
  std::cerr << "promptshield gateway listening on " << host << ":" << port
            << " (ledger: " << config.ledger_path << ")\n";
  if (!gateway.listen(host, port)) {
    throw ps::Error("failed to listen on " + host + ":" + std::to_string(port));
  }
  return kExitOk;
}

int embed_command(const ps::cli::AppConfig& config, const std::string& queries_path,
                  bool mock, bool serve, const std::string& host, int port) {
  if (serve) return serve_command(config, mock, host, port);
  if (queries_path.empty()) throw ps::Error("--queries is required (or use --serve)");
  if (config.ledger_path.empty()) throw ps::Error("--ledger is required");

  const ps::embed::PromptTemplate& tpl = ps::embed::builtin_template(config.template_id);
  UpstreamChoice upstream = make_upstream(config, mock, tpl.declares_watermarks());

  ps::embed::Embedder embedder(tpl, *upstream.client);
  if (config.seed.has_value()) embedder.set_seed(*config.seed);

  ps::ledger::LedgerAppender sink((std::filesystem::path(config.ledger_path)));
  std::size_t warnings = 0;
  const std::vector<std::string> queries = read_lines(queries_path);
  for (const auto& query : queries) {
    ps::embed::EmbedResult result = embedder.embed(query, sink);
    if (result.declaration_missing) {
      ++warnings;
      std::cerr << "warning: no watermark declaration for query_id "
                << result.record.query_id << "\n";
    }
    for (const auto& phrase : result.unverified_watermarks) {
      ++warnings;
      std::cerr << "warning: declared watermark '" << phrase
                << "' not found in the answer for query_id "
                << result.record.query_id << "\n";
    }
  }
  std::cout << "embedded " << queries.size() << " queries into " << config.ledger_path
            << " (" << warnings << " declaration warnings)\n";
  return kExitOk;
}

int calibrate_command(const std::vector<std::string>& corpus_specs,
                      const std::string& ledger_path, const std::string& wm_path,
                      double gamma, const std::string& out_path) {
  std::vector<std::string> union_wm;
  if (!ledger_path.empty()) {
    union_wm = ps::ledger::load_ledger(ledger_path).union_watermarks();
  } else if (!wm_path.empty()) {
    union_wm = ps::ledger::dedup_watermarks(read_lines(wm_path));
  } else if (!corpus_specs.empty()) {
    throw ps::Error("calibration needs a watermark union: pass --ledger or --wm");
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> corpora;
  for (const auto& spec : corpus_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw ps::Error("--corpus expects NAME=PATH, got '" + spec + "'");
    }
    corpora.emplace_back(spec.substr(0, eq), read_lines(spec.substr(eq + 1)));
  }

  const ps::stats::ThresholdConfig config =
      ps::stats::calibrate_threshold(corpora, union_wm, gamma);
  for (const auto& corpus : config.corpora_ws) {
    std::cout << "corpus " << corpus.name << ": WS = " << corpus.ws
              << " (n = " << corpus.n << ")\n";
  }
  std::cout << "theta = " << config.theta << " (gamma = " << config.gamma << ")\n";
  if (!out_path.empty()) {
    ps::stats::save_threshold(config, out_path);
  }
  return kExitOk;
}

int detect_command(const std::string& suspect_path, const std::string& ledger_path,
                   const std::string& mode, const std::string& strategy_name,
                   const std::string& human_corpus_path,
                   const std::string& threshold_path, std::optional<double> theta,
                   double alpha, const std::string& legit_path,
                   const std::string& origin_path, const std::string& out_path,
                   int rarity_threshold) {
  const ps::ledger::Ledger ledger = ps::ledger::load_ledger(ledger_path);
  const std::vector<ps::detect::SuspectOutput> suspect =
      ps::detect::load_suspect_corpus(suspect_path);

  ps::scoring::WatermarkStrategy strategy;
  strategy.kind = ps::scoring::strategy_from_name(strategy_name);
  strategy.rarity_threshold = rarity_threshold;
  ps::corpus::FrequencyTable human_table;
  if (strategy.kind == ps::scoring::StrategyKind::HighEntropy) {
    if (!human_corpus_path.empty()) {
      human_table = ps::corpus::build_frequency_table(read_lines(human_corpus_path));
      strategy.frequency_table = &human_table;
    } else {
      strategy.frequency_table = &ps::sim::default_filler_vocab();
    }
  }

  ps::stats::ThresholdConfig threshold_config;
  if (!threshold_path.empty()) {
    threshold_config = ps::stats::load_threshold(threshold_path);
  }
  if (theta.has_value()) threshold_config.theta = *theta;

  ps::detect::VerificationReport report;
  if (mode == "rapid") {
    report = ps::detect::rapid_verify(suspect, ledger, strategy, threshold_config, alpha);
  } else if (mode == "contrastive") {
    if (legit_path.empty() || origin_path.empty()) {
      throw ps::Error("contrastive mode requires --legit and --origin corpora");
    }
    const auto suspect_sws = ps::detect::score_outputs(suspect, ledger, strategy);
    const auto legit_sws = ps::detect::score_outputs(
        ps::detect::load_suspect_corpus(legit_path), ledger, strategy);
    const auto origin_sws = ps::detect::score_outputs(
        ps::detect::load_suspect_corpus(origin_path), ledger, strategy);
    report = ps::detect::contrastive_verify(suspect_sws, legit_sws, origin_sws, alpha,
                                            strategy.kind);
  } else {
    throw ps::Error("--mode must be rapid or contrastive");
  }

  ps::detect::save_report(report, out_path);
  std::cout << ps::detect::report_to_json(report);
  return report.verdict == ps::detect::Verdict::Imitation ? kExitImitation : kExitOk;
}

int attack_command(std::string kind, std::optional<double> rate,
                   std::optional<std::uint64_t> seed, const std::string& scenario_path,
                   const std::string& in_path, const std::string& out_path) {
  ps::attacks::EditAttackSpec spec;
  bool have_spec = false;
  if (!scenario_path.empty()) {
    const ps::sim::Scenario scenario = ps::sim::load_scenario(scenario_path);
    if (!scenario.attack.has_value()) {
      throw ps::Error("scenario '" + scenario_path + "' has no attack block");
    }
    spec = *scenario.attack;
    have_spec = true;
  }
  if (!kind.empty()) {
    spec.kind = ps::attacks::edit_kind_from_name(kind);
    have_spec = true;
  } else if (!have_spec) {
    throw ps::Error("--kind is required (or pass --spec with an attack block)");
  }
  if (rate.has_value()) spec.rate = *rate;
  if (seed.has_value()) spec.seed = *seed;
  if (spec.rate < 0.0 || spec.rate > 1.0) throw ps::Error("--rate must be in [0, 1]");

  // Auto-detect the record shape from the first line: suspect corpora carry
  // "text", ledgers carry "answer_text".
  const std::vector<std::string> lines = read_lines(in_path);
  bool is_ledger = false;
  if (!lines.empty()) {
    auto probe = nlohmann::json::parse(lines.front(), nullptr, false);
    if (probe.is_object() && probe.contains("answer_text")) is_ledger = true;
  }

  if (is_ledger) {
    const ps::ledger::Ledger in_ledger = ps::ledger::load_ledger(in_path);
    ps::ledger::Ledger out_ledger(in_ledger.source_tag());
    std::size_t index = 0;
    for (ps::ledger::QueryRecord record : in_ledger.records()) {
      ps::attacks::EditAttackSpec per_record = spec;
      per_record.seed = ps::rng::derive_seed(spec.seed, index++);
      record.answer_text = ps::attacks::edit_attack(record.answer_text, per_record);
      out_ledger.append(std::move(record));
    }
    ps::ledger::save_ledger(out_ledger, out_path);
    std::cout << "attacked " << out_ledger.size() << " ledger records -> " << out_path
              << "\n";
  } else {
    std::vector<ps::detect::SuspectOutput> outputs =
        ps::detect::load_suspect_corpus(in_path);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      ps::attacks::EditAttackSpec per_record = spec;
      per_record.seed = ps::rng::derive_seed(spec.seed, i);
      outputs[i].text = ps::attacks::edit_attack(outputs[i].text, per_record);
    }
    ps::detect::save_suspect_corpus(outputs, out_path);
    std::cout << "attacked " << outputs.size() << " outputs -> " << out_path << "\n";
  }
  return kExitOk;
}

int simulate_command(const std::string& scenario_path, const std::string& ledger_path,
                     const std::string& out_path, const std::string& suspect_out_path,
                     std::optional<std::uint64_t> seed, std::size_t make_ledger_n) {
  if (make_ledger_n > 0) {
    if (ledger_path.empty()) {
      throw ps::Error("--make-ledger needs --ledger for the output path");
    }
    const ps::ledger::Ledger ledger =
        ps::sim::make_synthetic_ledger(make_ledger_n, seed.value_or(0));
    ps::ledger::save_ledger(ledger, ledger_path);
    std::cout << "wrote synthetic ledger with " << ledger.size() << " records to "
              << ledger_path << "\n";
    return kExitOk;
  }

  if (scenario_path.empty()) throw ps::Error("--scenario is required");
  if (ledger_path.empty()) throw ps::Error("--ledger is required");
  ps::sim::Scenario scenario = ps::sim::load_scenario(scenario_path);
  if (seed.has_value()) scenario.spec.seed = *seed;

  const ps::ledger::Ledger ledger = ps::ledger::load_ledger(ledger_path);
  const ps::sim::ScenarioRun run = ps::sim::run_scenario(ledger, scenario);

  if (!suspect_out_path.empty()) {
    ps::detect::save_suspect_corpus(run.suspect_corpus, suspect_out_path);
  }
  ps::detect::save_report(run.report, out_path);
  std::cout << ps::detect::report_to_json(run.report);
  return kExitOk;
}

int metrics_command(const std::string& suspect_path, const std::string& ledger_path,
                    const std::string& csv_path, const std::string& json_path,
                    double beta) {
  const ps::ledger::Ledger ledger = ps::ledger::load_ledger(ledger_path);
  const std::vector<ps::detect::SuspectOutput> suspect =
      ps::detect::load_suspect_corpus(suspect_path);

  std::vector<std::tuple<std::string, std::string, std::string>> items;
  items.reserve(suspect.size());
  for (const auto& output : suspect) {
    const ps::ledger::QueryRecord& record = ledger.at(output.query_id);
    items.emplace_back(output.query_id, output.text, record.answer_text);
  }
  const ps::metrics::MetricReport report = ps::metrics::evaluate(items, beta);
  if (!csv_path.empty()) write_text(csv_path, ps::metrics::report_to_csv(report));
  if (!json_path.empty()) write_text(json_path, ps::metrics::report_to_json(report));
  std::cout << ps::metrics::report_to_json(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"promptshield: prompt-induced watermarks for LLM APIs — embedding "
               "gateway, query ledger and statistical extraction-attack detection"};
  app.require_subcommand(1);
  std::function<int()> run;

  ps::cli::AppConfig config;
  std::string config_path;

  // --- embed ---------------------------------------------------------------
  auto* embed = app.add_subcommand(
      "embed", "Wrap queries in a watermarking prompt and record answers");
  {
    auto opts = std::make_shared<std::tuple<std::string, bool, bool, std::string, int>>(
        "", false, false, "127.0.0.1", 8787);
    embed->add_option("--config", config_path, "Flat key=value config file");
    embed->add_option("--queries", std::get<0>(*opts), "Text file, one query per line");
    embed->add_option("--ledger", config.ledger_path, "Ledger JSONL path (appended)");
    embed->add_option("--template", config.template_id,
                      "Prompt template id (p1..p6, default p4)");
    embed->add_flag("--mock", std::get<1>(*opts),
                    "Use the deterministic built-in mock upstream");
    embed->add_option("--seed", [&config](const CLI::results_t& res) {
      config.seed = std::stoull(res[0]);
      return true;
    }, "Seed for reproducible ids/timestamps (mock runs)");
    embed->add_option("--base-url", config.upstream_base_url, "Upstream base URL");
    embed->add_option("--model", config.upstream_model_name, "Upstream model name");
    embed->add_flag("--serve", std::get<2>(*opts), "Run the gateway instead of batch mode");
    embed->add_option("--host", std::get<3>(*opts), "Gateway host (with --serve)");
    embed->add_option("--port", std::get<4>(*opts), "Gateway port (with --serve)");
    embed->callback([&, opts] {
      run = [&, opts] {
        if (!config_path.empty()) ps::cli::apply_config_file(config, config_path);
        config.validate();
        return embed_command(config, std::get<0>(*opts), std::get<1>(*opts),
                             std::get<2>(*opts), std::get<3>(*opts), std::get<4>(*opts));
      };
    });
  }

  // --- serve ---------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "Run the watermarking gateway");
  {
    auto opts = std::make_shared<std::tuple<bool, std::string, int>>(false, "127.0.0.1",
                                                                     8787);
    serve->add_option("--config", config_path, "Flat key=value config file");
    serve->add_option("--ledger", config.ledger_path, "Ledger JSONL path (appended)");
    serve->add_option("--template", config.template_id,
                      "Prompt template id (p1..p6, default p4)");
    serve->add_flag("--mock", std::get<0>(*opts),
                    "Use the deterministic built-in mock upstream");
    serve->add_option("--seed", [&config](const CLI::results_t& res) {
      config.seed = std::stoull(res[0]);
      return true;
    }, "Seed for the mock upstream");
    serve->add_option("--base-url", config.upstream_base_url, "Upstream base URL");
    serve->add_option("--model", config.upstream_model_name, "Upstream model name");
    serve->add_option("--host", std::get<1>(*opts), "Bind host");
    serve->add_option("--port", std::get<2>(*opts), "Bind port");
    serve->callback([&, opts] {
      run = [&, opts] {
        if (!config_path.empty()) ps::cli::apply_config_file(config, config_path);
        config.validate();
        return serve_command(config, std::get<0>(*opts), std::get<1>(*opts),
                             std::get<2>(*opts));
      };
    });
  }

  // --- calibrate -------------------------------------------------------------
  auto* calibrate = app.add_subcommand(
      "calibrate", "Compute the rapid-test threshold from human corpora");
  {
    auto corpora = std::make_shared<std::vector<std::string>>();
    auto paths = std::make_shared<std::tuple<std::string, std::string, std::string>>();
    auto gamma = std::make_shared<double>(0.0);
    calibrate->add_option("--corpus", *corpora,
                          "NAME=PATH human corpus (one text per line); repeatable");
    calibrate->add_option("--ledger", std::get<0>(*paths),
                          "Ledger whose union watermark set to score against");
    calibrate->add_option("--wm", std::get<1>(*paths),
                          "Watermark list file (one phrase per line)");
    calibrate->add_option("--gamma", *gamma, "Relaxation coefficient (default 0)");
    calibrate->add_option("--out", std::get<2>(*paths), "Threshold JSON output path");
    calibrate->callback([&, corpora, paths, gamma] {
      run = [&, corpora, paths, gamma] {
        return calibrate_command(*corpora, std::get<0>(*paths), std::get<1>(*paths),
                                 *gamma, std::get<2>(*paths));
      };
    });
  }

  // --- detect ----------------------------------------------------------------
  auto* detect = app.add_subcommand(
      "detect", "Verify whether a suspect corpus carries the ledger watermarks");
  {
    struct DetectOpts {
      std::string suspect;
      std::string ledger;
      std::string mode = "rapid";
      std::string strategy = "all";
      std::string human_corpus;
      std::string threshold;
      std::optional<double> theta;
      double alpha = ps::stats::kDefaultAlpha;
      std::string legit;
      std::string origin;
      std::string out = "report.json";
      int rarity = 5;
    };
    auto opts = std::make_shared<DetectOpts>();
    detect->add_option("--suspect", opts->suspect, "Suspect corpus JSONL")->required();
    detect->add_option("--ledger", opts->ledger, "Ledger JSONL")->required();
    detect->add_option("--mode", opts->mode, "rapid | contrastive");
    detect->add_option("--strategy", opts->strategy,
                       "all | query-excluded | high-entropy");
    detect->add_option("--human-corpus", opts->human_corpus,
                       "Human corpus for the high-entropy frequency table");
    detect->add_option("--threshold", opts->threshold, "Threshold JSON from calibrate");
    detect->add_option("--theta", [opts](const CLI::results_t& res) {
      opts->theta = std::stod(res[0]);
      return true;
    }, "Override threshold theta (default 0.11)");
    detect->add_option("--alpha", opts->alpha, "Significance level (default 0.05)");
    detect->add_option("--legit", opts->legit,
                       "Legitimate-model corpus JSONL (contrastive)");
    detect->add_option("--origin", opts->origin,
                       "Origin-model corpus JSONL (contrastive)");
    detect->add_option("--out", opts->out, "Report JSON path (default report.json)");
    detect->add_option("--rarity-threshold", opts->rarity,
                       "High-entropy rarity threshold (default 5)");
    detect->callback([&run, opts] {
      run = [opts] {
        return detect_command(opts->suspect, opts->ledger, opts->mode, opts->strategy,
                              opts->human_corpus, opts->threshold, opts->theta,
                              opts->alpha, opts->legit, opts->origin, opts->out,
                              opts->rarity);
      };
    });
  }

  // --- attack ----------------------------------------------------------------
  auto* attack = app.add_subcommand(
      "attack", "Apply a token-level edit attack to a corpus or ledger file");
  {
    struct AttackOpts {
      std::string kind;
      std::optional<double> rate;
      std::optional<std::uint64_t> seed;
      std::string spec;
      std::string in;
      std::string out;
    };
    auto opts = std::make_shared<AttackOpts>();
    attack->add_option("--kind", opts->kind, "insert | delete | replace | swap");
    attack->add_option("--rate", [opts](const CLI::results_t& res) {
      opts->rate = std::stod(res[0]);
      return true;
    }, "Fraction of tokens touched (default 0.1)");
    attack->add_option("--seed", [opts](const CLI::results_t& res) {
      opts->seed = std::stoull(res[0]);
      return true;
    }, "Attack seed; per-record seeds are derived from it");
    attack->add_option("--spec", opts->spec, "Scenario JSON with an attack block");
    attack->add_option("--in", opts->in, "Input JSONL (suspect corpus or ledger)")
        ->required();
    attack->add_option("--out", opts->out, "Output JSONL")->required();
    attack->callback([&run, opts] {
      run = [opts] {
        return attack_command(opts->kind, opts->rate, opts->seed, opts->spec, opts->in,
                              opts->out);
      };
    });
  }

  // --- simulate ----------------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "Run a synthetic suspect-model scenario end to end");
  {
    struct SimulateOpts {
      std::string scenario;
      std::string ledger;
      std::string out = "report.json";
      std::string suspect_out;
      std::optional<std::uint64_t> seed;
      std::size_t make_ledger = 0;
    };
    auto opts = std::make_shared<SimulateOpts>();
    simulate->add_option("--scenario", opts->scenario, "Scenario JSON file");
    simulate->add_option("--ledger", opts->ledger,
                         "Ledger JSONL (input; output with --make-ledger)");
    simulate->add_option("--out", opts->out, "Report JSON path (default report.json)");
    simulate->add_option("--suspect-out", opts->suspect_out,
                         "Write the generated suspect corpus here");
    simulate->add_option("--seed", [opts](const CLI::results_t& res) {
      opts->seed = std::stoull(res[0]);
      return true;
    }, "Override the scenario generation seed");
    simulate->add_option("--make-ledger", opts->make_ledger,
                         "Write a synthetic N-record ledger to --ledger and exit");
    simulate->callback([&run, opts] {
      run = [opts] {
        return simulate_command(opts->scenario, opts->ledger, opts->out,
                                opts->suspect_out, opts->seed, opts->make_ledger);
      };
    });
  }

  // --- metrics ----------------------------------------------------------------
  auto* metrics = app.add_subcommand(
      "metrics", "BLEU-4 / ROUGE-Lsum of suspect outputs against ledger answers");
  {
    struct MetricsOpts {
      std::string suspect;
      std::string ledger;
      std::string csv;
      std::string json;
      double beta = 1.0;
    };
    auto opts = std::make_shared<MetricsOpts>();
    metrics->add_option("--suspect", opts->suspect, "Suspect corpus JSONL")->required();
    metrics->add_option("--ledger", opts->ledger, "Ledger JSONL")->required();
    metrics->add_option("--csv", opts->csv, "Per-item CSV output path");
    metrics->add_option("--json", opts->json, "Summary JSON output path");
    metrics->add_option("--beta", opts->beta, "ROUGE-Lsum beta (default 1)");
    metrics->callback([&run, opts] {
      run = [opts] {
        return metrics_command(opts->suspect, opts->ledger, opts->csv, opts->json,
                               opts->beta);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    return run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
