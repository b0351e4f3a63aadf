#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aistk/errors.hpp"
#include "aistk/immune_network.hpp"
#include "aistk/ingestion.hpp"
#include "aistk/negative_selection.hpp"
#include "aistk/rng.hpp"

namespace ai = aistk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitEmptyResult = 2;
constexpr int kExitCoverageExhausted = 3;

// All output files land via temp + rename so a crashed run never leaves a
// truncated report behind.
void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ai::IoError("cannot open '" + tmp + "' for writing");
    }
    out << content;
    if (!out) {
      throw ai::IoError("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw ai::IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

ai::Matcher matcher_from_flags(const std::string& name, int r) {
  ai::Matcher m;
  if (name == "exact") {
    m.kind = ai::MatcherKind::exact;
  } else if (name == "r-contiguous") {
    m.kind = ai::MatcherKind::r_contiguous;
    m.r = r;
  } else if (name == "packet-fields") {
    m.kind = ai::MatcherKind::packet_fields;
  } else {
    throw ai::ParameterError("unknown matcher '" + name + "'");
  }
  m.validate();
  return m;
}

struct RecommendArgs {
  std::string ratings_path;
  std::string user_id;
  std::string neighborhood_path = "neighborhood.json";
  std::string recommendations_path = "recommendations.csv";
  std::uint64_t seed = 0;
  int top_n = 10;
  bool idiotypic = false;
  int overlap_threshold = 1;
  ai::DynamicsConfig dynamics;
};

int run_recommend_cmd(const RecommendArgs& args, bool k2_overridden) {
  ai::DynamicsConfig dynamics = args.dynamics;
  dynamics.idiotypic_enabled = args.idiotypic;
  // The plain equation uses k2 as stimulation; the suppressive one as
  // suppression. When the caller does not pin k2, give the suppressive form
  // a gentler default so a fresh pool is not crushed before it stabilizes.
  if (args.idiotypic && !k2_overridden) {
    dynamics.k2 = 0.05;
  }
  dynamics.validate();

  ai::PearsonConfig pearson_cfg;
  pearson_cfg.overlap_penalty_threshold = args.overlap_threshold;

  const ai::RatingsTable table = ai::load_ratings(args.ratings_path);
  if (!table.has_user(args.user_id)) {
    std::cerr << "error: unknown user '" << args.user_id << "'\n";
    return kExitInputError;
  }
  const ai::UserProfile& antigen = table.user(args.user_id);
  const std::vector<ai::UserProfile> candidates = table.candidates_excluding(args.user_id);
  if (candidates.empty()) {
    std::cerr << "error: no candidate users besides '" << args.user_id << "'\n";
    return kExitInputError;
  }

  const ai::RecommenderRun run =
      ai::run_recommender(antigen, candidates, dynamics, pearson_cfg);
  write_atomic(args.neighborhood_path, ai::state_to_json(run.state));

  if (run.no_neighborhood) {
    write_atomic(args.recommendations_path, ai::recommendations_to_csv({}));
    std::cerr << "no neighborhood: every candidate decayed out\n";
    return kExitEmptyResult;
  }

  const std::vector<ai::Recommendation> recs = ai::recommend(run.state, args.top_n);
  write_atomic(args.recommendations_path, ai::recommendations_to_csv(recs));
  std::cout << "neighborhood of " << run.state.size() << " users after "
            << run.state.iteration() << " iterations; " << recs.size()
            << " recommendations\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string self_path;
  std::string out_path = "detectors.json";
  std::string matcher_name = "packet-fields";
  int r = 2;
  int target_count = 20;
  int max_attempts = 10000;
  int activation_threshold = 1;
  int lifetime = 1000;  // <= 0 means unbounded
  bool mutate_on_censor = false;
  std::uint64_t seed = 0;
};

int run_generate_cmd(const GenerateArgs& args) {
  const ai::TrafficLog log = ai::load_traffic(args.self_path);
  if (log.size() == 0) {
    std::cerr << "error: self file '" << args.self_path << "' holds no records\n";
    return kExitInputError;
  }

  ai::GenerationConfig cfg;
  cfg.target_count = args.target_count;
  cfg.max_attempts = args.max_attempts;
  cfg.matcher = matcher_from_flags(args.matcher_name, args.r);
  cfg.rng_seed = ai::derive_seed(args.seed, "negative_selection");
  cfg.mutate_instead_of_discard = args.mutate_on_censor;
  cfg.activation_threshold = args.activation_threshold;
  cfg.lifetime = args.lifetime <= 0 ? std::nullopt : std::optional<int>(args.lifetime);

  // Labels, if present, are ignored here: everything in the file is self.
  const ai::SelfSet self(log.patterns());

  const auto started = std::chrono::steady_clock::now();
  const ai::GenerationReport report = ai::generate_detectors(self, cfg);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);

  write_atomic(args.out_path, ai::detectors_to_json(report.detectors));

  nlohmann::json summary;
  summary["generated"] = report.detectors.size();
  summary["attempts"] = report.attempts;
  summary["elapsed_ms"] = elapsed.count();
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

struct MonitorArgs {
  std::string detectors_path;
  std::string traffic_path;
  std::string out_path = "report.json";
  std::string metrics_path = "metrics.json";
  std::string detectors_out_path;
  std::string matcher_name = "packet-fields";
  int r = 2;
  bool auto_confirm_labels = false;
};

int run_monitor_cmd(const MonitorArgs& args) {
  std::ifstream in(args.detectors_path, std::ios::binary);
  if (!in) {
    throw ai::IoError("cannot open '" + args.detectors_path + "' for reading");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::vector<ai::Detector> detectors = ai::detectors_from_json(buffer.str());

  const ai::TrafficLog log = ai::load_traffic(args.traffic_path);
  const ai::Matcher matcher = matcher_from_flags(args.matcher_name, args.r);

  ai::MonitorReport report = ai::monitor(std::move(detectors), log.patterns(), matcher);
  write_atomic(args.out_path, ai::report_to_json(report));

  std::size_t self_alerts = 0;
  std::size_t nonself_alerts = 0;
  if (log.labeled()) {
    std::set<int> alerted_records;
    for (const ai::Alert& alert : report.alerts) {
      alerted_records.insert(alert.record_index);
    }
    std::size_t n_self = 0;
    std::size_t n_nonself = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
      const bool nonself = *log.records()[i].labeled_nonself;
      const bool alerted = alerted_records.count(int(i)) > 0;
      if (nonself) {
        ++n_nonself;
        if (alerted) ++nonself_alerts;
      } else {
        ++n_self;
        if (alerted) ++self_alerts;
      }
    }
    nlohmann::json metrics;
    metrics["true_positives"] = nonself_alerts;
    metrics["false_positives"] = self_alerts;
    metrics["detection_rate"] =
        n_nonself == 0 ? 0.0 : double(nonself_alerts) / double(n_nonself);
    metrics["false_alarm_rate"] = n_self == 0 ? 0.0 : double(self_alerts) / double(n_self);
    write_atomic(args.metrics_path, metrics.dump(2) + "\n");
  }

  if (args.auto_confirm_labels && log.labeled()) {
    // Ground truth stands in for the operator: a detector that alerted on a
    // nonself record is confirmed; one that alerted only on self is not.
    std::set<int> confirmed;
    for (const ai::Alert& alert : report.alerts) {
      if (*log.records()[std::size_t(alert.record_index)].labeled_nonself) {
        confirmed.insert(alert.detector_id);
      }
    }
    for (std::size_t i = 0; i < report.detectors.size(); ++i) {
      if (report.detectors[i].activations > 0) {
        report.detectors[i] = ai::promote(report.detectors[i], confirmed.count(int(i)) > 0);
      }
    }
  }

  if (!args.detectors_out_path.empty()) {
    write_atomic(args.detectors_out_path, ai::detectors_to_json(report.detectors));
  }

  std::cout << report.alerts.size() << " alerts, " << report.retired.size()
            << " retired detectors\n";
  return kExitOk;
}

struct ClonalArgs {
  std::string target_text;
  std::string out_path = "clonal_trace.csv";
  int pop_size = 20;
  int generations = 50;
  int max_clones = 5;
  double rate_max = 0.3;
  double rate_min = 0.0;
  bool direct = false;
  std::uint64_t seed = 0;
};

int run_clonal_cmd(const ClonalArgs& args) {
  const ai::BitString target = ai::parse_bitstring(args.target_text);

  ai::CloneConfig cfg;
  cfg.max_clones = args.max_clones;
  cfg.rate_max = args.rate_max;
  cfg.rate_min = args.rate_min;
  cfg.inverse = !args.direct;
  cfg.rng_seed = ai::derive_seed(args.seed, "clonal_selection");

  const ai::EvolutionResult result =
      ai::evolve_to_target(target, args.pop_size, args.generations, cfg);

  std::string csv = "generation,best_affinity,mean_affinity\n";
  for (const ai::GenerationStats& row : result.trace) {
    char line[96];
    std::snprintf(line, sizeof line, "%d,%.6f,%.6f\n", row.generation, row.best_affinity,
                  row.mean_affinity);
    csv += line;
  }
  write_atomic(args.out_path, csv);

  std::cout << (result.reached_target ? "reached target" : "stopped") << " after "
            << result.generations_run << " generations; best " << ai::render(result.best)
            << "\n";
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Immune-inspired recommendation and anomaly-detection toolkit"};
  app.require_subcommand(1);

  RecommendArgs rec;
  CLI::App* recommend = app.add_subcommand("recommend", "Recommend items for one user");
  recommend->set_config("--config");
  recommend->add_option("--ratings", rec.ratings_path, "Ratings CSV")->required();
  recommend->add_option("--user", rec.user_id, "Target user id")->required();
  recommend->add_option("--pool-size", rec.dynamics.pool_size, "Neighbourhood capacity");
  recommend->add_option("--top-n", rec.top_n, "Recommendations to emit");
  recommend->add_option("--seed", rec.seed, "Global seed")->envname("AIS_SEED");
  recommend->add_flag("--idiotypic", rec.idiotypic, "Use the suppressive dynamics");
  recommend->add_option("--k1", rec.dynamics.k1, "Stimulation rate (suppressive form)");
  CLI::Option* k2_opt = recommend->add_option("--k2", rec.dynamics.k2,
                                              "Stimulation (plain) / suppression rate");
  recommend->add_option("--k3", rec.dynamics.k3, "Death rate");
  recommend->add_option("--dt", rec.dynamics.dt, "Euler step width");
  recommend->add_option("--decay-amount", rec.dynamics.decay_amount,
                        "Flat per-iteration decay");
  recommend->add_option("--removal-floor", rec.dynamics.removal_floor,
                        "Drop antibodies below this concentration");
  recommend->add_option("--initial-concentration", rec.dynamics.initial_concentration,
                        "Concentration at admission");
  recommend->add_option("--saturation-cap", rec.dynamics.saturation_cap,
                        "Concentration ceiling");
  recommend->add_option("--stabilization-window", rec.dynamics.stabilization_window,
                        "Iterations without size change before stopping");
  recommend->add_option("--overlap-threshold", rec.overlap_threshold,
                        "Overlap size below which correlations are penalized");
  recommend->add_option("--out-neighborhood", rec.neighborhood_path, "Neighbourhood JSON path");
  recommend->add_option("--out-recommendations", rec.recommendations_path,
                        "Recommendations CSV path");

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("negsel-generate", "Generate censored detectors");
  generate->set_config("--config");
  generate->add_option("--self", gen.self_path, "Trusted traffic CSV")->required();
  generate->add_option("--target-count", gen.target_count, "Detectors wanted");
  generate->add_option("--max-attempts", gen.max_attempts, "Candidate budget");
  generate->add_option("--matcher", gen.matcher_name, "exact | r-contiguous | packet-fields");
  generate->add_option("--r", gen.r, "Run length for r-contiguous");
  generate->add_option("--activation-threshold", gen.activation_threshold,
                       "Matches needed per alert");
  generate->add_option("--lifetime", gen.lifetime,
                       "Records a detector may monitor (<= 0 for unbounded)");
  generate->add_flag("--mutate-on-censor", gen.mutate_on_censor,
                     "Hypermutate censored candidates instead of discarding");
  generate->add_option("--seed", gen.seed, "Global seed")->envname("AIS_SEED");
  generate->add_option("--out", gen.out_path, "Detector JSON path");

  MonitorArgs mon;
  CLI::App* monitor_cmd = app.add_subcommand("negsel-monitor", "Monitor traffic with detectors");
  monitor_cmd->set_config("--config");
  monitor_cmd->add_option("--detectors", mon.detectors_path, "Detector JSON")->required();
  monitor_cmd->add_option("--traffic", mon.traffic_path, "Traffic CSV")->required();
  monitor_cmd->add_option("--matcher", mon.matcher_name, "exact | r-contiguous | packet-fields");
  monitor_cmd->add_option("--r", mon.r, "Run length for r-contiguous");
  monitor_cmd->add_flag("--auto-confirm-labels", mon.auto_confirm_labels,
                        "Promote detectors that alerted on labeled nonself records");
  monitor_cmd->add_option("--out", mon.out_path, "Report JSON path");
  monitor_cmd->add_option("--metrics-out", mon.metrics_path,
                          "Metrics JSON path (labeled traffic only)");
  monitor_cmd->add_option("--detectors-out", mon.detectors_out_path,
                          "Post-run detector states JSON path");

  ClonalArgs clo;
  CLI::App* clonal = app.add_subcommand("clonal-demo", "Evolve bit strings toward a target");
  clonal->set_config("--config");
  clonal->add_option("--target", clo.target_text, "Target bit string")->required();
  clonal->add_option("--pop-size", clo.pop_size, "Population size");
  clonal->add_option("--generations", clo.generations, "Generation budget");
  clonal->add_option("--max-clones", clo.max_clones, "Clones at affinity 1");
  clonal->add_option("--rate-max", clo.rate_max, "Mutation rate ceiling");
  clonal->add_option("--rate-min", clo.rate_min, "Mutation rate floor");
  clonal->add_flag("--direct", clo.direct, "Mutate stronger matches more, not less");
  clonal->add_option("--seed", clo.seed, "Global seed")->envname("AIS_SEED");
  clonal->add_option("--out", clo.out_path, "Trace CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (recommend->parsed()) {
      return run_recommend_cmd(rec, k2_opt->count() > 0);
    }
    if (generate->parsed()) {
      return run_generate_cmd(gen);
    }
    if (monitor_cmd->parsed()) {
      return run_monitor_cmd(mon);
    }
    return run_clonal_cmd(clo);
  } catch (const ai::CoverageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCoverageExhausted;
  } catch (const ai::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  return dispatch(argc, argv);
}
