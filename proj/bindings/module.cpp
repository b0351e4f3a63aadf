#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aistk/affinity.hpp"
#include "aistk/clonal_selection.hpp"
#include "aistk/encoding.hpp"
#include "aistk/errors.hpp"
#include "aistk/immune_network.hpp"
#include "aistk/ingestion.hpp"
#include "aistk/negative_selection.hpp"
#include "aistk/rng.hpp"

namespace py = pybind11;

namespace {

// The python surface trades in plain strings and dicts; patterns cross the
// boundary in their textual form.
aistk::Pattern pattern_from_text(const std::string& text) {
  if (text.find(',') != std::string::npos) {
    return aistk::parse_packet(text);
  }
  return aistk::parse_bitstring(text);
}

aistk::UserProfile profile_from_votes(const std::string& user_id,
                                      const std::map<std::string, int>& votes) {
  aistk::UserProfile profile(user_id);
  for (const auto& [item, score] : votes) {
    profile.add_vote(item, score);
  }
  return profile;
}

aistk::Matcher matcher_from_name(const std::string& name, int r) {
  aistk::Matcher m;
  if (name == "exact") {
    m.kind = aistk::MatcherKind::exact;
  } else if (name == "r-contiguous") {
    m.kind = aistk::MatcherKind::r_contiguous;
    m.r = r;
  } else if (name == "packet-fields") {
    m.kind = aistk::MatcherKind::packet_fields;
  } else {
    throw aistk::ParameterError("unknown matcher '" + name + "'");
  }
  m.validate();
  return m;
}

py::dict detector_to_dict(const aistk::Detector& d) {
  py::dict out;
  out["pattern"] = aistk::render(d.pattern);
  out["state"] = aistk::render(d.state);
  out["activation_threshold"] = d.activation_threshold;
  out["lifetime"] = d.lifetime ? py::object(py::int_(*d.lifetime)) : py::object(py::none());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Immune-inspired matching, selection and recommendation primitives";

  py::register_exception<aistk::Error>(m, "AistkError", PyExc_ValueError);

  m.def(
      "hamming_similarity",
      [](const std::string& a, const std::string& b) {
        return aistk::hamming_similarity(aistk::parse_bitstring(a), aistk::parse_bitstring(b));
      },
      py::arg("a"), py::arg("b"),
      "Number of positions at which two equal-length bit strings agree.");

  m.def(
      "longest_contiguous_match",
      [](const std::string& a, const std::string& b) {
        return aistk::longest_contiguous_match(aistk::parse_bitstring(a),
                                               aistk::parse_bitstring(b));
      },
      py::arg("a"), py::arg("b"),
      "Length of the longest run of consecutive agreeing positions.");

  m.def(
      "r_contiguous_match",
      [](const std::string& a, const std::string& b, int r) {
        return aistk::r_contiguous_match(aistk::parse_bitstring(a), aistk::parse_bitstring(b),
                                         r);
      },
      py::arg("a"), py::arg("b"), py::arg("r"),
      "Whether two bit strings agree on at least r consecutive positions.");

  m.def(
      "pearson",
      [](const std::map<std::string, int>& u, const std::map<std::string, int>& v,
         int overlap_penalty_threshold) {
        aistk::PearsonConfig cfg;
        cfg.overlap_penalty_threshold = overlap_penalty_threshold;
        return aistk::pearson(profile_from_votes("u", u), profile_from_votes("v", v), cfg);
      },
      py::arg("u"), py::arg("v"), py::arg("overlap_penalty_threshold") = 1,
      "Penalized Pearson correlation between two item->vote dicts.");

  m.def(
      "mutate_bits",
      [](const std::string& bits, double rate, std::uint64_t seed) {
        aistk::Rng rng(seed);
        return aistk::render(aistk::mutate(aistk::parse_bitstring(bits), rate, rng));
      },
      py::arg("bits"), py::arg("rate"), py::arg("seed"),
      "One seeded mutation pass: each bit flips independently with the given rate.");

  m.def(
      "evolve_to_target",
      [](const std::string& target, int pop_size, int max_generations, std::uint64_t seed,
         int max_clones, double rate_max, double rate_min, bool inverse) {
        aistk::CloneConfig cfg;
        cfg.max_clones = max_clones;
        cfg.rate_max = rate_max;
        cfg.rate_min = rate_min;
        cfg.inverse = inverse;
        cfg.rng_seed = seed;
        const aistk::EvolutionResult result =
            aistk::evolve_to_target(aistk::parse_bitstring(target), pop_size, max_generations,
                                    cfg);
        py::list trace;
        for (const aistk::GenerationStats& row : result.trace) {
          trace.append(py::make_tuple(row.generation, row.best_affinity, row.mean_affinity));
        }
        py::dict out;
        out["best"] = aistk::render(result.best);
        out["reached_target"] = result.reached_target;
        out["generations_run"] = result.generations_run;
        out["trace"] = std::move(trace);
        return out;
      },
      py::arg("target"), py::arg("pop_size") = 20, py::arg("max_generations") = 50,
      py::arg("seed") = 0, py::arg("max_clones") = 5, py::arg("rate_max") = 0.3,
      py::arg("rate_min") = 0.0, py::arg("inverse") = true,
      "Evolve a random population toward a target bit string; returns the best string, "
      "whether it was reached, and the per-generation affinity trace.");

  m.def(
      "generate_detectors",
      [](const std::vector<std::string>& self_patterns, int target_count, int max_attempts,
         const std::string& matcher, int r, std::uint64_t seed, bool mutate_on_censor) {
        std::vector<aistk::Pattern> records;
        records.reserve(self_patterns.size());
        for (const std::string& text : self_patterns) {
          records.push_back(pattern_from_text(text));
        }
        aistk::GenerationConfig cfg;
        cfg.target_count = target_count;
        cfg.max_attempts = max_attempts;
        cfg.matcher = matcher_from_name(matcher, r);
        cfg.rng_seed = seed;
        cfg.mutate_instead_of_discard = mutate_on_censor;
        const aistk::GenerationReport report =
            aistk::generate_detectors(aistk::SelfSet(std::move(records)), cfg);
        py::list detectors;
        for (const aistk::Detector& d : report.detectors) {
          detectors.append(detector_to_dict(d));
        }
        py::dict out;
        out["detectors"] = std::move(detectors);
        out["attempts"] = report.attempts;
        out["censored"] = report.censored;
        out["rescued"] = report.rescued;
        return out;
      },
      py::arg("self_patterns"), py::arg("target_count") = 10, py::arg("max_attempts") = 1000,
      py::arg("matcher") = "exact", py::arg("r") = 2, py::arg("seed") = 0,
      py::arg("mutate_on_censor") = false,
      "Draw random candidates and keep those matching no self pattern.");

  m.def(
      "censor",
      [](const std::string& candidate, const std::vector<std::string>& self_patterns,
         const std::string& matcher, int r) {
        std::vector<aistk::Pattern> records;
        records.reserve(self_patterns.size());
        for (const std::string& text : self_patterns) {
          records.push_back(pattern_from_text(text));
        }
        return aistk::censor(pattern_from_text(candidate), aistk::SelfSet(std::move(records)),
                             matcher_from_name(matcher, r));
      },
      py::arg("candidate"), py::arg("self_patterns"), py::arg("matcher") = "exact",
      py::arg("r") = 2, "True iff the candidate matches no self pattern (it survives).");

  m.def(
      "monitor",
      [](const std::vector<std::string>& detector_patterns,
         const std::vector<std::string>& stream, const std::string& matcher, int r,
         int activation_threshold, std::optional<int> lifetime) {
        std::vector<aistk::Detector> detectors;
        detectors.reserve(detector_patterns.size());
        for (const std::string& text : detector_patterns) {
          detectors.push_back(aistk::Detector{.pattern = pattern_from_text(text),
                                              .state = aistk::DetectorState::mature,
                                              .activation_threshold = activation_threshold,
                                              .lifetime = lifetime,
                                              .match_count = 0,
                                              .age = 0,
                                              .activations = 0});
        }
        std::vector<aistk::Pattern> records;
        records.reserve(stream.size());
        for (const std::string& text : stream) {
          records.push_back(pattern_from_text(text));
        }
        const aistk::MonitorReport report =
            aistk::monitor(std::move(detectors), records, matcher_from_name(matcher, r));
        py::list alerts;
        for (const aistk::Alert& alert : report.alerts) {
          alerts.append(py::make_tuple(alert.record_index, alert.detector_id));
        }
        py::dict out;
        out["alerts"] = std::move(alerts);
        out["retired"] = report.retired;
        return out;
      },
      py::arg("detector_patterns"), py::arg("stream"), py::arg("matcher") = "exact",
      py::arg("r") = 2, py::arg("activation_threshold") = 1,
      py::arg("lifetime") = py::none(),
      "Run mature detectors over an ordered record stream; returns alerts as "
      "(record_index, detector_id) pairs plus retired detector ids.");

  m.def(
      "run_recommender",
      [](const std::map<std::string, std::map<std::string, int>>& ratings,
         const std::string& user, int pool_size, int top_n, bool idiotypic,
         std::uint64_t /*seed*/, int overlap_penalty_threshold) {
        auto it = ratings.find(user);
        if (it == ratings.end()) {
          throw aistk::NoDataError("unknown user '" + user + "'");
        }
        const aistk::UserProfile antigen = profile_from_votes(user, it->second);
        std::vector<aistk::UserProfile> candidates;
        for (const auto& [user_id, votes] : ratings) {
          if (user_id != user) {
            candidates.push_back(profile_from_votes(user_id, votes));
          }
        }
        aistk::DynamicsConfig dynamics;
        dynamics.pool_size = pool_size;
        dynamics.idiotypic_enabled = idiotypic;
        if (idiotypic) {
          dynamics.k2 = 0.05;
        }
        aistk::PearsonConfig pearson_cfg;
        pearson_cfg.overlap_penalty_threshold = overlap_penalty_threshold;
        const aistk::RecommenderRun run =
            aistk::run_recommender(antigen, candidates, dynamics, pearson_cfg);
        py::list neighborhood;
        for (const aistk::Antibody& ab : run.state.antibodies()) {
          py::dict entry;
          entry["user_id"] = ab.profile.user_id();
          entry["concentration"] = ab.concentration;
          entry["correlation"] = ab.correlation;
          neighborhood.append(std::move(entry));
        }
        py::list recommendations;
        if (!run.no_neighborhood) {
          for (const aistk::Recommendation& rec : aistk::recommend(run.state, top_n)) {
            recommendations.append(py::make_tuple(rec.item_id, rec.predicted_score));
          }
        }
        py::dict out;
        out["neighborhood"] = std::move(neighborhood);
        out["recommendations"] = std::move(recommendations);
        out["iterations"] = run.state.iteration();
        out["no_neighborhood"] = run.no_neighborhood;
        return out;
      },
      py::arg("ratings"), py::arg("user"), py::arg("pool_size") = 20, py::arg("top_n") = 10,
      py::arg("idiotypic") = false, py::arg("seed") = 0,
      py::arg("overlap_penalty_threshold") = 1,
      "Stabilize a neighbourhood for one user of a {user: {item: vote}} table and "
      "return it with scored recommendations. Candidates are admitted in sorted "
      "user-id order.");

  m.def(
      "synth_ratings",
      [](int users, int items, double density, std::uint64_t seed, int groups) {
        const aistk::RatingsTable table = aistk::synth_ratings(users, items, density, seed,
                                                               groups);
        std::map<std::string, std::map<std::string, int>> out;
        for (const std::string& user_id : table.user_ids()) {
          out[user_id] = table.user(user_id).votes();
        }
        return out;
      },
      py::arg("users"), py::arg("items"), py::arg("density") = 1.0, py::arg("seed") = 0,
      py::arg("groups") = 2,
      "Seeded block-structured ratings fixture as a {user: {item: vote}} dict.");
}
