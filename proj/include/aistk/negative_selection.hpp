#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aistk/clonal_selection.hpp"
#include "aistk/encoding.hpp"

namespace aistk {

// Detector generation by censoring against a trusted self set, stream
// monitoring with activation counting, and promotion of repeat performers to
// permanent memory detectors.

enum class MatcherKind {
  exact,         // bit strings; agreement at every position
  r_contiguous,  // bit strings; agreement on at least r consecutive positions
  packet_fields  // packets; every concrete detector field equals the record's
};

struct Matcher {
  MatcherKind kind = MatcherKind::exact;
  int r = 2;  // used by r_contiguous only

  void validate() const;

  // True iff the detector pattern matches the record under this rule. Both
  // sides must carry the representation the rule expects (DimensionError
  // otherwise); records must be wildcard-free.
  bool matches(const Pattern& detector, const Pattern& record) const;
};

enum class DetectorState { immature, mature, memory };

std::string render(DetectorState s);
DetectorState parse_detector_state(const std::string& text);

struct Detector {
  Pattern pattern;
  DetectorState state = DetectorState::immature;
  int activation_threshold = 1;
  // Records a mature detector may monitor before retiring; disengaged means
  // unbounded. Memory detectors are always unbounded with threshold 1.
  std::optional<int> lifetime = 1000;
  int match_count = 0;  // matches since the last activation reset
  int age = 0;          // monitoring steps survived
  int activations = 0;  // times the threshold was reached, ever

  void validate() const;
};

// Deduplicated, wildcard-free records of one representation (all bit strings
// of equal length, or all concrete packets). Must be non-empty.
class SelfSet {
 public:
  explicit SelfSet(std::vector<Pattern> records);

  const std::vector<Pattern>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  bool holds_bits() const;
  std::size_t bit_length() const;  // ParameterError when not bit strings

 private:
  std::vector<Pattern> records_;
};

struct GenerationConfig {
  int target_count = 10;
  int max_attempts = 1000;  // must be >= target_count
  Matcher matcher;
  std::uint64_t rng_seed = 0;

  // When set, a candidate censored for matching self is hypermutated away
  // from its nearest self record (up to max_mutation_retries times) before
  // being abandoned. The mutation rate follows `mutation` with affinity
  // measured against the closest self record, so candidates deep inside self
  // are perturbed hardest.
  bool mutate_instead_of_discard = false;
  int max_mutation_retries = 3;
  CloneConfig mutation{
      .max_clones = 1, .rate_max = 0.5, .rate_min = 0.05, .inverse = false};

  // Applied to every detector produced.
  int activation_threshold = 1;
  std::optional<int> lifetime = 1000;

  void validate() const;
};

struct GenerationReport {
  std::vector<Detector> detectors;  // all mature, none matching self
  int attempts = 0;                 // candidates drawn
  int censored = 0;                 // candidates that matched self
  int rescued = 0;                  // censored candidates saved by mutation
};

// True iff the candidate matches no self record (i.e. it survives censoring).
bool censor(const Pattern& candidate, const SelfSet& self, const Matcher& matcher);

// Draws random candidates in the self set's representation and keeps the
// censoring survivors, until target_count detectors exist or max_attempts
// candidates have been drawn. Deterministic per seed: candidate draws and
// rescue mutations consume two independent derived streams, so a longer run
// extends a shorter one's detector list without disturbing it. Yields fewer
// than target_count when attempts run out; zero survivors raise a
// CoverageError (self covers the whole candidate space).
GenerationReport generate_detectors(const SelfSet& self, const GenerationConfig& cfg);

struct Alert {
  int record_index = 0;
  int detector_id = 0;  // index into the monitored detector collection

  friend bool operator==(const Alert&, const Alert&) = default;
};

struct MonitorReport {
  std::vector<Alert> alerts;
  std::vector<int> retired;         // detector ids retired during the run
  std::vector<Detector> detectors;  // post-run states, input order preserved
};

// Runs every detector over the stream in order. Each record increments the
// match_count of every matching active detector; a detector reaching its
// activation_threshold raises an alert and resets its count. Every active
// detector ages by one per record, and a mature detector whose age exceeds
// its lifetime retires (memory detectors never do). Immature detectors are
// not allowed in (LifecycleError).
MonitorReport monitor(std::vector<Detector> detectors, const std::vector<Pattern>& stream,
                      const Matcher& matcher);

// Operator verdict on a detector that has activated at least once. Confirming
// returns a memory detector (unbounded lifetime, threshold 1); declining
// returns the detector with its match_count cleared. Memory detectors pass
// through unchanged; immature or never-activated detectors raise a
// LifecycleError.
Detector promote(const Detector& d, bool operator_confirms);

// JSON array of {pattern, state, activation_threshold, lifetime}; lifetime
// null means unbounded. Counters are runtime state and are not serialized.
std::string detectors_to_json(const std::vector<Detector>& detectors);
std::vector<Detector> detectors_from_json(const std::string& text);

// JSON object {alerts: [{record_index, detector_id}], retired: [detector_id]}.
std::string report_to_json(const MonitorReport& report);

}  // namespace aistk
