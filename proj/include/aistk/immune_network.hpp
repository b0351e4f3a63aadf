#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aistk/affinity.hpp"
#include "aistk/encoding.hpp"

namespace aistk {

// Concentration dynamics over a pool of candidate neighbours (antibodies)
// stimulated by one target user (the antigen), with optional pairwise
// suppression, driving a weighted-average recommender.

struct DynamicsConfig {
  double k1 = 0.25;  // stimulation rate in the suppressive equation
  double k2 = 0.25;  // stimulation rate in the plain equation; suppression
                     // rate in the suppressive one
  double k3 = 0.05;  // death rate
  double c = 1.0;    // reserved rate constant for multi-antigen dynamics;
                     // unused by both step forms
  double dt = 1.0;   // Euler step width

  double decay_amount = 0.05;  // flat per-iteration concentration reduction
  double initial_concentration = 1.0;
  double removal_floor = 0.1;  // antibodies below this are dropped
  double saturation_cap = 10.0;
  int pool_size = 20;
  int stabilization_window = 10;  // iterations without a size change
  double antigen_concentration = 1.0;
  bool idiotypic_enabled = false;

  void validate() const;
};

struct Antibody {
  UserProfile profile;
  double concentration = 0.0;
  double correlation = 0.0;  // cached correlation to the antigen
};

struct RecommenderRun;

class NetworkState {
 public:
  explicit NetworkState(UserProfile antigen, PearsonConfig pearson_cfg = {});

  const UserProfile& antigen() const { return antigen_; }
  const PearsonConfig& pearson_config() const { return pearson_cfg_; }
  const std::vector<Antibody>& antibodies() const { return antibodies_; }
  std::size_t size() const { return antibodies_.size(); }

  // Cached pairwise correlation between antibodies i and j; 1 on the
  // diagonal (a profile correlates perfectly with itself).
  double pairwise(std::size_t i, std::size_t j) const;

  int iteration() const { return iteration_; }
  int stable_run() const { return stable_run_; }

  // Appends a candidate at the given concentration, filling the correlation
  // caches. The antigen's own user_id is rejected (ParameterError). Counts
  // as a size change, so stable_run resets.
  void admit(const UserProfile& candidate, double concentration);

 private:
  friend NetworkState apply_decay(const NetworkState&, double);
  friend NetworkState step_plain(const NetworkState&, const DynamicsConfig&);
  friend NetworkState step_idiotypic(const NetworkState&, const DynamicsConfig&);
  friend RecommenderRun run_recommender(const UserProfile&, const std::vector<UserProfile>&,
                                        const DynamicsConfig&, const PearsonConfig&);

  void remove_below(double floor);
  void finish_iteration(bool size_changed);

  UserProfile antigen_;
  PearsonConfig pearson_cfg_;
  std::vector<Antibody> antibodies_;
  std::vector<std::vector<double>> pairwise_;
  int iteration_ = 0;
  int stable_run_ = 0;
};

// Subtracts `amount` from every concentration, clamping at zero. No removal
// or counter bookkeeping: this is the flat reduction applied before a step.
NetworkState apply_decay(const NetworkState& state, double amount);

// One Euler step of x_i += dt * (k2 * m_i * x_i * y - k3 * x_i), computed
// for all antibodies from the pre-step state, clamped to [0, saturation_cap].
// k2 is the stimulation rate here and k3 the death rate. Antibodies ending
// below removal_floor are dropped; a drop resets stable_run, otherwise it
// increments; iteration increments either way. Requires
// cfg.idiotypic_enabled == false.
NetworkState step_plain(const NetworkState& state, const DynamicsConfig& cfg);

// One Euler step of the suppressive form
//   x_i += dt * (k1 * m_i * x_i * y - (k2/n) * sum_j m_ij * x_i * x_j - k3 * x_i)
// with the self term j == i included (m_ii = 1) and the suppression sum
// normalized by the pool size n. Same clamping and bookkeeping as
// step_plain. Requires cfg.idiotypic_enabled == true and n >= 1.
NetworkState step_idiotypic(const NetworkState& state, const DynamicsConfig& cfg);

struct RecommenderRun {
  NetworkState state;
  int candidates_admitted = 0;
  bool no_neighborhood = false;  // every antibody decayed out
};

// Builds the neighbourhood: candidates are admitted in order until the pool
// is full, then the pool iterates (flat decay, then the configured step);
// each drop-out admits the next candidate. The run ends once the pool size
// has held steady for stabilization_window consecutive iterations. The
// candidate collection must be non-empty and exclude the antigen user.
RecommenderRun run_recommender(const UserProfile& antigen,
                               const std::vector<UserProfile>& candidates,
                               const DynamicsConfig& cfg, const PearsonConfig& pearson_cfg = {});

// Weighted-average score the neighbourhood predicts for one item:
//   p = antigen_mean + sum_v w_v * (vote_v - mean_v) / sum_v |w_v|
// over antibodies v that voted on the item, with w_v = concentration *
// correlation. A zero weight sum falls back to the antigen's mean. The
// result is clamped to [0, 5]. No voter at all → NoDataError.
double predict(const NetworkState& state, const std::string& item_id);

struct SupportingNeighbor {
  std::string user_id;
  double concentration = 0.0;
  double correlation = 0.0;
};

struct Recommendation {
  std::string item_id;
  double predicted_score = 0.0;
  std::vector<SupportingNeighbor> supporting_neighbors;
};

// Scores every item some antibody voted on that the antigen has not, and
// returns the best top_n, ordered by descending score with ties broken by
// ascending item_id. May return fewer than top_n.
std::vector<Recommendation> recommend(const NetworkState& state, int top_n);

// JSON object {antigen_id, antibodies: [{user_id, concentration,
// correlation}], iterations}.
std::string state_to_json(const NetworkState& state);

// CSV `rank,item_id,predicted_score` with scores at six decimal places.
std::string recommendations_to_csv(const std::vector<Recommendation>& recs);

}  // namespace aistk
