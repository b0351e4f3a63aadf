#include "aistk/immune_network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <utility>

#include <json.hpp>

#include "aistk/errors.hpp"

namespace aistk {

void DynamicsConfig::validate() const {
  if (k1 < 0.0 || k2 < 0.0 || k3 < 0.0 || c < 0.0) {
    throw ParameterError("rate constants must be nonnegative");
  }
  if (!(dt > 0.0)) {
    throw ParameterError("dt must be positive");
  }
  if (decay_amount < 0.0) {
    throw ParameterError("decay_amount must be nonnegative");
  }
  if (!(initial_concentration > 0.0) || !(removal_floor > 0.0) || !(saturation_cap > 0.0)) {
    throw ParameterError("concentrations must be positive");
  }
  if (!(removal_floor < initial_concentration) || !(initial_concentration <= saturation_cap)) {
    throw ParameterError("need removal_floor < initial_concentration <= saturation_cap");
  }
  if (pool_size < 1) {
    throw ParameterError("pool_size must be >= 1");
  }
  if (stabilization_window < 1) {
    throw ParameterError("stabilization_window must be >= 1");
  }
  if (!(antigen_concentration > 0.0)) {
    throw ParameterError("antigen_concentration must be positive");
  }
}

NetworkState::NetworkState(UserProfile antigen, PearsonConfig pearson_cfg)
    : antigen_(std::move(antigen)), pearson_cfg_(pearson_cfg) {}

double NetworkState::pairwise(std::size_t i, std::size_t j) const {
  if (i >= antibodies_.size() || j >= antibodies_.size()) {
    throw ParameterError("pairwise index out of range");
  }
  return pairwise_[i][j];
}

void NetworkState::admit(const UserProfile& candidate, double concentration) {
  if (candidate.user_id() == antigen_.user_id()) {
    throw ParameterError("candidate '" + candidate.user_id() + "' is the antigen user");
  }
  if (concentration < 0.0) {
    throw ParameterError("concentration must be nonnegative");
  }
  const double to_antigen = pearson(candidate, antigen_, pearson_cfg_);
  std::vector<double> row;
  row.reserve(antibodies_.size() + 1);
  for (std::size_t j = 0; j < antibodies_.size(); ++j) {
    const double r = pearson(candidate, antibodies_[j].profile, pearson_cfg_);
    row.push_back(r);
    pairwise_[j].push_back(r);
  }
  row.push_back(1.0);
  pairwise_.push_back(std::move(row));
  antibodies_.push_back(Antibody{.profile = candidate, .concentration = concentration,
                                 .correlation = to_antigen});
  stable_run_ = 0;
}

void NetworkState::remove_below(double floor) {
  bool removed = false;
  for (std::size_t i = antibodies_.size(); i-- > 0;) {
    if (antibodies_[i].concentration < floor) {
      antibodies_.erase(antibodies_.begin() + long(i));
      pairwise_.erase(pairwise_.begin() + long(i));
      for (auto& row : pairwise_) {
        row.erase(row.begin() + long(i));
      }
      removed = true;
    }
  }
  finish_iteration(removed);
}

void NetworkState::finish_iteration(bool size_changed) {
  ++iteration_;
  stable_run_ = size_changed ? 0 : stable_run_ + 1;
}

NetworkState apply_decay(const NetworkState& state, double amount) {
  if (amount < 0.0) {
    throw ParameterError("decay amount must be nonnegative");
  }
  NetworkState out = state;
  for (Antibody& ab : out.antibodies_) {
    ab.concentration = std::max(0.0, ab.concentration - amount);
  }
  return out;
}

NetworkState step_plain(const NetworkState& state, const DynamicsConfig& cfg) {
  cfg.validate();
  if (cfg.idiotypic_enabled) {
    throw ParameterError("step_plain requires idiotypic_enabled = false");
  }
  NetworkState out = state;
  const double y = cfg.antigen_concentration;
  for (std::size_t i = 0; i < state.antibodies_.size(); ++i) {
    const double x = state.antibodies_[i].concentration;
    const double m = state.antibodies_[i].correlation;
    const double next = x + cfg.dt * (cfg.k2 * m * x * y - cfg.k3 * x);
    out.antibodies_[i].concentration = std::clamp(next, 0.0, cfg.saturation_cap);
  }
  out.remove_below(cfg.removal_floor);
  return out;
}

NetworkState step_idiotypic(const NetworkState& state, const DynamicsConfig& cfg) {
  cfg.validate();
  if (!cfg.idiotypic_enabled) {
    throw ParameterError("step_idiotypic requires idiotypic_enabled = true");
  }
  const std::size_t n = state.antibodies_.size();
  if (n < 1) {
    throw ParameterError("step_idiotypic needs at least one antibody");
  }
  NetworkState out = state;
  const double y = cfg.antigen_concentration;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = state.antibodies_[i].concentration;
    const double m = state.antibodies_[i].correlation;
    double suppression = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      suppression += state.pairwise_[i][j] * x * state.antibodies_[j].concentration;
    }
    const double next =
        x + cfg.dt * (cfg.k1 * m * x * y - (cfg.k2 / double(n)) * suppression - cfg.k3 * x);
    out.antibodies_[i].concentration = std::clamp(next, 0.0, cfg.saturation_cap);
  }
  out.remove_below(cfg.removal_floor);
  return out;
}

RecommenderRun run_recommender(const UserProfile& antigen,
                               const std::vector<UserProfile>& candidates,
                               const DynamicsConfig& cfg, const PearsonConfig& pearson_cfg) {
  cfg.validate();
  if (candidates.empty()) {
    throw ParameterError("candidate collection must be non-empty");
  }

  RecommenderRun run{.state = NetworkState(antigen, pearson_cfg), .candidates_admitted = 0,
                     .no_neighborhood = false};
  std::size_t next = 0;

  auto refill = [&]() {
    while (run.state.size() < std::size_t(cfg.pool_size) && next < candidates.size()) {
      run.state.admit(candidates[next], cfg.initial_concentration);
      ++next;
      ++run.candidates_admitted;
    }
  };

  refill();
  while (run.state.stable_run() < cfg.stabilization_window) {
    if (run.state.size() == 0) {
      // Nothing left to stimulate; idle iterations still count toward the
      // stability window so the run settles on the empty pool.
      run.state.finish_iteration(false);
    } else {
      NetworkState decayed = apply_decay(run.state, cfg.decay_amount);
      run.state = cfg.idiotypic_enabled ? step_idiotypic(decayed, cfg)
                                        : step_plain(decayed, cfg);
    }
    refill();
  }

  run.no_neighborhood = run.state.size() == 0;
  return run;
}

double predict(const NetworkState& state, const std::string& item_id) {
  const double antigen_mean = state.antigen().mean_vote();
  double numerator = 0.0;
  double weight_sum = 0.0;
  int voters = 0;
  for (const Antibody& ab : state.antibodies()) {
    if (!ab.profile.has_vote(item_id)) continue;
    ++voters;
    const double w = ab.concentration * ab.correlation;
    numerator += w * (ab.profile.vote(item_id) - ab.profile.mean_vote());
    weight_sum += std::abs(w);
  }
  if (voters == 0) {
    throw NoDataError("no antibody voted on item '" + item_id + "'");
  }
  const double p = weight_sum == 0.0 ? antigen_mean : antigen_mean + numerator / weight_sum;
  return std::clamp(p, 0.0, 5.0);
}

std::vector<Recommendation> recommend(const NetworkState& state, int top_n) {
  if (top_n < 1) {
    throw ParameterError("top_n must be >= 1");
  }
  std::set<std::string> items;
  for (const Antibody& ab : state.antibodies()) {
    for (const auto& [item, vote] : ab.profile.votes()) {
      (void)vote;
      if (!state.antigen().has_vote(item)) {
        items.insert(item);
      }
    }
  }

  std::vector<Recommendation> recs;
  recs.reserve(items.size());
  for (const std::string& item : items) {
    Recommendation rec{.item_id = item, .predicted_score = predict(state, item),
                       .supporting_neighbors = {}};
    for (const Antibody& ab : state.antibodies()) {
      if (ab.profile.has_vote(item)) {
        rec.supporting_neighbors.push_back(SupportingNeighbor{
            .user_id = ab.profile.user_id(), .concentration = ab.concentration,
            .correlation = ab.correlation});
      }
    }
    recs.push_back(std::move(rec));
  }

  std::sort(recs.begin(), recs.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.predicted_score != b.predicted_score) return a.predicted_score > b.predicted_score;
    return a.item_id < b.item_id;
  });
  if (recs.size() > std::size_t(top_n)) {
    recs.resize(std::size_t(top_n));
  }
  return recs;
}

std::string state_to_json(const NetworkState& state) {
  nlohmann::json doc;
  doc["antigen_id"] = state.antigen().user_id();
  doc["antibodies"] = nlohmann::json::array();
  for (const Antibody& ab : state.antibodies()) {
    doc["antibodies"].push_back({{"user_id", ab.profile.user_id()},
                                 {"concentration", ab.concentration},
                                 {"correlation", ab.correlation}});
  }
  doc["iterations"] = state.iteration();
  return doc.dump(2) + "\n";
}

std::string recommendations_to_csv(const std::vector<Recommendation>& recs) {
  std::string out = "rank,item_id,predicted_score\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof score, "%.6f", recs[i].predicted_score);
    out += std::to_string(i + 1) + "," + recs[i].item_id + "," + score + "\n";
  }
  return out;
}

}  // namespace aistk
