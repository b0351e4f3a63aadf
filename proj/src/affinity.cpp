#include "aistk/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aistk/errors.hpp"

namespace aistk {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

int hamming_similarity(const BitString& a, const BitString& b) {
  require_same_length(a.size(), b.size());
  int agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.bit(i) == b.bit(i)) ++agree;
  }
  return agree;
}

int longest_contiguous_match(const BitString& a, const BitString& b) {
  require_same_length(a.size(), b.size());
  int best = 0;
  int run = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.bit(i) == b.bit(i)) {
      ++run;
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best;
}

bool r_contiguous_match(const BitString& a, const BitString& b, int r) {
  require_same_length(a.size(), b.size());
  if (r < 1 || std::size_t(r) > a.size()) {
    throw ParameterError("r = " + std::to_string(r) + " outside [1, " + std::to_string(a.size()) +
                         "]");
  }
  return longest_contiguous_match(a, b) >= r;
}

double euclidean_distance(const RealVector& a, const RealVector& b) {
  require_same_length(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.value(i) - b.value(i);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double pearson(const UserProfile& u, const UserProfile& v, const PearsonConfig& cfg) {
  if (cfg.overlap_penalty_threshold < 1) {
    throw ParameterError("overlap_penalty_threshold must be >= 1");
  }

  const double mean_u = u.mean_vote();
  const double mean_v = v.mean_vote();

  int overlap = 0;
  double cross = 0.0;
  double var_u = 0.0;
  double var_v = 0.0;
  for (const auto& [item, score_u] : u.votes()) {
    auto it = v.votes().find(item);
    if (it == v.votes().end()) continue;
    ++overlap;
    const double du = score_u - mean_u;
    const double dv = it->second - mean_v;
    cross += du * dv;
    var_u += du * du;
    var_v += dv * dv;
  }

  if (overlap == 0) {
    return PearsonConfig::zero_overlap_default;
  }
  if (var_u == 0.0 || var_v == 0.0) {
    return PearsonConfig::zero_overlap_default;
  }

  double r = cross / (std::sqrt(var_u) * std::sqrt(var_v));
  const double penalty =
      std::min(1.0, double(overlap) / double(cfg.overlap_penalty_threshold));
  r *= penalty;
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace aistk
