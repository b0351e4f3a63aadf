#pragma once

#include <cstddef>

#include "aistk/encoding.hpp"

namespace aistk {

// Matching functions. Each takes two patterns of the same shape and returns
// either a similarity score (higher = closer) or a distance (lower = closer).

// Number of positions at which the two bit strings agree. Lengths must match
// (DimensionError otherwise).
int hamming_similarity(const BitString& a, const BitString& b);

// Length of the longest run of consecutive agreeing positions.
int longest_contiguous_match(const BitString& a, const BitString& b);

// True iff the strings agree on at least r consecutive positions. r must be
// >= 1 and <= the common length (ParameterError otherwise).
bool r_contiguous_match(const BitString& a, const BitString& b, int r);

// Euclidean distance between equal-length vectors (DimensionError otherwise).
double euclidean_distance(const RealVector& a, const RealVector& b);

struct PearsonConfig {
  // Overlaps at or above this size carry no penalty; smaller overlaps are
  // scaled by n / threshold. Must be >= 1.
  int overlap_penalty_threshold = 1;

  // Correlation reported when the two users have no items in common.
  static constexpr double zero_overlap_default = 0.0;
};

// Pearson correlation between two users' votes. Each user's mean is taken
// over all of their own votes; the cross sums run over the items both voted
// on. Degenerate cases (no overlap, or zero variance on either side of the
// overlap) yield zero_overlap_default. The result is scaled by the small-
// overlap penalty and clamped to [-1, 1].
double pearson(const UserProfile& u, const UserProfile& v, const PearsonConfig& cfg = {});

}  // namespace aistk
