#pragma once

#include <cstdint>
#include <vector>

#include "aistk/encoding.hpp"
#include "aistk/rng.hpp"

namespace aistk {

// Range of legal values for components of real-valued patterns, used when
// mutation nudges a component so the result can be clamped back in bounds.
struct ValueDomain {
  double lo = 0.0;
  double hi = 1.0;
};

struct CloneConfig {
  // Clones produced at affinity 1; lower affinities produce proportionally
  // fewer (rounded to nearest, so even weak responders replicate a little).
  int max_clones = 5;

  // Per-position mutation probability range. With inverse = true the rate
  // falls linearly from rate_max at affinity 0 to rate_min at affinity 1,
  // so the best matches are perturbed the least; inverse = false reverses
  // the slope. rate_min == rate_max gives an affinity-independent rate.
  double rate_max = 0.3;
  double rate_min = 0.0;
  bool inverse = true;

  std::uint64_t rng_seed = 0;

  ValueDomain real_domain;

  void validate() const;
};

// Number of clones a cell with the given affinity (in [0, 1]) produces.
int clone_count(double affinity, const CloneConfig& cfg);

// Per-position mutation probability for the given affinity (in [0, 1]).
double mutation_rate(double affinity, const CloneConfig& cfg);

// One mutation pass over a pattern: each position is independently rewritten
// with probability `rate`. Bits flip; real components receive a uniform
// offset of up to a tenth of the domain width and are clamped; packet fields
// are resampled (possibly to a wildcard). Consumes randomness even for
// positions left unchanged, so equal-seed runs stay aligned.
BitString mutate(const BitString& p, double rate, Rng& rng);
RealVector mutate(const RealVector& p, double rate, Rng& rng, const ValueDomain& domain);
PacketSignature mutate(const PacketSignature& p, double rate, Rng& rng);
Pattern mutate(const Pattern& p, double rate, Rng& rng, const ValueDomain& domain);

// Full clonal response of one cell: clone_count(affinity) copies, each
// mutated once at mutation_rate(affinity) under its own derived stream, so
// the i-th clone is reproducible regardless of how many siblings exist.
std::vector<Pattern> clone_and_mutate(const Pattern& parent, double affinity,
                                      const CloneConfig& cfg);

struct GenerationStats {
  int generation = 0;
  double best_affinity = 0.0;
  double mean_affinity = 0.0;
};

struct EvolutionResult {
  std::vector<GenerationStats> trace;
  BitString best;
  bool reached_target = false;
  int generations_run = 0;
};

// Demonstration loop: evolve a random population of bit strings toward a
// fixed target, scoring by fraction of agreeing bits. Each generation every
// member is cloned and mutated, then parents and clones compete for the
// pop_size survivor slots (ties keep parents, so the best affinity never
// regresses). Stops at an exact match or after max_generations.
EvolutionResult evolve_to_target(const BitString& target, int pop_size, int max_generations,
                                 const CloneConfig& cfg);

}  // namespace aistk
