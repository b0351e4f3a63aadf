#include "aistk/clonal_selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "aistk/affinity.hpp"
#include "aistk/errors.hpp"

namespace aistk {

void CloneConfig::validate() const {
  if (max_clones < 1) {
    throw ParameterError("max_clones must be >= 1");
  }
  if (rate_min < 0.0 || rate_max > 1.0 || rate_min > rate_max) {
    throw ParameterError("mutation rates must satisfy 0 <= rate_min <= rate_max <= 1");
  }
  if (!(real_domain.lo < real_domain.hi)) {
    throw ParameterError("real value domain must have lo < hi");
  }
}

namespace {

void require_unit_interval(double affinity) {
  if (!(affinity >= 0.0 && affinity <= 1.0)) {
    throw ParameterError("affinity " + std::to_string(affinity) + " outside [0, 1]");
  }
}

}  // namespace

int clone_count(double affinity, const CloneConfig& cfg) {
  cfg.validate();
  require_unit_interval(affinity);
  return int(std::floor(affinity * cfg.max_clones + 0.5));
}

double mutation_rate(double affinity, const CloneConfig& cfg) {
  cfg.validate();
  require_unit_interval(affinity);
  const double span = cfg.rate_max - cfg.rate_min;
  return cfg.inverse ? cfg.rate_min + (1.0 - affinity) * span
                     : cfg.rate_min + affinity * span;
}

BitString mutate(const BitString& p, double rate, Rng& rng) {
  std::vector<std::uint8_t> bits = p.bits();
  for (auto& bit : bits) {
    if (rng.bernoulli(rate)) {
      bit ^= 1u;
    }
  }
  return BitString(std::move(bits));
}

RealVector mutate(const RealVector& p, double rate, Rng& rng, const ValueDomain& domain) {
  std::vector<double> values = p.values();
  const double spread = 0.1 * (domain.hi - domain.lo);
  for (auto& value : values) {
    const bool hit = rng.bernoulli(rate);
    const double offset = (2.0 * rng.uniform_real() - 1.0) * spread;
    if (hit) {
      value = std::clamp(value + offset, domain.lo, domain.hi);
    }
  }
  return RealVector(std::move(values));
}

PacketSignature mutate(const PacketSignature& p, double rate, Rng& rng) {
  PacketSignature out = p;

  auto resample_ip = [&]() -> std::optional<Ipv4> {
    if (rng.bernoulli(0.5)) return std::nullopt;
    return Ipv4{static_cast<std::uint32_t>(rng.uniform_u32())};
  };
  auto resample_port = [&]() -> std::optional<std::uint16_t> {
    if (rng.bernoulli(0.5)) return std::nullopt;
    return static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
  };

  // Fields are visited in declaration order, one decision each, then one
  // draw each, so a skipped field consumes as much randomness as a hit one.
  {
    const bool hit = rng.bernoulli(rate);
    const int pick = rng.uniform_int(0, 3);
    if (hit) out.protocol = static_cast<Protocol>(pick);
  }
  {
    const bool hit = rng.bernoulli(rate);
    const auto fresh = resample_ip();
    if (hit) out.src_ip = fresh;
  }
  {
    const bool hit = rng.bernoulli(rate);
    const auto fresh = resample_port();
    if (hit) out.src_port = fresh;
  }
  {
    const bool hit = rng.bernoulli(rate);
    const auto fresh = resample_ip();
    if (hit) out.dst_ip = fresh;
  }
  {
    const bool hit = rng.bernoulli(rate);
    const auto fresh = resample_port();
    if (hit) out.dst_port = fresh;
  }
  return out;
}

Pattern mutate(const Pattern& p, double rate, Rng& rng, const ValueDomain& domain) {
  return std::visit([&](const auto& v) -> Pattern {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, RealVector>) {
      return mutate(v, rate, rng, domain);
    } else {
      return mutate(v, rate, rng);
    }
  }, p);
}

std::vector<Pattern> clone_and_mutate(const Pattern& parent, double affinity,
                                      const CloneConfig& cfg) {
  cfg.validate();
  const int count = clone_count(affinity, cfg);
  const double rate = mutation_rate(affinity, cfg);
  std::vector<Pattern> clones;
  clones.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(cfg.rng_seed, "clone", std::uint64_t(i)));
    clones.push_back(mutate(parent, rate, rng, cfg.real_domain));
  }
  return clones;
}

namespace {

double bit_affinity(const BitString& candidate, const BitString& target) {
  return double(hamming_similarity(candidate, target)) / double(target.size());
}

}  // namespace

EvolutionResult evolve_to_target(const BitString& target, int pop_size, int max_generations,
                                 const CloneConfig& cfg) {
  cfg.validate();
  if (pop_size < 1) {
    throw ParameterError("pop_size must be >= 1");
  }
  if (max_generations < 1) {
    throw ParameterError("max_generations must be >= 1");
  }

  Rng init_rng(derive_seed(cfg.rng_seed, "population"));
  std::vector<BitString> population;
  population.reserve(std::size_t(pop_size));
  for (int i = 0; i < pop_size; ++i) {
    std::vector<std::uint8_t> bits(target.size());
    for (auto& bit : bits) {
      bit = static_cast<std::uint8_t>(init_rng.uniform_int(0, 1));
    }
    population.emplace_back(std::move(bits));
  }

  EvolutionResult result{.trace = {}, .best = population.front(), .reached_target = false,
                         .generations_run = 0};

  for (int gen = 1; gen <= max_generations; ++gen) {
    // Parents compete alongside their clones for the survivor slots, so the
    // best affinity seen so far can never regress between generations.
    std::vector<std::pair<BitString, double>> pool;
    for (const BitString& member : population) {
      pool.emplace_back(member, bit_affinity(member, target));
    }
    const std::size_t parent_count = pool.size();
    for (std::size_t idx = 0; idx < parent_count; ++idx) {
      CloneConfig per_member = cfg;
      per_member.rng_seed =
          derive_seed(derive_seed(cfg.rng_seed, "generation", std::uint64_t(gen)),
                      "member", std::uint64_t(idx));
      for (Pattern& clone :
           clone_and_mutate(Pattern(pool[idx].first), pool[idx].second, per_member)) {
        BitString bits = std::get<BitString>(std::move(clone));
        const double score = bit_affinity(bits, target);
        pool.emplace_back(std::move(bits), score);
      }
    }

    std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    population.clear();
    for (std::size_t i = 0; i < std::size_t(pop_size) && i < pool.size(); ++i) {
      population.push_back(pool[i].first);
    }

    double sum = 0.0;
    for (const BitString& member : population) {
      sum += bit_affinity(member, target);
    }
    const double best = bit_affinity(population.front(), target);
    result.trace.push_back(GenerationStats{.generation = gen, .best_affinity = best,
                                           .mean_affinity = sum / double(population.size())});
    result.best = population.front();
    result.generations_run = gen;
    if (best == 1.0) {
      result.reached_target = true;
      break;
    }
  }
  return result;
}

}  // namespace aistk
