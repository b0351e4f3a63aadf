#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "aistk/clonal_selection.hpp"
#include "aistk/encoding.hpp"
#include "aistk/errors.hpp"
#include "aistk/rng.hpp"

using namespace aistk;

TEST_CASE("clone counts scale with affinity and round to nearest") {
  CloneConfig cfg;
  cfg.max_clones = 5;
  CHECK(clone_count(1.0, cfg) == 5);
  CHECK(clone_count(0.0, cfg) == 0);
  CHECK(clone_count(0.5, cfg) == 3);
  int previous = 0;
  for (double a = 0.0; a <= 1.0; a += 0.05) {
    const int count = clone_count(a, cfg);
    CHECK(count >= previous);
    previous = count;
  }
  CHECK_THROWS_AS(clone_count(1.5, cfg), ParameterError);
  CHECK_THROWS_AS(clone_count(-0.1, cfg), ParameterError);
}

TEST_CASE("mutation rate interpolates between the extremes") {
  CloneConfig cfg;
  cfg.rate_min = 0.0;
  cfg.rate_max = 0.2;
  cfg.inverse = true;
  CHECK(mutation_rate(1.0, cfg) == doctest::Approx(cfg.rate_min));
  CHECK(mutation_rate(0.0, cfg) == doctest::Approx(cfg.rate_max));
  CHECK(mutation_rate(0.5, cfg) == doctest::Approx(0.1));

  SUBCASE("strictly decreasing in affinity when the range is open") {
    double previous = 1.0;
    for (double a = 0.0; a <= 1.0; a += 0.1) {
      const double rate = mutation_rate(a, cfg);
      CHECK(rate < previous);
      previous = rate;
    }
  }
  SUBCASE("the reflected schedule rises instead") {
    cfg.inverse = false;
    CHECK(mutation_rate(0.0, cfg) == doctest::Approx(0.0));
    CHECK(mutation_rate(1.0, cfg) == doctest::Approx(0.2));
  }
  SUBCASE("equal bounds give an affinity-independent rate") {
    cfg.rate_min = cfg.rate_max = 0.15;
    CHECK(mutation_rate(0.0, cfg) == doctest::Approx(0.15));
    CHECK(mutation_rate(1.0, cfg) == doctest::Approx(0.15));
  }
}

TEST_CASE("configuration validation") {
  CloneConfig cfg;
  cfg.max_clones = 0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = CloneConfig{};
  cfg.rate_min = 0.4;
  cfg.rate_max = 0.3;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = CloneConfig{};
  cfg.rate_max = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = CloneConfig{};
  cfg.rate_min = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = CloneConfig{};
  cfg.real_domain = ValueDomain{.lo = 1.0, .hi = 1.0};
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("mutation at rate zero is the identity for every representation") {
  Rng rng(5);
  const BitString bits = parse_bitstring("1100101");
  CHECK(mutate(bits, 0.0, rng) == bits);
  const RealVector reals({0.2, 0.8, 0.5});
  CHECK(mutate(reals, 0.0, rng, ValueDomain{}) == reals);
  const PacketSignature packet = parse_packet("tcp,1.2.3.4,80,5.6.7.8,25");
  CHECK(mutate(packet, 0.0, rng) == packet);
}

TEST_CASE("mutation at rate one complements a bit string") {
  Rng rng(5);
  CHECK(render(mutate(parse_bitstring("10010"), 1.0, rng)) == "01101");
}

TEST_CASE("flip fraction at rate one half stays near one half") {
  Rng rng(42);
  const BitString zeros = BitString::zeros(100);
  const BitString mutated = mutate(zeros, 0.5, rng);
  int flips = 0;
  for (std::size_t i = 0; i < mutated.size(); ++i) {
    flips += mutated.bit(i);
  }
  CHECK(flips >= 35);
  CHECK(flips <= 65);
}

TEST_CASE("mean flip count matches the rate within three standard errors") {
  const int trials = 10000;
  const int length = 50;
  const double rate = 0.3;
  long total_flips = 0;
  const BitString zeros = BitString::zeros(std::size_t(length));
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(99, "flip-trial", std::uint64_t(t)));
    const BitString mutated = mutate(zeros, rate, rng);
    for (std::size_t i = 0; i < mutated.size(); ++i) {
      total_flips += mutated.bit(i);
    }
  }
  const double mean = double(total_flips) / trials;
  const double expected = rate * length;
  const double se = std::sqrt(rate * (1.0 - rate) * length / trials);
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("real mutation stays inside the declared domain with bounded offsets") {
  const ValueDomain domain{.lo = -2.0, .hi = 2.0};
  const RealVector v({-2.0, 0.0, 2.0, 1.5});
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const RealVector mutated = mutate(v, 1.0, rng, domain);
    for (std::size_t i = 0; i < mutated.size(); ++i) {
      CHECK(mutated.value(i) >= domain.lo);
      CHECK(mutated.value(i) <= domain.hi);
      CHECK(std::abs(mutated.value(i) - v.value(i)) <= 0.1 * (domain.hi - domain.lo) + 1e-12);
    }
  }
}

TEST_CASE("packet mutation keeps producing valid signatures") {
  PacketSignature p = parse_packet("tcp,1.2.3.4,80,5.6.7.8,25");
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    p = mutate(p, 0.7, rng);
    CHECK_NOTHROW(parse_packet(render(p)));
  }
}

TEST_CASE("cloning produces the counted number of mutated copies") {
  CloneConfig cfg;
  cfg.max_clones = 10;
  cfg.rng_seed = 7;
  const Pattern parent = parse_bitstring("10101010101010101010");

  SUBCASE("zero affinity clones nothing") {
    CHECK(clone_and_mutate(parent, 0.0, cfg).empty());
  }
  SUBCASE("perfect affinity with a zero floor copies exactly") {
    cfg.rate_min = 0.0;
    cfg.inverse = true;
    const std::vector<Pattern> clones = clone_and_mutate(parent, 1.0, cfg);
    CHECK(clones.size() == 10);
    for (const Pattern& clone : clones) {
      CHECK(std::get<BitString>(clone) == std::get<BitString>(parent));
    }
  }
  SUBCASE("clone count always matches the stated formula") {
    for (double a : {0.1, 0.3, 0.6, 0.9}) {
      CHECK(clone_and_mutate(parent, a, cfg).size() == std::size_t(clone_count(a, cfg)));
    }
  }
}

TEST_CASE("per-clone streams replay independently") {
  CloneConfig cfg;
  cfg.max_clones = 10;
  cfg.rate_max = 0.3;
  cfg.rate_min = 0.0;
  cfg.inverse = true;
  cfg.rng_seed = 7;
  const BitString parent = parse_bitstring("10101010101010101010");
  const std::vector<Pattern> clones = clone_and_mutate(Pattern(parent), 0.6, cfg);
  REQUIRE(clones.size() == 6);

  const double rate = mutation_rate(0.6, cfg);
  for (std::size_t i = 0; i < clones.size(); ++i) {
    // Replay clone i's stream directly: one Bernoulli decision per bit.
    Rng replay(derive_seed(cfg.rng_seed, "clone", std::uint64_t(i)));
    const BitString& clone = std::get<BitString>(clones[i]);
    for (std::size_t bit = 0; bit < parent.size(); ++bit) {
      const bool flipped = replay.uniform_real() < rate;
      CHECK(clone.bit(bit) == (flipped ? parent.bit(bit) ^ 1u : parent.bit(bit)));
    }
  }
}

TEST_CASE("cloning is deterministic per seed") {
  CloneConfig cfg;
  cfg.rng_seed = 31;
  const Pattern parent = parse_bitstring("111000111000");
  const std::vector<Pattern> first = clone_and_mutate(parent, 0.8, cfg);
  const std::vector<Pattern> second = clone_and_mutate(parent, 0.8, cfg);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(std::get<BitString>(first[i]) == std::get<BitString>(second[i]));
  }
}

TEST_CASE("target evolution improves monotonically and replays per seed") {
  const BitString target = parse_bitstring("1010110010110101");
  CloneConfig cfg;
  cfg.rng_seed = 3;
  const EvolutionResult run = evolve_to_target(target, 20, 200, cfg);
  REQUIRE(!run.trace.empty());
  double best = 0.0;
  for (const GenerationStats& row : run.trace) {
    CHECK(row.best_affinity >= best - 1e-12);
    best = row.best_affinity;
    CHECK(row.mean_affinity <= row.best_affinity + 1e-12);
  }
  CHECK(run.reached_target);
  CHECK(run.best == target);

  const EvolutionResult replay = evolve_to_target(target, 20, 200, cfg);
  REQUIRE(replay.trace.size() == run.trace.size());
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    CHECK(replay.trace[i].best_affinity == run.trace[i].best_affinity);
    CHECK(replay.trace[i].mean_affinity == run.trace[i].mean_affinity);
  }
}

TEST_CASE("a zero mutation range cannot improve on the initial best") {
  const BitString target = parse_bitstring("1111000011110000");
  CloneConfig cfg;
  cfg.rate_min = 0.0;
  cfg.rate_max = 0.0;
  cfg.rng_seed = 12;
  const EvolutionResult run = evolve_to_target(target, 10, 30, cfg);
  REQUIRE(run.trace.size() >= 2);
  for (std::size_t i = 1; i < run.trace.size(); ++i) {
    CHECK(run.trace[i].best_affinity == run.trace[0].best_affinity);
    CHECK(run.trace[i].mean_affinity >= run.trace[i - 1].mean_affinity);
  }
  // Unmutated clones only duplicate the fittest members, so the population
  // settles into copies of them and the trace flatlines at the initial best.
  const GenerationStats& last = run.trace.back();
  CHECK(last.mean_affinity == run.trace[run.trace.size() - 2].mean_affinity);
  CHECK(last.mean_affinity == last.best_affinity);
}
