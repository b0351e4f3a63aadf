#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "aistk/affinity.hpp"
#include "aistk/encoding.hpp"
#include "aistk/errors.hpp"
#include "aistk/negative_selection.hpp"
#include "oracles.hpp"

using namespace aistk;

namespace {

std::vector<Pattern> all_bitstrings(std::size_t length) {
  std::vector<Pattern> out;
  for (unsigned value = 0; value < (1u << length); ++value) {
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
      bits[i] = (value >> (length - 1 - i)) & 1u;
    }
    out.emplace_back(BitString(std::move(bits)));
  }
  return out;
}

Detector mature_bits(const std::string& pattern, int threshold, std::optional<int> lifetime) {
  return Detector{.pattern = parse_bitstring(pattern),
                  .state = DetectorState::mature,
                  .activation_threshold = threshold,
                  .lifetime = lifetime,
                  .match_count = 0,
                  .age = 0,
                  .activations = 0};
}

}  // namespace

TEST_CASE("matcher rules agree with the underlying affinity measures") {
  const Matcher exact{.kind = MatcherKind::exact};
  CHECK(exact.matches(parse_bitstring("10110"), parse_bitstring("10110")));
  CHECK(!exact.matches(parse_bitstring("10110"), parse_bitstring("10111")));

  const Matcher contiguous{.kind = MatcherKind::r_contiguous, .r = 3};
  CHECK(contiguous.matches(parse_bitstring("11100"), parse_bitstring("11111")));
  CHECK(!contiguous.matches(parse_bitstring("10101"), parse_bitstring("01010")));

  const Matcher packets{.kind = MatcherKind::packet_fields};
  CHECK(packets.matches(parse_packet("tcp,*,*,10.0.0.1,25"),
                        parse_packet("tcp,1.2.3.4,999,10.0.0.1,25")));
  CHECK(!packets.matches(parse_packet("udp,*,*,10.0.0.1,25"),
                         parse_packet("tcp,1.2.3.4,999,10.0.0.1,25")));

  SUBCASE("representation mismatches are rejected") {
    CHECK_THROWS_AS(exact.matches(parse_bitstring("101"), parse_packet("tcp,*,*,*,25")),
                    DimensionError);
    CHECK_THROWS_AS(packets.matches(parse_packet("tcp,*,*,*,25"), parse_bitstring("101")),
                    DimensionError);
  }
  SUBCASE("r must be positive") {
    const Matcher bad{.kind = MatcherKind::r_contiguous, .r = 0};
    CHECK_THROWS_AS(bad.matches(parse_bitstring("101"), parse_bitstring("101")), ParameterError);
  }
}

TEST_CASE("censoring admits exactly the candidates matching no self record") {
  const SelfSet self({parse_bitstring("00000"), parse_bitstring("00001"),
                      parse_bitstring("11111")});
  const Matcher exact{.kind = MatcherKind::exact};
  CHECK(!censor(parse_bitstring("00000"), self, exact));
  CHECK(!censor(parse_bitstring("11111"), self, exact));
  CHECK(censor(parse_bitstring("01010"), self, exact));

  SUBCASE("the partial matcher censors more than the exact one") {
    const Matcher contiguous{.kind = MatcherKind::r_contiguous, .r = 3};
    int exact_survivors = 0;
    int contiguous_survivors = 0;
    for (const Pattern& candidate : all_bitstrings(5)) {
      const bool exact_ok = censor(candidate, self, exact);
      const bool contiguous_ok = censor(candidate, self, contiguous);
      exact_survivors += exact_ok;
      contiguous_survivors += contiguous_ok;
      if (contiguous_ok) CHECK(exact_ok);

      // Independent recomputation straight from the run-length oracle.
      bool expect = true;
      for (const Pattern& record : self.records()) {
        if (oracles::naive_longest_run(render(std::get<BitString>(candidate)),
                                       render(std::get<BitString>(record))) >= 3) {
          expect = false;
        }
      }
      CHECK(contiguous_ok == expect);
    }
    CHECK(contiguous_survivors < exact_survivors);
  }
}

TEST_CASE("self sets are validated and deduplicated") {
  CHECK_THROWS_AS(SelfSet(std::vector<Pattern>{}), ParameterError);
  CHECK_THROWS_AS(SelfSet({parse_bitstring("101"), parse_packet("tcp,*,*,*,25")}),
                  DimensionError);
  CHECK_THROWS_AS(SelfSet({parse_bitstring("101"), parse_bitstring("1010")}), DimensionError);
  CHECK_THROWS_AS(SelfSet({parse_packet("tcp,*,*,1.2.3.4,25")}), ParameterError);
  CHECK_THROWS_AS(SelfSet({RealVector({0.5})}), ParameterError);

  const SelfSet deduped({parse_bitstring("101"), parse_bitstring("010"),
                         parse_bitstring("101")});
  REQUIRE(deduped.size() == 2);
  CHECK(std::get<BitString>(deduped.records()[0]) == parse_bitstring("101"));
  CHECK(std::get<BitString>(deduped.records()[1]) == parse_bitstring("010"));
  CHECK(deduped.holds_bits());
  CHECK(deduped.bit_length() == 3);
}

TEST_CASE("generation censors against self exhaustively") {
  const Matcher exact{.kind = MatcherKind::exact};

  SUBCASE("a self set covering the whole space leaves nothing to find") {
    const SelfSet everything(all_bitstrings(5));
    GenerationConfig cfg;
    cfg.target_count = 1;
    cfg.max_attempts = 200;
    cfg.matcher = exact;
    CHECK_THROWS_AS(generate_detectors(everything, cfg), CoverageError);
  }

  SUBCASE("survivors all live outside self") {
    std::vector<Pattern> half;
    for (const Pattern& p : all_bitstrings(5)) {
      if (std::get<BitString>(p).bit(0) == 0) half.push_back(p);
    }
    const SelfSet self(half);
    GenerationConfig cfg;
    cfg.target_count = 4;
    cfg.max_attempts = 100;
    cfg.matcher = exact;
    cfg.rng_seed = 17;
    const GenerationReport report = generate_detectors(self, cfg);
    REQUIRE(report.detectors.size() == 4);
    for (const Detector& d : report.detectors) {
      CHECK(d.state == DetectorState::mature);
      CHECK(std::get<BitString>(d.pattern).bit(0) == 1);
      CHECK(censor(d.pattern, self, exact));
    }
    CHECK(report.attempts == report.censored + int(report.detectors.size()) - report.rescued);
    CHECK(report.rescued == 0);
  }
}

TEST_CASE("generation is deterministic and extends prefix-stably with the target") {
  std::vector<Pattern> half;
  for (const Pattern& p : all_bitstrings(6)) {
    if (std::get<BitString>(p).bit(0) == 0) half.push_back(p);
  }
  const SelfSet self(half);
  GenerationConfig cfg;
  cfg.target_count = 5;
  cfg.max_attempts = 500;
  cfg.rng_seed = 23;

  const GenerationReport first = generate_detectors(self, cfg);
  const GenerationReport again = generate_detectors(self, cfg);
  REQUIRE(first.detectors.size() == again.detectors.size());
  for (std::size_t i = 0; i < first.detectors.size(); ++i) {
    CHECK(std::get<BitString>(first.detectors[i].pattern) ==
          std::get<BitString>(again.detectors[i].pattern));
  }

  cfg.target_count = 10;
  const GenerationReport longer = generate_detectors(self, cfg);
  REQUIRE(longer.detectors.size() == 10);
  for (std::size_t i = 0; i < first.detectors.size(); ++i) {
    CHECK(std::get<BitString>(longer.detectors[i].pattern) ==
          std::get<BitString>(first.detectors[i].pattern));
  }
}

TEST_CASE("rescue mutation turns censored candidates into extra detectors") {
  std::vector<Pattern> half;
  for (const Pattern& p : all_bitstrings(5)) {
    if (std::get<BitString>(p).bit(0) == 0) half.push_back(p);
  }
  const SelfSet self(half);
  const Matcher exact{.kind = MatcherKind::exact};

  GenerationConfig plain;
  plain.target_count = 20;
  plain.max_attempts = 20;
  plain.rng_seed = 41;
  const GenerationReport base = generate_detectors(self, plain);

  GenerationConfig rescue = plain;
  rescue.mutate_instead_of_discard = true;
  const GenerationReport saved = generate_detectors(self, rescue);

  CHECK(saved.detectors.size() >= base.detectors.size());
  CHECK(saved.rescued >= 1);
  CHECK(saved.rescued <= saved.censored);
  for (const Detector& d : saved.detectors) {
    CHECK(censor(d.pattern, self, exact));
  }
  CHECK(saved.attempts == saved.censored + int(saved.detectors.size()) - saved.rescued);
}

TEST_CASE("generation configuration is validated") {
  const SelfSet self({parse_bitstring("000")});
  GenerationConfig cfg;
  cfg.target_count = 0;
  CHECK_THROWS_AS(generate_detectors(self, cfg), ParameterError);
  cfg = GenerationConfig{};
  cfg.target_count = 10;
  cfg.max_attempts = 5;
  CHECK_THROWS_AS(generate_detectors(self, cfg), ParameterError);
  cfg = GenerationConfig{};
  cfg.mutate_instead_of_discard = true;
  cfg.max_mutation_retries = 0;
  CHECK_THROWS_AS(generate_detectors(self, cfg), ParameterError);
  cfg = GenerationConfig{};
  cfg.lifetime = 0;
  CHECK_THROWS_AS(generate_detectors(self, cfg), ParameterError);
}

TEST_CASE("monitoring counts matches up to the activation threshold") {
  const Matcher exact{.kind = MatcherKind::exact};
  std::vector<Pattern> stream;
  for (const char* text : {"000", "000", "000", "111", "000", "000", "000", "111"}) {
    stream.push_back(parse_bitstring(text));
  }
  const MonitorReport report =
      monitor({mature_bits("111", 2, std::nullopt)}, stream, exact);
  REQUIRE(report.alerts.size() == 1);
  CHECK(report.alerts[0] == Alert{.record_index = 7, .detector_id = 0});
  CHECK(report.retired.empty());
  REQUIRE(report.detectors.size() == 1);
  CHECK(report.detectors[0].match_count == 0);
  CHECK(report.detectors[0].age == 8);
  CHECK(report.detectors[0].activations == 1);
}

TEST_CASE("mature detectors retire once their age exceeds the lifetime") {
  const Matcher exact{.kind = MatcherKind::exact};
  const std::vector<Pattern> stream(4, Pattern(parse_bitstring("1")));

  SUBCASE("a bounded detector stops after its allotted records") {
    const MonitorReport report = monitor({mature_bits("1", 1, 2)}, stream, exact);
    REQUIRE(report.alerts.size() == 3);
    CHECK(report.alerts[0].record_index == 0);
    CHECK(report.alerts[1].record_index == 1);
    CHECK(report.alerts[2].record_index == 2);
    CHECK(report.retired == std::vector<int>{0});
    CHECK(report.detectors[0].age == 3);
  }
  SUBCASE("a memory detector never retires") {
    Detector memory = mature_bits("1", 1, std::nullopt);
    memory.state = DetectorState::memory;
    const MonitorReport report = monitor({memory}, stream, exact);
    CHECK(report.alerts.size() == 4);
    CHECK(report.retired.empty());
    CHECK(report.detectors[0].age == 4);
    CHECK(report.detectors[0].activations == 4);
  }
  SUBCASE("one detector retiring leaves the others' ids intact") {
    const MonitorReport report =
        monitor({mature_bits("1", 1, 1), mature_bits("1", 1, std::nullopt)}, stream, exact);
    CHECK(report.retired == std::vector<int>{0});
    int late_alerts = 0;
    for (const Alert& alert : report.alerts) {
      if (alert.record_index >= 2) {
        CHECK(alert.detector_id == 1);
        ++late_alerts;
      }
    }
    CHECK(late_alerts == 2);
  }
}

TEST_CASE("immature detectors are barred from monitoring") {
  Detector immature = mature_bits("1", 1, 1000);
  immature.state = DetectorState::immature;
  CHECK_THROWS_AS(monitor({immature}, {parse_bitstring("1")}, Matcher{}), LifecycleError);
}

TEST_CASE("promotion requires an activation and an operator verdict") {
  Detector seasoned = mature_bits("101", 2, 50);
  seasoned.activations = 3;
  seasoned.match_count = 1;
  seasoned.age = 20;

  SUBCASE("confirmation yields a permanent single-match detector") {
    const Detector promoted = promote(seasoned, true);
    CHECK(promoted.state == DetectorState::memory);
    CHECK(promoted.activation_threshold == 1);
    CHECK(!promoted.lifetime.has_value());
    CHECK(promoted.match_count == 0);
    CHECK(promoted.activations == 3);
    CHECK_NOTHROW(promoted.validate());
  }
  SUBCASE("decline only clears the running count") {
    const Detector kept = promote(seasoned, false);
    CHECK(kept.state == DetectorState::mature);
    CHECK(kept.activation_threshold == 2);
    CHECK(kept.lifetime == 50);
    CHECK(kept.match_count == 0);
  }
  SUBCASE("memory detectors pass through untouched") {
    Detector memory = mature_bits("101", 1, std::nullopt);
    memory.state = DetectorState::memory;
    memory.activations = 9;
    const Detector same = promote(memory, false);
    CHECK(same.state == DetectorState::memory);
    CHECK(same.activations == 9);
  }
  SUBCASE("immature or never-activated detectors are refused") {
    Detector immature = mature_bits("101", 1, 10);
    immature.state = DetectorState::immature;
    CHECK_THROWS_AS(promote(immature, true), LifecycleError);
    CHECK_THROWS_AS(promote(mature_bits("101", 1, 10), true), LifecycleError);
  }
}

TEST_CASE("detector validation enforces the memory invariants") {
  Detector d = mature_bits("1", 1, std::nullopt);
  d.state = DetectorState::memory;
  CHECK_NOTHROW(d.validate());
  d.lifetime = 5;
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d.lifetime = std::nullopt;
  d.activation_threshold = 2;
  CHECK_THROWS_AS(d.validate(), ParameterError);

  CHECK_THROWS_AS(mature_bits("1", 0, 10).validate(), ParameterError);
  CHECK_THROWS_AS(mature_bits("1", 1, 0).validate(), ParameterError);
  Detector negative = mature_bits("1", 1, 10);
  negative.age = -1;
  CHECK_THROWS_AS(negative.validate(), ParameterError);
}

TEST_CASE("detector serialization round-trips patterns and lifecycle fields") {
  Detector memory = mature_bits("10110", 1, std::nullopt);
  memory.state = DetectorState::memory;
  memory.activations = 4;
  Detector packet{.pattern = parse_packet("tcp,*,*,10.0.0.9,25"),
                  .state = DetectorState::mature,
                  .activation_threshold = 3,
                  .lifetime = 77,
                  .match_count = 2,
                  .age = 5,
                  .activations = 1};

  const std::string text = detectors_to_json({memory, packet});
  const std::vector<Detector> loaded = detectors_from_json(text);
  REQUIRE(loaded.size() == 2);

  CHECK(std::get<BitString>(loaded[0].pattern) == parse_bitstring("10110"));
  CHECK(loaded[0].state == DetectorState::memory);
  CHECK(loaded[0].activation_threshold == 1);
  CHECK(!loaded[0].lifetime.has_value());

  CHECK(render(loaded[1].pattern) == "tcp,*,*,10.0.0.9,25");
  CHECK(loaded[1].state == DetectorState::mature);
  CHECK(loaded[1].activation_threshold == 3);
  CHECK(loaded[1].lifetime == 77);

  // Runtime counters are deliberately not persisted.
  for (const Detector& d : loaded) {
    CHECK(d.match_count == 0);
    CHECK(d.age == 0);
    CHECK(d.activations == 0);
  }
}

TEST_CASE("detector deserialization rejects malformed input") {
  CHECK_THROWS_AS(detectors_from_json("not json"), ParseError);
  CHECK_THROWS_AS(detectors_from_json("{}"), ParseError);
  CHECK_THROWS_AS(detectors_from_json(R"([{"pattern": "101"}])"), ParseError);
  CHECK_THROWS_AS(detectors_from_json(
                      R"([{"pattern": "101", "state": "sleepy",
                           "activation_threshold": 1, "lifetime": null}])"),
                  ParseError);
  CHECK_THROWS_AS(detectors_from_json(
                      R"([{"pattern": "101", "state": "memory",
                           "activation_threshold": 1, "lifetime": 10}])"),
                  ParameterError);
}

TEST_CASE("monitor reports serialize alerts and retirements") {
  MonitorReport report;
  report.alerts.push_back(Alert{.record_index = 4, .detector_id = 1});
  report.retired.push_back(0);
  const std::string text = report_to_json(report);
  CHECK(text.find("\"record_index\": 4") != std::string::npos);
  CHECK(text.find("\"detector_id\": 1") != std::string::npos);
  CHECK(text.find("\"retired\"") != std::string::npos);
}

TEST_CASE("detector state names round-trip") {
  for (DetectorState s :
       {DetectorState::immature, DetectorState::mature, DetectorState::memory}) {
    CHECK(parse_detector_state(render(s)) == s);
  }
  CHECK_THROWS_AS(parse_detector_state("retired"), ParseError);
}
