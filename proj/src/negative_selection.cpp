#include "aistk/negative_selection.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <json.hpp>

#include "aistk/affinity.hpp"
#include "aistk/errors.hpp"
#include "aistk/rng.hpp"

namespace aistk {

void Matcher::validate() const {
  if (kind == MatcherKind::r_contiguous && r < 1) {
    throw ParameterError("r_contiguous matcher needs r >= 1");
  }
}

namespace {

const BitString& as_bits(const Pattern& p, const char* role) {
  if (const auto* bits = std::get_if<BitString>(&p)) return *bits;
  throw DimensionError(std::string(role) + " must be a bit string for this matcher");
}

const PacketSignature& as_packet(const Pattern& p, const char* role) {
  if (const auto* sig = std::get_if<PacketSignature>(&p)) return *sig;
  throw DimensionError(std::string(role) + " must be a packet for this matcher");
}

}  // namespace

bool Matcher::matches(const Pattern& detector, const Pattern& record) const {
  validate();
  switch (kind) {
    case MatcherKind::exact:
      return hamming_similarity(as_bits(detector, "detector"), as_bits(record, "record")) ==
             int(as_bits(record, "record").size());
    case MatcherKind::r_contiguous:
      return r_contiguous_match(as_bits(detector, "detector"), as_bits(record, "record"), r);
    case MatcherKind::packet_fields:
      return packet_matches(as_packet(detector, "detector"), as_packet(record, "record"));
  }
  throw ParameterError("unrepresentable matcher kind");
}

std::string render(DetectorState s) {
  switch (s) {
    case DetectorState::immature: return "immature";
    case DetectorState::mature: return "mature";
    case DetectorState::memory: return "memory";
  }
  throw ParameterError("unrepresentable detector state");
}

DetectorState parse_detector_state(const std::string& text) {
  if (text == "immature") return DetectorState::immature;
  if (text == "mature") return DetectorState::mature;
  if (text == "memory") return DetectorState::memory;
  throw ParseError("unknown detector state '" + text + "'");
}

void Detector::validate() const {
  if (activation_threshold < 1) {
    throw ParameterError("activation_threshold must be >= 1");
  }
  if (lifetime && *lifetime < 1) {
    throw ParameterError("lifetime must be >= 1 when bounded");
  }
  if (match_count < 0 || age < 0 || activations < 0) {
    throw ParameterError("detector counters must be nonnegative");
  }
  if (state == DetectorState::memory && (lifetime || activation_threshold != 1)) {
    throw ParameterError("memory detectors must be unbounded with activation_threshold 1");
  }
}

SelfSet::SelfSet(std::vector<Pattern> records) {
  if (records.empty()) {
    throw ParameterError("self set must be non-empty");
  }
  const std::size_t shape = records.front().index();
  std::optional<std::size_t> width;
  std::set<Pattern> seen;
  for (const Pattern& record : records) {
    if (record.index() != shape) {
      throw DimensionError("self set mixes representations");
    }
    if (const auto* bits = std::get_if<BitString>(&record)) {
      if (width && *width != bits->size()) {
        throw DimensionError("self set mixes bit string lengths");
      }
      width = bits->size();
    } else if (const auto* sig = std::get_if<PacketSignature>(&record)) {
      if (sig->has_wildcard()) {
        throw ParameterError("self records may not contain wildcards");
      }
    } else {
      throw ParameterError("self sets hold bit strings or packets");
    }
    if (seen.insert(record).second) {
      records_.push_back(record);
    }
  }
}

bool SelfSet::holds_bits() const {
  return std::holds_alternative<BitString>(records_.front());
}

std::size_t SelfSet::bit_length() const {
  if (!holds_bits()) {
    throw ParameterError("self set does not hold bit strings");
  }
  return std::get<BitString>(records_.front()).size();
}

void GenerationConfig::validate() const {
  if (target_count < 1) {
    throw ParameterError("target_count must be >= 1");
  }
  if (max_attempts < target_count) {
    throw ParameterError("max_attempts must be >= target_count");
  }
  matcher.validate();
  if (mutate_instead_of_discard) {
    if (max_mutation_retries < 1) {
      throw ParameterError("max_mutation_retries must be >= 1");
    }
    mutation.validate();
  }
  if (activation_threshold < 1) {
    throw ParameterError("activation_threshold must be >= 1");
  }
  if (lifetime && *lifetime < 1) {
    throw ParameterError("lifetime must be >= 1 when bounded");
  }
}

bool censor(const Pattern& candidate, const SelfSet& self, const Matcher& matcher) {
  for (const Pattern& record : self.records()) {
    if (matcher.matches(candidate, record)) {
      return false;
    }
  }
  return true;
}

namespace {

Pattern random_candidate(const SelfSet& self, Rng& rng) {
  if (self.holds_bits()) {
    std::vector<std::uint8_t> bits(self.bit_length());
    for (auto& bit : bits) {
      bit = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
    }
    return BitString(std::move(bits));
  }
  PacketSignature sig;
  sig.protocol = static_cast<Protocol>(rng.uniform_int(0, 3));
  auto draw_ip = [&]() -> std::optional<Ipv4> {
    const bool wild = rng.bernoulli(0.5);
    const Ipv4 fresh{rng.uniform_u32()};
    return wild ? std::nullopt : std::optional<Ipv4>(fresh);
  };
  auto draw_port = [&]() -> std::optional<std::uint16_t> {
    const bool wild = rng.bernoulli(0.5);
    const auto fresh = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
    return wild ? std::nullopt : std::optional<std::uint16_t>(fresh);
  };
  sig.src_ip = draw_ip();
  sig.src_port = draw_port();
  sig.dst_ip = draw_ip();
  sig.dst_port = draw_port();
  return sig;
}

// Fraction of positions (bits) or fields (packets) on which the candidate
// already agrees with its closest self record; drives the rescue mutation
// rate so near-duplicates of self are shaken hardest.
double nearest_self_affinity(const Pattern& candidate, const SelfSet& self) {
  double best = 0.0;
  if (const auto* bits = std::get_if<BitString>(&candidate)) {
    for (const Pattern& record : self.records()) {
      const auto& other = std::get<BitString>(record);
      best = std::max(best, double(hamming_similarity(*bits, other)) / double(other.size()));
    }
    return best;
  }
  const auto& sig = std::get<PacketSignature>(candidate);
  for (const Pattern& record : self.records()) {
    const auto& other = std::get<PacketSignature>(record);
    int close = 0;
    if (sig.protocol == Protocol::any || sig.protocol == other.protocol) ++close;
    if (!sig.src_ip || *sig.src_ip == *other.src_ip) ++close;
    if (!sig.src_port || *sig.src_port == *other.src_port) ++close;
    if (!sig.dst_ip || *sig.dst_ip == *other.dst_ip) ++close;
    if (!sig.dst_port || *sig.dst_port == *other.dst_port) ++close;
    best = std::max(best, close / 5.0);
  }
  return best;
}

}  // namespace

GenerationReport generate_detectors(const SelfSet& self, const GenerationConfig& cfg) {
  cfg.validate();

  GenerationReport report;
  Rng candidate_rng(derive_seed(cfg.rng_seed, "candidates"));
  Rng mutation_rng(derive_seed(cfg.rng_seed, "mutation"));

  while (int(report.detectors.size()) < cfg.target_count && report.attempts < cfg.max_attempts) {
    ++report.attempts;
    Pattern candidate = random_candidate(self, candidate_rng);
    bool survives = censor(candidate, self, cfg.matcher);
    if (!survives) {
      ++report.censored;
      if (cfg.mutate_instead_of_discard) {
        for (int retry = 0; retry < cfg.max_mutation_retries && !survives; ++retry) {
          const double rate = mutation_rate(nearest_self_affinity(candidate, self), cfg.mutation);
          candidate = mutate(candidate, rate, mutation_rng, cfg.mutation.real_domain);
          survives = censor(candidate, self, cfg.matcher);
        }
        if (survives) {
          ++report.rescued;
        }
      }
    }
    if (survives) {
      report.detectors.push_back(Detector{.pattern = std::move(candidate),
                                          .state = DetectorState::mature,
                                          .activation_threshold = cfg.activation_threshold,
                                          .lifetime = cfg.lifetime,
                                          .match_count = 0,
                                          .age = 0,
                                          .activations = 0});
    }
  }

  if (report.detectors.empty()) {
    throw CoverageError("no detector survived censoring after " +
                        std::to_string(report.attempts) + " attempts");
  }
  return report;
}

MonitorReport monitor(std::vector<Detector> detectors, const std::vector<Pattern>& stream,
                      const Matcher& matcher) {
  matcher.validate();
  for (const Detector& d : detectors) {
    d.validate();
    if (d.state == DetectorState::immature) {
      throw LifecycleError("immature detectors cannot monitor traffic");
    }
  }

  MonitorReport report;
  std::vector<bool> active(detectors.size(), true);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    for (std::size_t i = 0; i < detectors.size(); ++i) {
      if (!active[i]) continue;
      Detector& d = detectors[i];
      if (matcher.matches(d.pattern, stream[t])) {
        ++d.match_count;
        if (d.match_count >= d.activation_threshold) {
          report.alerts.push_back(Alert{.record_index = int(t), .detector_id = int(i)});
          d.match_count = 0;
          ++d.activations;
        }
      }
      ++d.age;
      if (d.state == DetectorState::mature && d.lifetime && d.age > *d.lifetime) {
        active[i] = false;
        report.retired.push_back(int(i));
      }
    }
  }
  report.detectors = std::move(detectors);
  return report;
}

Detector promote(const Detector& d, bool operator_confirms) {
  d.validate();
  if (d.state == DetectorState::immature) {
    throw LifecycleError("immature detectors cannot be promoted");
  }
  if (d.state == DetectorState::memory) {
    return d;
  }
  if (d.activations < 1) {
    throw LifecycleError("only activated detectors can be promoted");
  }
  Detector out = d;
  out.match_count = 0;
  if (operator_confirms) {
    out.state = DetectorState::memory;
    out.activation_threshold = 1;
    out.lifetime = std::nullopt;
  }
  return out;
}

namespace {

Pattern pattern_from_text(const std::string& text) {
  if (text.find(',') != std::string::npos) {
    return parse_packet(text);
  }
  return parse_bitstring(text);
}

}  // namespace

std::string detectors_to_json(const std::vector<Detector>& detectors) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Detector& d : detectors) {
    nlohmann::json entry;
    entry["pattern"] = render(d.pattern);
    entry["state"] = render(d.state);
    entry["activation_threshold"] = d.activation_threshold;
    entry["lifetime"] = d.lifetime ? nlohmann::json(*d.lifetime) : nlohmann::json(nullptr);
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::vector<Detector> detectors_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid detector JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError("detector JSON must be a top-level array");
  }
  std::vector<Detector> detectors;
  detectors.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& entry = doc[i];
    if (!entry.is_object() || !entry.contains("pattern") || !entry.contains("state") ||
        !entry.contains("activation_threshold") || !entry.contains("lifetime")) {
      throw ParseError("detector " + std::to_string(i) +
                       " must carry pattern, state, activation_threshold and lifetime");
    }
    try {
      Detector d{.pattern = pattern_from_text(entry["pattern"].get<std::string>()),
                 .state = parse_detector_state(entry["state"].get<std::string>()),
                 .activation_threshold = entry["activation_threshold"].get<int>(),
                 .lifetime = entry["lifetime"].is_null()
                                 ? std::nullopt
                                 : std::optional<int>(entry["lifetime"].get<int>()),
                 .match_count = 0,
                 .age = 0,
                 .activations = 0};
      d.validate();
      detectors.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("detector " + std::to_string(i) + ": " + e.what());
    }
  }
  return detectors;
}

std::string report_to_json(const MonitorReport& report) {
  nlohmann::json doc;
  doc["alerts"] = nlohmann::json::array();
  for (const Alert& alert : report.alerts) {
    doc["alerts"].push_back({{"record_index", alert.record_index},
                             {"detector_id", alert.detector_id}});
  }
  doc["retired"] = report.retired;
  return doc.dump(2) + "\n";
}

}  // namespace aistk
