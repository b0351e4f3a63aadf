#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aistk/encoding.hpp"

namespace aistk {

// File loading, saving, and seeded synthetic-fixture generation for the two
// pipelines. CSV files carry mandatory headers and reject unknown columns.

// Votes for a population of users, keyed by user in first-appearance order.
class RatingsTable {
 public:
  // Rejects duplicate (user, item) pairs; scores validated by UserProfile.
  void add_vote(const std::string& user_id, const std::string& item_id, int score);

  std::size_t user_count() const { return order_.size(); }
  std::size_t vote_count() const { return vote_count_; }

  bool has_user(const std::string& user_id) const;
  const UserProfile& user(const std::string& user_id) const;  // NoDataError

  // Users in first-appearance order.
  std::vector<std::string> user_ids() const { return order_; }

  // Every user except the named one, preserving table order. The excluded
  // user need not exist.
  std::vector<UserProfile> candidates_excluding(const std::string& user_id) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, UserProfile> users_;
  std::size_t vote_count_ = 0;
};

// CSV with header `user_id,item_id,rating`; errors name the offending row.
RatingsTable load_ratings(const std::string& path);
void save_ratings(const RatingsTable& table, const std::string& path);

struct TrafficRecord {
  PacketSignature packet;  // always wildcard-free
  std::optional<bool> labeled_nonself;  // ground truth when the file carries it
};

// Ordered traffic rows; either every row is labeled or none is.
class TrafficLog {
 public:
  explicit TrafficLog(std::vector<TrafficRecord> records);

  const std::vector<TrafficRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool labeled() const;

  std::vector<Pattern> patterns() const;

 private:
  std::vector<TrafficRecord> records_;
};

// CSV with header `protocol,src_ip,src_port,dst_ip,dst_port` plus an
// optional trailing `label` column valued `self` or `nonself`. Wildcards are
// rejected: these are observed records, not detector patterns.
TrafficLog load_traffic(const std::string& path);
void save_traffic(const TrafficLog& log, const std::string& path);

// Seeded ratings fixture with planted block structure: users fall into
// `groups` taste groups with distinct per-item mean scores, and each vote is
// the group mean plus or minus one unit of noise, clamped to [0, 5]. With
// two groups the profiles are mirror images, so cross-group correlations
// come out negative and within-group positive — structure the recommender
// can actually find. Each user votes on each item with probability
// `density`. Users are named u0, u1, ... and items i0, i1, ...
RatingsTable synth_ratings(int users, int items, double density, std::uint64_t seed,
                           int groups = 2);

// What a trusted network looks like: which services exist and which address
// ranges the endpoints live in.
struct TrafficProfile {
  struct Service {
    Protocol protocol = Protocol::tcp;
    std::uint16_t dst_port = 0;
  };

  std::vector<Service> services;
  Ipv4 src_network{};        // clients come from this prefix
  int src_prefix_bits = 24;  // in [0, 32]
  std::vector<Ipv4> dst_hosts;

  void validate() const;  // non-empty services and hosts, sane prefix

  // True iff the record uses a listed service, a source inside the client
  // prefix, and a listed destination host.
  bool allows(const PacketSignature& record) const;
};

// Labeled fixture: n_self rows drawn from the profile (ephemeral source
// ports), then n_attack rows each violating the profile in at least one
// aspect — foreign source address, unlisted service, or unlisted
// destination. Deterministic per seed.
TrafficLog synth_traffic(const TrafficProfile& profile, int n_self, int n_attack,
                         std::uint64_t seed);

}  // namespace aistk
