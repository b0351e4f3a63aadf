#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace aistk {

// Antigens and antibodies share one representation; these are the encodings
// both sides of every matching function operate on. All types are immutable
// in practice: operations return new values instead of mutating in place.

// Fixed-width binary pattern. Non-empty; every element is exactly 0 or 1.
class BitString {
 public:
  explicit BitString(std::vector<std::uint8_t> bits);
  static BitString zeros(std::size_t length);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t bit(std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  // Returns a copy with bit i inverted.
  BitString with_flipped(std::size_t i) const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// One bit per character, order preserved. Characters outside {0,1} raise a
// ParseError naming the offending zero-based position.
BitString parse_bitstring(const std::string& text);
std::string render(const BitString& b);

// Fixed-length vector of finite reals. Non-empty; rejects NaN and infinities.
class RealVector {
 public:
  explicit RealVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double value(std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const RealVector&, const RealVector&) = default;
  friend auto operator<=>(const RealVector&, const RealVector&) = default;

 private:
  std::vector<double> values_;
};

// Sparse item -> score vote map for one user. Scores are integers in [0, 5].
// Plays both roles: antigen (the target user) and antibody (a candidate
// neighbour).
class UserProfile {
 public:
  UserProfile() = default;
  explicit UserProfile(std::string user_id) : user_id_(std::move(user_id)) {}

  const std::string& user_id() const { return user_id_; }
  const std::map<std::string, int>& votes() const { return votes_; }

  // Rejects duplicate items and scores outside [0, 5].
  void add_vote(const std::string& item_id, int score);

  bool has_vote(const std::string& item_id) const;
  int vote(const std::string& item_id) const;  // NoDataError when absent
  std::size_t vote_count() const { return votes_.size(); }

  // Average over all of this user's votes; 0 for an empty profile.
  double mean_vote() const;

 private:
  std::string user_id_;
  std::map<std::string, int> votes_;
};

enum class Protocol : std::uint8_t { tcp, udp, icmp, any };

Protocol parse_protocol(const std::string& text);
std::string render(Protocol p);

// Dotted-quad IPv4 address, host byte order.
struct Ipv4 {
  std::uint32_t value = 0;
  friend bool operator==(const Ipv4&, const Ipv4&) = default;
  friend auto operator<=>(const Ipv4&, const Ipv4&) = default;
};

Ipv4 parse_ipv4(const std::string& text);
std::string render(Ipv4 ip);

// Five-field packet pattern. Protocol `any` and disengaged optionals are
// wildcards. Detectors and signatures may carry wildcards; observed traffic
// records never do.
struct PacketSignature {
  Protocol protocol = Protocol::any;
  std::optional<Ipv4> src_ip;
  std::optional<std::uint16_t> src_port;
  std::optional<Ipv4> dst_ip;
  std::optional<std::uint16_t> dst_port;

  bool has_wildcard() const;

  friend bool operator==(const PacketSignature&, const PacketSignature&) = default;
  friend auto operator<=>(const PacketSignature&, const PacketSignature&) = default;
};

// True iff every non-wildcard field of sig equals the corresponding record
// field. The record must be wildcard-free (ParameterError otherwise).
bool packet_matches(const PacketSignature& sig, const PacketSignature& record);

// Comma-separated `protocol,src_ip,src_port,dst_ip,dst_port`; `*` renders a
// wildcard field, and `any` (or `*`) parses as the protocol wildcard.
PacketSignature parse_packet(const std::string& text);
std::string render(const PacketSignature& sig);

// The shared antibody/antigen pattern type for selection and mutation.
using Pattern = std::variant<BitString, RealVector, PacketSignature>;

std::string render(const Pattern& p);

}  // namespace aistk
