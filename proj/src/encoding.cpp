#include "aistk/encoding.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

#include "aistk/errors.hpp"

namespace aistk {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) {
    throw ParameterError("bit string must be non-empty");
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] > 1) {
      throw ParameterError("bit " + std::to_string(i) + " is " +
                           std::to_string(int(bits_[i])) + "; bits must be 0 or 1");
    }
  }
}

BitString BitString::zeros(std::size_t length) {
  return BitString(std::vector<std::uint8_t>(length, 0));
}

BitString BitString::with_flipped(std::size_t i) const {
  if (i >= bits_.size()) {
    throw ParameterError("flip position " + std::to_string(i) + " out of range for length " +
                         std::to_string(bits_.size()));
  }
  std::vector<std::uint8_t> copy = bits_;
  copy[i] ^= 1u;
  return BitString(std::move(copy));
}

BitString parse_bitstring(const std::string& text) {
  if (text.empty()) {
    throw ParseError("empty bit string");
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '0' && c != '1') {
      throw ParseError("invalid character '" + std::string(1, c) + "' at position " +
                       std::to_string(i) + " of bit string");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BitString(std::move(bits));
}

std::string render(const BitString& b) {
  std::string out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.push_back(b.bit(i) ? '1' : '0');
  }
  return out;
}

RealVector::RealVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw ParameterError("real vector must be non-empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ParameterError("component " + std::to_string(i) + " is not finite");
    }
  }
}

void UserProfile::add_vote(const std::string& item_id, int score) {
  if (score < 0 || score > 5) {
    throw ParameterError("vote " + std::to_string(score) + " for item '" + item_id +
                         "' outside [0, 5]");
  }
  auto [it, inserted] = votes_.emplace(item_id, score);
  (void)it;
  if (!inserted) {
    throw ParameterError("duplicate vote for item '" + item_id + "' by user '" + user_id_ + "'");
  }
}

bool UserProfile::has_vote(const std::string& item_id) const {
  return votes_.find(item_id) != votes_.end();
}

int UserProfile::vote(const std::string& item_id) const {
  auto it = votes_.find(item_id);
  if (it == votes_.end()) {
    throw NoDataError("user '" + user_id_ + "' has no vote for item '" + item_id + "'");
  }
  return it->second;
}

double UserProfile::mean_vote() const {
  if (votes_.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (const auto& [item, score] : votes_) {
    (void)item;
    sum += score;
  }
  return sum / double(votes_.size());
}

Protocol parse_protocol(const std::string& text) {
  if (text == "tcp") return Protocol::tcp;
  if (text == "udp") return Protocol::udp;
  if (text == "icmp") return Protocol::icmp;
  if (text == "any" || text == "*") return Protocol::any;
  throw ParseError("unknown protocol '" + text + "'");
}

std::string render(Protocol p) {
  switch (p) {
    case Protocol::tcp: return "tcp";
    case Protocol::udp: return "udp";
    case Protocol::icmp: return "icmp";
    case Protocol::any: return "any";
  }
  throw ParameterError("unrepresentable protocol value");
}

Ipv4 parse_ipv4(const std::string& text) {
  std::uint32_t packed = 0;
  std::size_t pos = 0;
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (pos >= text.size() || text[pos] != '.') {
        throw ParseError("malformed IPv4 address '" + text + "'");
      }
      ++pos;
    }
    const std::size_t start = pos;
    unsigned value = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      value = value * 10 + unsigned(text[pos] - '0');
      if (value > 255 || pos - start >= 3) {
        throw ParseError("IPv4 octet out of range in '" + text + "'");
      }
      ++pos;
    }
    if (pos == start) {
      throw ParseError("malformed IPv4 address '" + text + "'");
    }
    packed = (packed << 8) | value;
  }
  if (pos != text.size()) {
    throw ParseError("trailing characters in IPv4 address '" + text + "'");
  }
  return Ipv4{packed};
}

std::string render(Ipv4 ip) {
  std::ostringstream out;
  out << ((ip.value >> 24) & 0xffu) << '.' << ((ip.value >> 16) & 0xffu) << '.'
      << ((ip.value >> 8) & 0xffu) << '.' << (ip.value & 0xffu);
  return out.str();
}

bool PacketSignature::has_wildcard() const {
  return protocol == Protocol::any || !src_ip || !src_port || !dst_ip || !dst_port;
}

bool packet_matches(const PacketSignature& sig, const PacketSignature& record) {
  if (record.has_wildcard()) {
    throw ParameterError("observed traffic record may not contain wildcards");
  }
  if (sig.protocol != Protocol::any && sig.protocol != record.protocol) return false;
  if (sig.src_ip && *sig.src_ip != *record.src_ip) return false;
  if (sig.src_port && *sig.src_port != *record.src_port) return false;
  if (sig.dst_ip && *sig.dst_ip != *record.dst_ip) return false;
  if (sig.dst_port && *sig.dst_port != *record.dst_port) return false;
  return true;
}

namespace {

std::vector<std::string> split_fields(const std::string& text, char sep) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::uint16_t parse_port(const std::string& text) {
  if (text.empty()) {
    throw ParseError("empty port field");
  }
  unsigned value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw ParseError("invalid port '" + text + "'");
    }
    value = value * 10 + unsigned(c - '0');
    if (value > 65535) {
      throw ParseError("port '" + text + "' out of range");
    }
  }
  return static_cast<std::uint16_t>(value);
}

}  // namespace

PacketSignature parse_packet(const std::string& text) {
  const std::vector<std::string> fields = split_fields(text, ',');
  if (fields.size() != 5) {
    throw ParseError("packet '" + text + "' must have 5 comma-separated fields, got " +
                     std::to_string(fields.size()));
  }
  PacketSignature sig;
  sig.protocol = parse_protocol(fields[0]);
  if (fields[1] != "*") sig.src_ip = parse_ipv4(fields[1]);
  if (fields[2] != "*") sig.src_port = parse_port(fields[2]);
  if (fields[3] != "*") sig.dst_ip = parse_ipv4(fields[3]);
  if (fields[4] != "*") sig.dst_port = parse_port(fields[4]);
  return sig;
}

std::string render(const PacketSignature& sig) {
  std::ostringstream out;
  out << render(sig.protocol) << ',';
  out << (sig.src_ip ? render(*sig.src_ip) : std::string("*")) << ',';
  if (sig.src_port) out << *sig.src_port; else out << '*';
  out << ',';
  out << (sig.dst_ip ? render(*sig.dst_ip) : std::string("*")) << ',';
  if (sig.dst_port) out << *sig.dst_port; else out << '*';
  return out.str();
}

std::string render(const Pattern& p) {
  return std::visit([](const auto& v) -> std::string {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, RealVector>) {
      std::ostringstream out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v.value(i);
      }
      return out.str();
    } else {
      return render(v);
    }
  }, p);
}

}  // namespace aistk
