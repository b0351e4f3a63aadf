#include "aistk/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include "aistk/errors.hpp"
#include "aistk/rng.hpp"

namespace aistk {

void RatingsTable::add_vote(const std::string& user_id, const std::string& item_id, int score) {
  if (user_id.empty() || item_id.empty()) {
    throw ParameterError("user and item ids must be non-empty");
  }
  auto it = users_.find(user_id);
  if (it == users_.end()) {
    it = users_.emplace(user_id, UserProfile(user_id)).first;
    order_.push_back(user_id);
  }
  it->second.add_vote(item_id, score);
  ++vote_count_;
}

bool RatingsTable::has_user(const std::string& user_id) const {
  return users_.find(user_id) != users_.end();
}

const UserProfile& RatingsTable::user(const std::string& user_id) const {
  auto it = users_.find(user_id);
  if (it == users_.end()) {
    throw NoDataError("unknown user '" + user_id + "'");
  }
  return it->second;
}

std::vector<UserProfile> RatingsTable::candidates_excluding(const std::string& user_id) const {
  std::vector<UserProfile> out;
  out.reserve(order_.size());
  for (const std::string& id : order_) {
    if (id != user_id) {
      out.push_back(users_.at(id));
    }
  }
  return out;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

[[noreturn]] void row_error(const std::string& path, std::size_t row, const std::string& what) {
  throw ParseError(path + ", row " + std::to_string(row) + ": " + what);
}

}  // namespace

RatingsTable load_ratings(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != "user_id,item_id,rating") {
    throw ParseError(path + ": expected header 'user_id,item_id,rating'");
  }
  RatingsTable table;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty() && row + 1 == lines.size()) {
      break;  // trailing newline
    }
    const std::vector<std::string> fields = split_csv_row(lines[row]);
    if (fields.size() != 3) {
      row_error(path, row + 1, "expected 3 fields, got " + std::to_string(fields.size()));
    }
    int score = 0;
    try {
      std::size_t used = 0;
      score = std::stoi(fields[2], &used);
      if (used != fields[2].size()) {
        throw std::invalid_argument(fields[2]);
      }
    } catch (const std::exception&) {
      row_error(path, row + 1, "rating '" + fields[2] + "' is not an integer");
    }
    try {
      table.add_vote(fields[0], fields[1], score);
    } catch (const Error& e) {
      row_error(path, row + 1, e.what());
    }
  }
  if (table.user_count() == 0) {
    throw ParseError(path + ": ratings file holds no votes");
  }
  return table;
}

void save_ratings(const RatingsTable& table, const std::string& path) {
  std::string out = "user_id,item_id,rating\n";
  for (const std::string& user_id : table.user_ids()) {
    for (const auto& [item, score] : table.user(user_id).votes()) {
      out += user_id + "," + item + "," + std::to_string(score) + "\n";
    }
  }
  write_file(path, out);
}

TrafficLog::TrafficLog(std::vector<TrafficRecord> records) : records_(std::move(records)) {
  std::size_t labeled_rows = 0;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].packet.has_wildcard()) {
      throw ParameterError("traffic record " + std::to_string(i + 1) + " contains a wildcard");
    }
    if (records_[i].labeled_nonself) {
      ++labeled_rows;
    }
  }
  if (labeled_rows != 0 && labeled_rows != records_.size()) {
    throw ParameterError("traffic log mixes labeled and unlabeled rows");
  }
}

bool TrafficLog::labeled() const {
  return !records_.empty() && records_.front().labeled_nonself.has_value();
}

std::vector<Pattern> TrafficLog::patterns() const {
  std::vector<Pattern> out;
  out.reserve(records_.size());
  for (const TrafficRecord& r : records_) {
    out.push_back(r.packet);
  }
  return out;
}

TrafficLog load_traffic(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  const std::string bare = "protocol,src_ip,src_port,dst_ip,dst_port";
  if (lines.empty() || (lines[0] != bare && lines[0] != bare + ",label")) {
    throw ParseError(path + ": expected header '" + bare + "[,label]'");
  }
  const bool has_label = lines[0] != bare;
  std::vector<TrafficRecord> records;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty() && row + 1 == lines.size()) {
      break;
    }
    const std::vector<std::string> fields = split_csv_row(lines[row]);
    const std::size_t expected = has_label ? 6 : 5;
    if (fields.size() != expected) {
      row_error(path, row + 1, "expected " + std::to_string(expected) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    TrafficRecord record;
    try {
      record.packet = parse_packet(fields[0] + "," + fields[1] + "," + fields[2] + "," +
                                   fields[3] + "," + fields[4]);
    } catch (const Error& e) {
      row_error(path, row + 1, e.what());
    }
    if (record.packet.has_wildcard()) {
      row_error(path, row + 1, "wildcards are not allowed in traffic records");
    }
    if (has_label) {
      if (fields[5] == "self") {
        record.labeled_nonself = false;
      } else if (fields[5] == "nonself") {
        record.labeled_nonself = true;
      } else {
        row_error(path, row + 1, "unknown label '" + fields[5] + "'");
      }
    }
    records.push_back(std::move(record));
  }
  return TrafficLog(std::move(records));
}

void save_traffic(const TrafficLog& log, const std::string& path) {
  std::string out = "protocol,src_ip,src_port,dst_ip,dst_port";
  if (log.labeled()) {
    out += ",label";
  }
  out += "\n";
  for (const TrafficRecord& r : log.records()) {
    out += render(r.packet);
    if (log.labeled()) {
      out += *r.labeled_nonself ? ",nonself" : ",self";
    }
    out += "\n";
  }
  write_file(path, out);
}

RatingsTable synth_ratings(int users, int items, double density, std::uint64_t seed,
                           int groups) {
  if (users < 1 || items < 1) {
    throw ParameterError("user and item counts must be >= 1");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw ParameterError("density must be in (0, 1]");
  }
  if (groups < 1 || groups > users) {
    throw ParameterError("groups must be in [1, users]");
  }

  Rng rng(derive_seed(seed, "ratings"));

  // Distinct taste profiles: with two groups the second mirrors the first so
  // that cross-group agreement is as low as within-group agreement is high.
  std::vector<std::vector<int>> group_means(static_cast<std::size_t>(groups),
                                            std::vector<int>(static_cast<std::size_t>(items)));
  for (int j = 0; j < items; ++j) {
    const int base = rng.uniform_int(0, 5);
    group_means[0][std::size_t(j)] = base;
    for (int g = 1; g < groups; ++g) {
      group_means[std::size_t(g)][std::size_t(j)] = groups == 2 ? 5 - base : rng.uniform_int(0, 5);
    }
  }

  RatingsTable table;
  for (int u = 0; u < users; ++u) {
    const std::vector<int>& means = group_means[std::size_t(u % groups)];
    bool voted = false;
    for (int j = 0; j < items; ++j) {
      const bool include = rng.bernoulli(density);
      const int noise = rng.uniform_int(-1, 1);
      if (!include && voted) continue;
      if (!include && j + 1 < items) continue;
      const int score = std::clamp(means[std::size_t(j)] + noise, 0, 5);
      table.add_vote("u" + std::to_string(u), "i" + std::to_string(j), score);
      voted = true;
    }
  }
  return table;
}

void TrafficProfile::validate() const {
  if (services.empty()) {
    throw ParameterError("traffic profile needs at least one service");
  }
  if (dst_hosts.empty()) {
    throw ParameterError("traffic profile needs at least one destination host");
  }
  if (src_prefix_bits < 0 || src_prefix_bits > 32) {
    throw ParameterError("src_prefix_bits must be in [0, 32]");
  }
  for (const Service& s : services) {
    if (s.protocol == Protocol::any) {
      throw ParameterError("profile services must name a concrete protocol");
    }
  }
}

namespace {

std::uint32_t prefix_mask(int bits) {
  return bits == 0 ? 0u : (~0u << (32 - bits));
}

bool in_network(Ipv4 ip, Ipv4 network, int bits) {
  const std::uint32_t mask = prefix_mask(bits);
  return (ip.value & mask) == (network.value & mask);
}

}  // namespace

bool TrafficProfile::allows(const PacketSignature& record) const {
  validate();
  if (record.has_wildcard()) {
    throw ParameterError("profile check requires a wildcard-free record");
  }
  const bool service_ok =
      std::any_of(services.begin(), services.end(), [&](const Service& s) {
        return s.protocol == record.protocol && s.dst_port == *record.dst_port;
      });
  const bool src_ok = in_network(*record.src_ip, src_network, src_prefix_bits);
  const bool dst_ok = std::any_of(dst_hosts.begin(), dst_hosts.end(),
                                  [&](Ipv4 host) { return host == *record.dst_ip; });
  return service_ok && src_ok && dst_ok;
}

TrafficLog synth_traffic(const TrafficProfile& profile, int n_self, int n_attack,
                         std::uint64_t seed) {
  profile.validate();
  if (n_self < 0 || n_attack < 0) {
    throw ParameterError("row counts must be nonnegative");
  }

  Rng rng(derive_seed(seed, "traffic"));

  auto profile_source = [&]() -> Ipv4 {
    const std::uint32_t mask = prefix_mask(profile.src_prefix_bits);
    const std::uint32_t host = rng.uniform_u32() & ~mask;
    return Ipv4{(profile.src_network.value & mask) | host};
  };
  auto self_record = [&]() -> PacketSignature {
    const TrafficProfile::Service& svc =
        profile.services[std::size_t(rng.uniform_int(0, int(profile.services.size()) - 1))];
    PacketSignature p;
    p.protocol = svc.protocol;
    p.src_ip = profile_source();
    p.src_port = static_cast<std::uint16_t>(rng.uniform_int(1024, 65535));
    p.dst_ip = profile.dst_hosts[std::size_t(rng.uniform_int(0, int(profile.dst_hosts.size()) - 1))];
    p.dst_port = svc.dst_port;
    return p;
  };

  auto foreign_source = [&]() -> Ipv4 {
    Ipv4 ip{rng.uniform_u32()};
    while (in_network(ip, profile.src_network, profile.src_prefix_bits)) {
      ip = Ipv4{rng.uniform_u32()};
    }
    return ip;
  };
  auto unlisted_service = [&](PacketSignature& p) {
    for (;;) {
      const auto proto = static_cast<Protocol>(rng.uniform_int(0, 2));
      const auto port = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
      const bool listed =
          std::any_of(profile.services.begin(), profile.services.end(),
                      [&](const TrafficProfile::Service& s) {
                        return s.protocol == proto && s.dst_port == port;
                      });
      if (!listed) {
        p.protocol = proto;
        p.dst_port = port;
        return;
      }
    }
  };
  auto unlisted_destination = [&]() -> Ipv4 {
    for (;;) {
      Ipv4 ip{rng.uniform_u32()};
      const bool listed = std::any_of(profile.dst_hosts.begin(), profile.dst_hosts.end(),
                                      [&](Ipv4 host) { return host == ip; });
      if (!listed) return ip;
    }
  };

  std::vector<TrafficRecord> records;
  records.reserve(std::size_t(n_self + n_attack));
  for (int i = 0; i < n_self; ++i) {
    records.push_back(TrafficRecord{.packet = self_record(), .labeled_nonself = false});
  }
  for (int i = 0; i < n_attack; ++i) {
    PacketSignature p = self_record();
    // A zero-bit prefix trusts every source address, so that violation
    // aspect is unavailable.
    const int aspect = profile.src_prefix_bits == 0 ? rng.uniform_int(1, 2)
                                                    : rng.uniform_int(0, 2);
    switch (aspect) {
      case 0: p.src_ip = foreign_source(); break;
      case 1: unlisted_service(p); break;
      default: p.dst_ip = unlisted_destination(); break;
    }
    records.push_back(TrafficRecord{.packet = p, .labeled_nonself = true});
  }
  return TrafficLog(std::move(records));
}

}  // namespace aistk
