#include "deanon/snap.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace deanon {

nlohmann::json to_json(const SnapManifest& m) {
  return {{"source", m.source},
          {"lines", m.lines},
          {"comment_lines", m.comment_lines},
          {"blank_lines", m.blank_lines},
          {"duplicate_entries", m.duplicate_entries},
          {"raw_users", m.raw_users},
          {"raw_groups", m.raw_groups},
          {"raw_memberships", m.raw_memberships},
          {"min_group_size", m.min_group_size},
          {"min_user_memberships", m.min_user_memberships},
          {"groups_after_size_filter", m.groups_after_size_filter},
          {"filtered_users", m.filtered_users},
          {"filtered_groups", m.filtered_groups},
          {"filtered_memberships", m.filtered_memberships},
          {"filter_order", m.filter_order}};
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SnapGraph parse_snap_communities(std::istream& in, std::size_t min_group_size, std::size_t min_user_memberships,
                                 const std::string& source) {
  SnapManifest manifest;
  manifest.source = source;
  manifest.min_group_size = min_group_size;
  manifest.min_user_memberships = min_user_memberships;

  std::vector<std::vector<std::uint64_t>> groups;
  std::vector<std::size_t> lines_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = 0;
    while (pos < line.size() && is_space(line[pos])) ++pos;
    if (pos == line.size()) {
      ++manifest.blank_lines;
      continue;
    }
    if (line[pos] == '#') {
      ++manifest.comment_lines;
      continue;
    }
    std::vector<std::uint64_t> ids;
    while (pos < line.size()) {
      std::size_t end = pos;
      while (end < line.size() && !is_space(line[end])) ++end;
      std::uint64_t id = 0;
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      auto [ptr, ec] = std::from_chars(first, last, id);
      if (ec != std::errc() || ptr != last)
        parse_error(source, line_no, "expected a non-negative integer user id, got '" + std::string(first, last) + "'");
      ids.push_back(id);
      pos = end;
      while (pos < line.size() && is_space(line[pos])) ++pos;
    }
    std::sort(ids.begin(), ids.end());
    const auto unique_end = std::unique(ids.begin(), ids.end());
    manifest.duplicate_entries += static_cast<std::size_t>(ids.end() - unique_end);
    ids.erase(unique_end, ids.end());
    manifest.raw_memberships += ids.size();
    groups.push_back(std::move(ids));
    lines_of.push_back(line_no);
  }
  if (in.bad()) throw std::runtime_error(source + ": read error");
  manifest.lines = line_no;
  manifest.raw_groups = groups.size();

  {
    std::vector<std::uint64_t> all;
    all.reserve(manifest.raw_memberships);
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    manifest.raw_users = static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  }

  // Group filter.
  std::vector<std::size_t> kept;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() >= min_group_size) kept.push_back(g);
  }
  manifest.groups_after_size_filter = kept.size();

  // User filter over surviving groups.
  std::vector<std::uint64_t> members;
  for (std::size_t g : kept) members.insert(members.end(), groups[g].begin(), groups[g].end());
  std::sort(members.begin(), members.end());
  std::vector<std::uint64_t> user_ids;
  for (std::size_t i = 0; i < members.size();) {
    std::size_t j = i;
    while (j < members.size() && members[j] == members[i]) ++j;
    if (j - i >= min_user_memberships) user_ids.push_back(members[i]);
    i = j;
  }

  // Relabel densely and drop groups left empty.
  std::vector<std::vector<UserId>> dense;
  std::vector<std::size_t> group_lines;
  for (std::size_t g : kept) {
    std::vector<UserId> row;
    for (std::uint64_t id : groups[g]) {
      auto it = std::lower_bound(user_ids.begin(), user_ids.end(), id);
      if (it != user_ids.end() && *it == id) row.push_back(static_cast<UserId>(it - user_ids.begin()));
    }
    if (row.empty()) continue;
    manifest.filtered_memberships += row.size();
    dense.push_back(std::move(row));
    group_lines.push_back(lines_of[g]);
  }
  manifest.filtered_users = user_ids.size();
  manifest.filtered_groups = dense.size();
  if (dense.empty() || user_ids.empty()) throw std::runtime_error(source + ": no groups or users survive the filters");

  SnapGraph out;
  out.graph = BipartiteGraph::from_members(user_ids.size(), std::move(dense));
  out.user_ids = std::move(user_ids);
  out.group_lines = std::move(group_lines);
  out.manifest = std::move(manifest);
  return out;
}

SnapGraph read_snap_communities(const std::string& path, std::size_t min_group_size,
                                std::size_t min_user_memberships) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open community file");
  return parse_snap_communities(in, min_group_size, min_user_memberships, path);
}

void write_snap_communities(const std::string& path, const BipartiteGraph& graph,
                            const std::vector<std::uint64_t>& user_ids) {
  if (!user_ids.empty() && user_ids.size() != graph.num_users())
    throw std::invalid_argument("write_snap_communities: one id per user required");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (GroupId j = 0; j < graph.num_groups(); ++j) {
    bool first = true;
    for (UserId k : graph.members(j)) {
      if (!first) out << '\t';
      out << (user_ids.empty() ? static_cast<std::uint64_t>(k) : user_ids[k]);
      first = false;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace deanon
