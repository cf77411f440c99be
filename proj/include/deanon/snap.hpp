#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "deanon/core.hpp"

namespace deanon {

/// Counts before and after filtering a community file.
struct SnapManifest {
  std::string source;
  std::size_t lines = 0;
  std::size_t comment_lines = 0;
  std::size_t blank_lines = 0;
  std::size_t duplicate_entries = 0;  // repeated ids within one community line
  std::size_t raw_users = 0;
  std::size_t raw_groups = 0;
  std::size_t raw_memberships = 0;
  std::size_t min_group_size = 0;
  std::size_t min_user_memberships = 0;
  std::size_t groups_after_size_filter = 0;
  std::size_t filtered_users = 0;
  std::size_t filtered_groups = 0;
  std::size_t filtered_memberships = 0;
  std::string filter_order = "group_size, then user_memberships over surviving groups, then drop empty groups";
};

nlohmann::json to_json(const SnapManifest& manifest);

struct SnapGraph {
  BipartiteGraph graph;
  /// Original id of each dense user index (ascending).
  std::vector<std::uint64_t> user_ids;
  /// 1-based source line of each dense group index.
  std::vector<std::size_t> group_lines;
  SnapManifest manifest;
};

/// Parses one community per line (whitespace-separated non-negative ids, `#`
/// comments, blank lines ignored), keeps groups with at least `min_group_size`
/// members, then users in at least `min_user_memberships` surviving groups,
/// then drops groups left empty. Throws std::runtime_error naming the line on
/// malformed input and when nothing survives.
SnapGraph parse_snap_communities(std::istream& in, std::size_t min_group_size, std::size_t min_user_memberships,
                                 const std::string& source = "<stream>");
SnapGraph read_snap_communities(const std::string& path, std::size_t min_group_size,
                                std::size_t min_user_memberships);

/// Writes a graph back in community format, one line per group, using `user_ids`
/// when given and dense indices otherwise.
void write_snap_communities(const std::string& path, const BipartiteGraph& graph,
                            const std::vector<std::uint64_t>& user_ids = {});

}  // namespace deanon
