#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gplan/ground.hpp"
#include "gplan/novelty.hpp"

namespace gplan {

enum class Variant { iw, aiw, baiw, caiw };

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);
// iw -> identity, aiw/caiw -> type, baiw -> base.
Reduction reduction_for(Variant v);

struct LookaheadConfig {
  static constexpr std::size_t kDefaultCapacity = 1000;
  static constexpr std::size_t kDefaultMaxStates = 100000;

  Variant variant = Variant::aiw;
  int width = 1;
  // Per-depth retention limit; only used by caiw, which defaults to 1000.
  std::optional<std::size_t> capacity;
  std::size_t max_states = kDefaultMaxStates;
  std::optional<std::size_t> max_depth;
  // Register the tuples of every generated successor. When false only
  // successors retained in the tree are registered, which differs only for
  // caiw (nodes dropped by the capacity cut stay unregistered).
  bool register_pruned = true;

  std::optional<std::size_t> effective_capacity() const;
  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct TreeNode {
  State state;
  std::size_t depth = 0;
  std::optional<std::size_t> parent;
  std::optional<GroundAction> action;  // action applied to the parent
};

// Breadth-first tree of novel states. nodes[0] is the root; node indices are
// non-decreasing in depth and no two nodes hold the same state.
struct LookaheadTree {
  std::vector<TreeNode> nodes;
  std::size_t seen_size = 0;  // novelty table size when the search ended
  std::size_t generated = 0;  // successors generated, pruned or not
  bool truncated = false;     // a state or depth cap stopped the search

  std::size_t max_depth() const { return nodes.empty() ? 0 : nodes.back().depth; }
  const State& root() const { return nodes.front().state; }
};

LookaheadTree lookahead(const State& root, const Task& task, const LookaheadConfig& cfg);

// Every node except the root, in BFS order.
std::vector<std::size_t> jump_candidates(const LookaheadTree& tree);

// Actions along the parent chain from the root to `node`. Throws
// std::out_of_range for an invalid index.
std::vector<GroundAction> extract_plan(const LookaheadTree& tree, std::size_t node);

}  // namespace gplan
