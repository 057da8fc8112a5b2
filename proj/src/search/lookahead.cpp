#include "gplan/lookahead.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace gplan {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::iw: return "iw";
    case Variant::aiw: return "aiw";
    case Variant::baiw: return "baiw";
    case Variant::caiw: return "caiw";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "iw") return Variant::iw;
  if (name == "aiw") return Variant::aiw;
  if (name == "baiw") return Variant::baiw;
  if (name == "caiw") return Variant::caiw;
  throw std::invalid_argument("unknown lookahead variant '" + name + "'");
}

Reduction reduction_for(Variant v) {
  switch (v) {
    case Variant::iw: return Reduction::identity;
    case Variant::aiw:
    case Variant::caiw: return Reduction::type;
    case Variant::baiw: return Reduction::base;
  }
  return Reduction::identity;
}

std::optional<std::size_t> LookaheadConfig::effective_capacity() const {
  if (variant != Variant::caiw) return std::nullopt;
  return capacity.value_or(kDefaultCapacity);
}

void LookaheadConfig::validate() const {
  if (width < 1 || width > 2) throw std::invalid_argument("width must be 1 or 2");
  if (capacity && *capacity < 1) throw std::invalid_argument("capacity must be at least 1");
  if (capacity && variant != Variant::caiw)
    throw std::invalid_argument("capacity only applies to the caiw variant");
  if (max_states < 1) throw std::invalid_argument("max_states must be at least 1");
}

namespace {

std::size_t satisfied_goals(const State& s, const Task& task) {
  std::size_t n = 0;
  for (AtomId g : task.goal()) n += s.contains(g) ? 1 : 0;
  return n;
}

}  // namespace

LookaheadTree lookahead(const State& root, const Task& task, const LookaheadConfig& cfg) {
  cfg.validate();
  const auto capacity = cfg.effective_capacity();

  LookaheadTree tree;
  NoveltyTable table(task, cfg.width, reduction_for(cfg.variant), cfg.register_pruned);
  std::unordered_set<State, StateHash> in_tree;

  table.check_and_register(root);
  in_tree.insert(root);
  tree.nodes.push_back({root, 0, std::nullopt, std::nullopt});

  std::vector<std::size_t> frontier;
  if (!is_goal(root, task)) frontier.push_back(0);

  std::size_t depth = 0;
  bool stop = false;
  while (!frontier.empty() && !stop) {
    if (cfg.max_depth && depth >= *cfg.max_depth) {
      tree.truncated = true;
      break;
    }
    const std::size_t layer_begin = tree.nodes.size();
    // Retained-only registration: the layer is checked against a scratch
    // copy and only nodes surviving the capacity cut enter the real table.
    std::optional<NoveltyTable> scratch;
    if (capacity && !cfg.register_pruned) scratch.emplace(table);
    NoveltyTable& active = scratch ? *scratch : table;
    for (std::size_t parent : frontier) {
      // Copy: push_back below may reallocate.
      const State parent_state = tree.nodes[parent].state;
      for (GroundAction& a : applicable_actions(parent_state, task)) {
        State succ = apply(parent_state, a);
        ++tree.generated;
        if (!active.check_and_register(succ)) continue;
        if (!in_tree.insert(succ).second) continue;
        if (tree.nodes.size() >= cfg.max_states) {
          tree.truncated = true;
          stop = true;
          break;
        }
        tree.nodes.push_back({std::move(succ), depth + 1, parent, std::move(a)});
      }
      if (stop) break;
    }

    if (capacity && tree.nodes.size() - layer_begin > *capacity) {
      // Keep the C best by satisfied goal count, first-seen on ties, and
      // preserve generation order among the kept nodes.
      std::vector<std::size_t> layer(tree.nodes.size() - layer_begin);
      std::iota(layer.begin(), layer.end(), layer_begin);
      std::vector<std::size_t> score(tree.nodes.size(), 0);
      for (std::size_t i : layer) score[i] = satisfied_goals(tree.nodes[i].state, task);
      std::stable_sort(layer.begin(), layer.end(),
                       [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
      layer.resize(*capacity);
      std::sort(layer.begin(), layer.end());
      std::vector<TreeNode> kept;
      kept.reserve(layer.size());
      for (std::size_t i : layer) kept.push_back(std::move(tree.nodes[i]));
      tree.nodes.resize(layer_begin);
      for (auto& n : kept) tree.nodes.push_back(std::move(n));
    }

    if (scratch)
      for (std::size_t i = layer_begin; i < tree.nodes.size(); ++i)
        table.register_state(tree.nodes[i].state);

    frontier.clear();
    bool goal_reached = false;
    for (std::size_t i = layer_begin; i < tree.nodes.size(); ++i) {
      frontier.push_back(i);
      goal_reached = goal_reached || is_goal(tree.nodes[i].state, task);
    }
    if (goal_reached) break;
    ++depth;
  }
  tree.seen_size = table.size();
  return tree;
}

std::vector<std::size_t> jump_candidates(const LookaheadTree& tree) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) out.push_back(i);
  return out;
}

std::vector<GroundAction> extract_plan(const LookaheadTree& tree, std::size_t node) {
  if (node >= tree.nodes.size())
    throw std::out_of_range("tree node " + std::to_string(node) + " does not exist");
  std::vector<GroundAction> plan;
  for (std::size_t n = node; tree.nodes[n].parent; n = *tree.nodes[n].parent)
    plan.push_back(*tree.nodes[n].action);
  std::reverse(plan.begin(), plan.end());
  return plan;
}

}  // namespace gplan
