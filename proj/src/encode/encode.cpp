#include "gplan/encode.hpp"

#include <algorithm>
#include <cstdio>

namespace gplan {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::object: return "object";
    case NodeKind::state: return "state";
    case NodeKind::depth: return "depth";
    case NodeKind::action: return "action";
  }
  return "?";
}

const char* to_string(Encoding e) {
  switch (e) {
    case Encoding::state: return "state";
    case Encoding::external: return "ext";
    case Encoding::aggregated_actions: return "aa";
    case Encoding::aggregated_delta: return "ad";
    case Encoding::internal: return "int";
    case Encoding::internal_delta: return "intd";
  }
  return "?";
}

Encoding parse_encoding(const std::string& n) {
  if (n == "state") return Encoding::state;
  if (n == "ext") return Encoding::external;
  if (n == "aa") return Encoding::aggregated_actions;
  if (n == "ad") return Encoding::aggregated_delta;
  if (n == "int") return Encoding::internal;
  if (n == "intd") return Encoding::internal_delta;
  throw std::invalid_argument("unknown encoding '" + n + "'");
}

NodeId RelGraph::add_node(NodeKind kind, std::string label) {
  auto id = static_cast<NodeId>(nodes.size());
  nodes.push_back({id, kind, std::move(label)});
  return id;
}

namespace labels {
std::string goal_true(const std::string& p) { return p + "@goal_true"; }
std::string goal_false(const std::string& p) { return p + "@goal_false"; }
std::string added(const std::string& p) { return p + "@add"; }
std::string deleted(const std::string& p) { return p + "@del"; }
std::string added_goal(const std::string& p) { return p + "@add_goal"; }
std::string deleted_goal(const std::string& p) { return p + "@del_goal"; }
std::string action(const std::string& schema) { return "@action:" + schema; }
std::string primed(const std::string& label) { return label + "'"; }
}  // namespace labels

namespace {

std::string hex_hash(const State& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(s.hash()));
  return buf;
}

RelGraph object_graph(const Task& task, Encoding enc, const State& root) {
  RelGraph g;
  g.meta = {task.instance().name, enc, hex_hash(root)};
  for (const auto& o : task.instance().objects) g.add_node(NodeKind::object, o.name);
  return g;
}

// Edge over the atom's arguments, optionally anchored at `anchor`.
void add_atom_edge(RelGraph& g, std::string label, const GroundAtom& atom,
                   std::optional<NodeId> anchor = std::nullopt) {
  HyperEdge e{std::move(label), {}};
  if (anchor) e.nodes.push_back(*anchor);
  for (ObjectId o : atom.args) e.nodes.push_back(o);
  g.edges.push_back(std::move(e));
}

const std::string& pred_name(const Task& task, const GroundAtom& a) {
  return task.domain().predicates[a.predicate].name;
}

using Relabel = std::string (*)(const std::string&);
std::string same(const std::string& s) { return s; }

void add_state_edges(RelGraph& g, const State& s, const Task& task, Relabel relabel) {
  for (AtomId id : s) {
    GroundAtom a = task.atoms().atom(id);
    add_atom_edge(g, relabel(pred_name(task, a)), a);
  }
  for (AtomId id : task.goal()) {
    GroundAtom a = task.atoms().atom(id);
    const std::string& p = pred_name(task, a);
    add_atom_edge(g, relabel(s.contains(id) ? labels::goal_true(p) : labels::goal_false(p)), a);
  }
}

// P^+, P^-, P^+_G, P^-_G edges for succ relative to root.
void add_delta_edges(RelGraph& g, const State& root, const State& succ, const Task& task,
                     std::optional<NodeId> anchor) {
  std::vector<AtomId> added, deleted;
  std::set_difference(succ.begin(), succ.end(), root.begin(), root.end(),
                      std::back_inserter(added));
  std::set_difference(root.begin(), root.end(), succ.begin(), succ.end(),
                      std::back_inserter(deleted));
  for (AtomId id : added) {
    GroundAtom a = task.atoms().atom(id);
    add_atom_edge(g, labels::added(pred_name(task, a)), a, anchor);
  }
  for (AtomId id : deleted) {
    GroundAtom a = task.atoms().atom(id);
    add_atom_edge(g, labels::deleted(pred_name(task, a)), a, anchor);
  }
  for (AtomId id : added) {
    if (!task.is_goal_atom(id)) continue;
    GroundAtom a = task.atoms().atom(id);
    add_atom_edge(g, labels::added_goal(pred_name(task, a)), a, anchor);
  }
  for (AtomId id : deleted) {
    if (!task.is_goal_atom(id)) continue;
    GroundAtom a = task.atoms().atom(id);
    add_atom_edge(g, labels::deleted_goal(pred_name(task, a)), a, anchor);
  }
}

}  // namespace

RelGraph encode_state(const State& s, const Task& task) {
  RelGraph g = object_graph(task, Encoding::state, s);
  add_state_edges(g, s, task, &same);
  return g;
}

GraphPair encode_external(const State& s, const State& succ, const Task& task) {
  GraphPair p{encode_state(s, task), encode_state(succ, task)};
  p.left.meta.encoding = p.right.meta.encoding = Encoding::external;
  p.right.meta.root = p.left.meta.root;
  return p;
}

RelGraph encode_aa(const State& s, const std::vector<GroundAction>& actions, const Task& task) {
  RelGraph g = encode_state(s, task);
  g.meta.encoding = Encoding::aggregated_actions;
  for (const auto& a : actions) {
    NodeId node = g.add_node(NodeKind::action, task.action_name(a));
    HyperEdge e{labels::action(task.domain().actions[a.schema].name), {node}};
    for (ObjectId o : a.args) e.nodes.push_back(o);
    g.edges.push_back(std::move(e));
    g.candidates.push_back(node);
  }
  return g;
}

NodeId ad_state_node(const Task& task, std::size_t index) {
  return static_cast<NodeId>(task.instance().objects.size() + index - 1);
}

RelGraph encode_ad(const LookaheadTree& tree, const Task& task) {
  const State& root = tree.root();
  RelGraph g = encode_state(root, task);
  g.meta.encoding = Encoding::aggregated_delta;

  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    NodeId id = g.add_node(NodeKind::state, "s" + std::to_string(i));
    g.candidates.push_back(id);
  }
  const std::size_t d_max = tree.max_depth();
  std::vector<NodeId> depth_nodes(d_max + 1);
  for (std::size_t d = 1; d <= d_max; ++d)
    depth_nodes[d] = g.add_node(NodeKind::depth, "d" + std::to_string(d));

  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    NodeId self = ad_state_node(task, i);
    add_delta_edges(g, root, n.state, task, self);
    if (*n.parent == 0)
      g.edges.push_back({labels::root_edge, {self}});
    else
      g.edges.push_back({labels::tree_edge, {ad_state_node(task, *n.parent), self}});
    g.edges.push_back({labels::state_depth, {self, depth_nodes[n.depth]}});
  }
  for (std::size_t d = 1; d <= d_max; ++d)
    for (std::size_t e = d + 1; e <= d_max; ++e)
      g.edges.push_back({labels::depth_order, {depth_nodes[d], depth_nodes[e]}});
  return g;
}

RelGraph encode_internal(const State& s, const State& succ, const Task& task) {
  RelGraph g = encode_state(s, task);
  g.meta.encoding = Encoding::internal;
  add_state_edges(g, succ, task, &labels::primed);
  return g;
}

RelGraph encode_internal_delta(const State& s, const State& succ, const Task& task) {
  RelGraph g = encode_state(s, task);
  g.meta.encoding = Encoding::internal_delta;
  add_delta_edges(g, s, succ, task, std::nullopt);
  return g;
}

}  // namespace gplan
