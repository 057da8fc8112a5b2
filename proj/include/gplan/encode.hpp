#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gplan/ground.hpp"
#include "gplan/lookahead.hpp"

namespace gplan {

using NodeId = std::uint32_t;

enum class NodeKind { object, state, depth, action };

// Wire names: state, ext, aa, ad, int, intd.
enum class Encoding { state, external, aggregated_actions, aggregated_delta, internal, internal_delta };

const char* to_string(NodeKind k);
const char* to_string(Encoding e);
Encoding parse_encoding(const std::string& wire_name);

struct GraphNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::object;
  std::string label;
  bool operator==(const GraphNode&) const = default;
};

struct HyperEdge {
  std::string label;
  std::vector<NodeId> nodes;
  bool operator==(const HyperEdge&) const = default;
};

struct GraphMeta {
  std::string instance;
  Encoding encoding = Encoding::state;
  std::string root;  // hex hash of the root state, optional on the wire
  bool operator==(const GraphMeta&) const = default;
};

// Typed relational graph. Object nodes come first and node i is object i of
// the instance. Candidates list node ids whose Q-values are requested.
struct RelGraph {
  GraphMeta meta;
  std::vector<GraphNode> nodes;
  std::vector<HyperEdge> edges;
  std::vector<NodeId> candidates;

  NodeId add_node(NodeKind kind, std::string label);
  bool operator==(const RelGraph&) const = default;
};

struct GraphPair {
  RelGraph left;
  RelGraph right;
  bool operator==(const GraphPair&) const = default;
};

using GraphRecord = std::variant<RelGraph, GraphPair>;

// Relation labels. Domain predicates keep their names; derived relations are
// suffixed so they can never collide with PDDL identifiers.
namespace labels {
std::string goal_true(const std::string& pred);    // P_{G,T}
std::string goal_false(const std::string& pred);   // P_{G,F}
std::string added(const std::string& pred);        // P^+
std::string deleted(const std::string& pred);      // P^-
std::string added_goal(const std::string& pred);   // P^+_G
std::string deleted_goal(const std::string& pred); // P^-_G
std::string action(const std::string& schema);     // P_A
std::string primed(const std::string& label);      // duplicated alphabet P'
inline const std::string tree_edge = "@edge";
inline const std::string root_edge = "@edge_root";
inline const std::string depth_order = "@depth_order";
inline const std::string state_depth = "@state_depth";
}  // namespace labels

// R^s: one node per object, one edge per atom of s, goal flags for every goal atom.
RelGraph encode_state(const State& s, const Task& task);

// Two state graphs with aligned object nodes.
GraphPair encode_external(const State& s, const State& succ, const Task& task);

// R^s plus one action node per ground action; candidates are the action nodes.
RelGraph encode_aa(const State& s, const std::vector<GroundAction>& actions, const Task& task);

// Whole-tree encoding: root in full, successors as anchored deltas, plus
// tree-edge, depth-order and state-depth relations. Candidates are the state
// nodes in BFS order.
RelGraph encode_ad(const LookaheadTree& tree, const Task& task);
// State node id for tree node `index` (index >= 1) in an encode_ad graph.
NodeId ad_state_node(const Task& task, std::size_t index);

// R^s plus the successor re-encoded in full under primed labels.
RelGraph encode_internal(const State& s, const State& succ, const Task& task);

// R^s plus un-anchored delta relations over object nodes.
RelGraph encode_internal_delta(const State& s, const State& succ, const Task& task);

// Wire format: one JSON object per line.
class MalformedRecord : public std::runtime_error {
 public:
  MalformedRecord(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

nlohmann::json to_json(const RelGraph& g);
nlohmann::json to_json(const GraphPair& p);
nlohmann::json to_json(const GraphRecord& r);
// `offset` is added to positions reported in MalformedRecord.
GraphRecord record_from_json(const nlohmann::json& j, std::size_t offset = 0);

void serialize_graph(const GraphRecord& record, std::ostream& sink);
// Reads one record per non-empty line until end of stream.
std::vector<GraphRecord> deserialize_graphs(std::istream& source);
GraphRecord parse_record(const std::string& line, std::size_t offset = 0);

}  // namespace gplan
