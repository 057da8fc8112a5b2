#include <istream>
#include <ostream>
#include <unordered_set>

#include "gplan/encode.hpp"

namespace gplan {

using nlohmann::json;

MalformedRecord::MalformedRecord(const std::string& what, std::size_t offset)
    : std::runtime_error("malformed record at byte " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

json to_json(const RelGraph& g) {
  json meta = {{"instance", g.meta.instance}, {"encoding", to_string(g.meta.encoding)}};
  if (!g.meta.root.empty()) meta["root"] = g.meta.root;
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back(json::array({n.id, to_string(n.kind), n.label}));
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back(json::array({e.label, e.nodes}));
  return {{"v", 1},          {"kind", "graph"}, {"meta", std::move(meta)},
          {"nodes", nodes},  {"edges", edges},  {"candidates", g.candidates}};
}

json to_json(const GraphPair& p) {
  json j = {{"v", 1}, {"kind", "graph_pair"}, {"left", to_json(p.left)}, {"right", to_json(p.right)}};
  j["meta"] = j["left"]["meta"];
  return j;
}

json to_json(const GraphRecord& r) {
  return std::visit([](const auto& g) { return to_json(g); }, r);
}

namespace {

struct Reader {
  std::size_t offset;

  [[noreturn]] void fail(const std::string& what) const { throw MalformedRecord(what, offset); }

  const json& field(const json& j, const char* name) const {
    if (!j.is_object()) fail("expected a JSON object");
    auto it = j.find(name);
    if (it == j.end()) fail(std::string("missing field '") + name + "'");
    return *it;
  }

  std::string str(const json& j, const char* what) const {
    if (!j.is_string()) fail(std::string(what) + " must be a string");
    return j.get<std::string>();
  }

  NodeId id(const json& j) const {
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() > 0xffffffffull)
      fail("node ids must be non-negative integers");
    return j.get<NodeId>();
  }

  NodeKind kind(const std::string& k) const {
    if (k == "object") return NodeKind::object;
    if (k == "state") return NodeKind::state;
    if (k == "depth") return NodeKind::depth;
    if (k == "action") return NodeKind::action;
    fail("unknown node kind '" + k + "'");
  }

  void version(const json& j) const {
    const json& v = field(j, "v");
    if (!v.is_number_integer() || v.get<int>() != 1) fail("unsupported version");
  }

  RelGraph graph(const json& j) const {
    version(j);
    if (str(field(j, "kind"), "kind") != "graph") fail("expected kind 'graph'");
    RelGraph g;
    const json& meta = field(j, "meta");
    g.meta.instance = str(field(meta, "instance"), "meta.instance");
    try {
      g.meta.encoding = parse_encoding(str(field(meta, "encoding"), "meta.encoding"));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (auto it = meta.find("root"); it != meta.end()) g.meta.root = str(*it, "meta.root");

    std::unordered_set<NodeId> ids;
    const json& nodes = field(j, "nodes");
    if (!nodes.is_array()) fail("nodes must be an array");
    for (const json& n : nodes) {
      if (!n.is_array() || n.size() != 3) fail("a node must be [id, kind, label]");
      GraphNode node{id(n[0]), kind(str(n[1], "node kind")), str(n[2], "node label")};
      if (!ids.insert(node.id).second) fail("duplicate node id " + std::to_string(node.id));
      g.nodes.push_back(std::move(node));
    }
    const json& edges = field(j, "edges");
    if (!edges.is_array()) fail("edges must be an array");
    for (const json& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[1].is_array())
        fail("an edge must be [label, [ids...]]");
      HyperEdge edge{str(e[0], "edge label"), {}};
      for (const json& n : e[1]) {
        NodeId v = id(n);
        if (!ids.count(v)) fail("edge references unknown node " + std::to_string(v));
        edge.nodes.push_back(v);
      }
      g.edges.push_back(std::move(edge));
    }
    const json& cands = field(j, "candidates");
    if (!cands.is_array()) fail("candidates must be an array");
    for (const json& c : cands) {
      NodeId v = id(c);
      if (!ids.count(v)) fail("candidate references unknown node " + std::to_string(v));
      g.candidates.push_back(v);
    }
    return g;
  }

  GraphRecord record(const json& j) const {
    version(j);
    std::string k = str(field(j, "kind"), "kind");
    if (k == "graph") return graph(j);
    if (k == "graph_pair") return GraphPair{graph(field(j, "left")), graph(field(j, "right"))};
    fail("unknown record kind '" + k + "'");
  }
};

}  // namespace

GraphRecord record_from_json(const json& j, std::size_t offset) { return Reader{offset}.record(j); }

GraphRecord parse_record(const std::string& line, std::size_t offset) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedRecord(e.what(), offset + (e.byte > 0 ? e.byte - 1 : 0));
  }
  return record_from_json(j, offset);
}

void serialize_graph(const GraphRecord& record, std::ostream& sink) {
  sink << to_json(record).dump() << '\n';
}

std::vector<GraphRecord> deserialize_graphs(std::istream& source) {
  std::vector<GraphRecord> out;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(source, line)) {
    std::size_t next = offset + line.size() + 1;
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(parse_record(line, offset));
    offset = next;
  }
  return out;
}

}  // namespace gplan
