#include "canonical.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

namespace gplan::testing {

std::string canonical_hash(const RelGraph& g, const NodeLabel& label) {
  std::unordered_map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i].id] = i;

  std::vector<std::string> colour(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    colour[i] = std::string(to_string(g.nodes[i].kind)) + ":" + label(g.nodes[i]);

  auto edge_signature = [&](const HyperEdge& e) {
    std::string s = e.label + "(";
    for (NodeId v : e.nodes) s += colour[index.at(v)] + ",";
    return s + ")";
  };

  const std::hash<std::string> h;
  for (std::size_t round = 0; round < g.nodes.size() + 1; ++round) {
    std::vector<std::vector<std::string>> incident(g.nodes.size());
    for (const auto& e : g.edges) {
      std::string sig = edge_signature(e);
      for (std::size_t p = 0; p < e.nodes.size(); ++p)
        incident[index.at(e.nodes[p])].push_back(std::to_string(p) + "@" + sig);
    }
    std::vector<std::string> next(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      std::sort(incident[i].begin(), incident[i].end());
      std::string s = colour[i];
      for (const auto& x : incident[i]) s += "|" + x;
      next[i] = std::to_string(h(s));
    }
    auto classes = [](std::vector<std::string> c) {
      std::sort(c.begin(), c.end());
      return std::unique(c.begin(), c.end()) - c.begin();
    };
    bool stable = classes(next) == classes(colour);
    colour = std::move(next);
    if (stable) break;
  }

  std::vector<std::string> parts;
  for (const auto& c : colour) parts.push_back("n" + c);
  for (const auto& e : g.edges) parts.push_back("e" + edge_signature(e));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += p + ";";
  out += "candidates";
  for (NodeId c : g.candidates) out += ":" + colour[index.at(c)];
  return std::to_string(h(out)) + "/" + std::to_string(parts.size());
}

}  // namespace gplan::testing
