#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "canonical.hpp"
#include "oracles.hpp"
#include "generators.hpp"
#include "gplan/encode.hpp"

using namespace gplan;
using namespace gplan::testing;
using nlohmann::json;

namespace {

using EdgeBag = std::map<std::pair<std::string, std::vector<NodeId>>, int>;

EdgeBag bag(const RelGraph& g) {
  EdgeBag b;
  for (const auto& e : g.edges) ++b[{e.label, e.nodes}];
  return b;
}

// Size of the multiset symmetric difference.
int bag_distance(const EdgeBag& a, const EdgeBag& b) {
  int d = 0;
  std::map<std::pair<std::string, std::vector<NodeId>>, int> all = a;
  for (const auto& [k, v] : b) all[k];
  for (const auto& [k, v] : all) {
    int x = a.count(k) ? a.at(k) : 0;
    int y = b.count(k) ? b.at(k) : 0;
    d += std::abs(x - y);
  }
  return d;
}

std::size_t count_label(const RelGraph& g, const std::string& label) {
  return static_cast<std::size_t>(std::count_if(
      g.edges.begin(), g.edges.end(), [&](const HyperEdge& e) { return e.label == label; }));
}

std::size_t count_kind(const RelGraph& g, NodeKind k) {
  return static_cast<std::size_t>(std::count_if(
      g.nodes.begin(), g.nodes.end(), [&](const GraphNode& n) { return n.kind == k; }));
}

// A copy of `task` with objects renamed and renumbered by `perm`.
struct Renamed {
  std::shared_ptr<Task> task;
  std::vector<ObjectId> perm;                 // old id -> new id
  std::map<std::string, std::string> back;   // new name -> old name
};

Renamed rename(const Task& task, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& objs = task.instance().objects;
  Renamed r;
  r.perm.resize(objs.size());
  for (ObjectId i = 0; i < objs.size(); ++i) r.perm[i] = i;
  std::shuffle(r.perm.begin(), r.perm.end(), rng);
  Instance inst = task.instance();
  for (ObjectId i = 0; i < objs.size(); ++i) {
    std::string fresh = "obj" + std::to_string(1000 + r.perm[i] * 7 + seed % 5);
    inst.objects[r.perm[i]] = {fresh, objs[i].type};
    r.back[fresh] = objs[i].name;
  }
  auto remap = [&](std::vector<GroundAtomSpec>& atoms) {
    for (auto& a : atoms)
      for (auto& o : a.args) o = r.perm[o];
    std::sort(atoms.begin(), atoms.end());
  };
  remap(inst.init);
  remap(inst.goal);
  r.task = std::make_shared<Task>(task.domain(), std::move(inst));
  return r;
}

State translate(const State& s, const Task& from, const Renamed& to) {
  std::vector<AtomId> out;
  for (AtomId a : s) {
    GroundAtom g = from.atoms().atom(a);
    for (auto& o : g.args) o = to.perm[o];
    out.push_back(to.task->atoms().intern(g.predicate, g.args));
  }
  return State(out);
}

std::string hash_original(const RelGraph& g) {
  return canonical_hash(g, [](const GraphNode& n) {
    return n.kind == NodeKind::object ? n.label : std::string();
  });
}

std::string hash_renamed(const RelGraph& g, const Renamed& r) {
  return canonical_hash(g, [&](const GraphNode& n) {
    return n.kind == NodeKind::object ? r.back.at(n.label) : std::string();
  });
}

std::string random_label(std::mt19937_64& rng) {
  static const std::vector<std::string> pool = {"on", "at@add", "@edge", "p'", "ünï", "q\"uote",
                                                "back\\slash", "tab\tx", "", "@action:move"};
  return pool[rng() % pool.size()] + std::to_string(rng() % 50);
}

RelGraph random_graph(std::mt19937_64& rng) {
  RelGraph g;
  g.meta.instance = random_label(rng);
  g.meta.encoding = static_cast<Encoding>(rng() % 6);
  if (rng() % 2) g.meta.root = "00ff" + std::to_string(rng() % 1000);
  const std::size_t n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) g.add_node(static_cast<NodeKind>(rng() % 4), random_label(rng));
  if (n > 0) {
    for (std::size_t e = rng() % 20; e > 0; --e) {
      HyperEdge edge{random_label(rng), {}};
      for (std::size_t k = rng() % 4; k > 0; --k) edge.nodes.push_back(static_cast<NodeId>(rng() % n));
      g.edges.push_back(std::move(edge));
    }
    for (std::size_t c = rng() % 5; c > 0; --c) g.candidates.push_back(static_cast<NodeId>(rng() % n));
  }
  return g;
}

}  // namespace

TEST_CASE("encoding names") {
  for (const char* name : {"state", "ext", "aa", "ad", "int", "intd"})
    CHECK(std::string(to_string(parse_encoding(name))) == name);
  CHECK_THROWS_AS(parse_encoding("gnn"), std::invalid_argument);
}

TEST_CASE("state encoding") {
  SUBCASE("empty state and goal") {
    auto task = task_from_text("blocksworld/domain.pddl", R"((define (problem e)
      (:domain blocksworld) (:objects a b) (:init) (:goal (and))))");
    RelGraph g = encode_state(State{}, *task);
    CHECK(g.nodes.size() == 2);
    CHECK(g.edges.empty());
    CHECK(g.candidates.empty());
  }
  SUBCASE("blocksworld fixture") {
    auto task = load_fixture("blocksworld/domain.pddl", "blocksworld/p3.pddl");
    RelGraph g = encode_state(task->initial_state(), *task);
    CHECK(g.edges.size() == 9);
    CHECK(count_label(g, "on@goal_false") == 1);
    CHECK(count_label(g, "ontable@goal_true") == 1);
    CHECK(g.nodes.size() == 3);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      CHECK(g.nodes[i].id == i);
      CHECK(g.nodes[i].label == task->instance().objects[i].name);
    }
    CHECK(g.meta.instance == "bw-3");
    CHECK(g.meta.encoding == Encoding::state);
  }
  SUBCASE("state equal to the goal") {
    auto task = load_fixture("blocksworld/domain.pddl", "blocksworld/p2.pddl");
    State s(task->goal());
    RelGraph g = encode_state(s, *task);
    CHECK(g.edges.size() == 2);
    CHECK(count_label(g, "on") == 1);
    CHECK(count_label(g, "on@goal_true") == 1);
    CHECK(g.edges[0].nodes == g.edges[1].nodes);
  }
}

TEST_CASE("external pairs") {
  auto task = load_fixture("delivery/domain.pddl", "delivery/p1.pddl");
  const State& s = task->initial_state();
  GraphPair same = encode_external(s, s, *task);
  CHECK(same.left.edges == same.right.edges);
  CHECK(same.left.nodes == same.right.nodes);
  CHECK(same.left.meta.encoding == Encoding::external);

  std::mt19937_64 rng(5);
  State cur = s;
  for (int step = 0; step < 30; ++step) {
    auto acts = applicable_actions(cur, *task);
    const GroundAction& a = acts[rng() % acts.size()];
    State next = apply(cur, a);
    GraphPair p = encode_external(cur, next, *task);
    CHECK(p.left.nodes == p.right.nodes);
    int expected = static_cast<int>(delta_size(cur, next) + 2 * goal_delta_size(cur, next, *task));
    CHECK(bag_distance(bag(p.left), bag(p.right)) == expected);
    CHECK(delta_size(cur, next) == a.add.size() - std::count_if(a.add.begin(), a.add.end(), [&](AtomId x) {
                                     return cur.contains(x);
                                   }) + a.del.size());
    cur = next;
  }
}

TEST_CASE("aggregated actions") {
  auto task = load_fixture("blocksworld/domain.pddl", "blocksworld/p3.pddl");
  const State& s = task->initial_state();
  auto acts = applicable_actions(s, *task);
  REQUIRE(acts.size() == 3);
  RelGraph g = encode_aa(s, acts, *task);
  RelGraph base = encode_state(s, *task);
  CHECK(count_kind(g, NodeKind::action) == 3);
  CHECK(count_label(g, "@action:pickup") == 3);
  CHECK(g.edges.size() == base.edges.size() + 3);
  REQUIRE(g.candidates.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(g.candidates[i] == 3 + i);
    CHECK(g.nodes[g.candidates[i]].label == task->action_name(acts[i]));
  }
  CHECK(g.edges[base.edges.size()].nodes != g.edges[base.edges.size() + 1].nodes);

  RelGraph none = encode_aa(s, {}, *task);
  CHECK(none.edges == base.edges);
  CHECK(none.candidates.empty());
}

TEST_CASE("aggregated delta on small trees") {
  auto task = load_fixture("blocksworld/domain.pddl", "blocksworld/p3.pddl");
  SUBCASE("root only") {
    LookaheadTree t;
    t.nodes.push_back({task->initial_state(), 0, std::nullopt, std::nullopt});
    RelGraph g = encode_ad(t, *task);
    RelGraph s = encode_state(task->initial_state(), *task);
    CHECK(g.nodes == s.nodes);
    CHECK(g.edges == s.edges);
    CHECK(g.candidates.empty());
  }
  SUBCASE("single child adding one non-goal atom") {
    auto sw = task_from_text("switches/domain.pddl", switches_problem(2));
    auto acts = applicable_actions(sw->initial_state(), *sw);
    LookaheadTree t;
    t.nodes.push_back({sw->initial_state(), 0, std::nullopt, std::nullopt});
    t.nodes.push_back({apply(sw->initial_state(), acts[0]), 1, 0, acts[0]});
    RelGraph g = encode_ad(t, *sw);
    CHECK(count_kind(g, NodeKind::state) == 1);
    CHECK(count_kind(g, NodeKind::depth) == 1);
    CHECK(count_label(g, "on@add") == 1);
    CHECK(count_label(g, "on@del") == 0);
    CHECK(count_label(g, "on@add_goal") == 0);
    CHECK(count_label(g, labels::root_edge) == 1);
    CHECK(count_label(g, labels::tree_edge) == 0);
    CHECK(count_label(g, labels::depth_order) == 0);
    CHECK(count_label(g, labels::state_depth) == 1);
    CHECK(g.candidates == std::vector<NodeId>{ad_state_node(*sw, 1)});
  }
  SUBCASE("full tree") {
    auto tree = lookahead(task->initial_state(), *task, {});
    RelGraph g = encode_ad(tree, *task);
    CHECK(g.edges.size() == ad_expected_edges(tree, *task));
    CHECK(count_kind(g, NodeKind::state) == tree.nodes.size() - 1);
    CHECK(count_kind(g, NodeKind::depth) == tree.max_depth());
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
      CHECK(g.candidates[i - 1] == ad_state_node(*task, i));
      CHECK(g.nodes[ad_state_node(*task, i)].kind == NodeKind::state);
    }
    for (const auto& e : g.edges) {
      if (e.label == labels::depth_order) {
        REQUIRE(e.nodes.size() == 2);
        CHECK(e.nodes[0] < e.nodes[1]);
      }
      if (e.label.ends_with("@add") || e.label.ends_with("@del"))
        CHECK(g.nodes[e.nodes[0]].kind == NodeKind::state);
    }
  }
}

TEST_CASE("aggregated delta count identity on random trees") {
  std::mt19937_64 rng(2024);
  const std::vector<std::pair<const char*, std::string>> instances = {
      {"blocksworld/domain.pddl", blocksworld_problem(5, 1)},
      {"delivery/domain.pddl", delivery_problem(4, 3, 2, 2)},
      {"spanner/domain.pddl", spanner_problem(5, 3, 2, 3)},
      {"gripper/domain.pddl", gripper_problem(4, 4)},
  };
  for (int i = 0; i < 100; ++i) {
    const auto& [d, p] = instances[i % instances.size()];
    auto task = task_from_text(d, p);
    LookaheadTree tree = random_tree(*task, rng);
    RelGraph g = encode_ad(tree, *task);
    REQUIRE(g.edges.size() == ad_expected_edges(tree, *task));
  }
}

TEST_CASE("aggregated delta saves the root re-encoding") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto task = task_from_text("delivery/domain.pddl", delivery_problem(5, 5, 3, seed));
    LookaheadConfig cfg;
    cfg.variant = Variant::iw;
    auto tree = lookahead(task->initial_state(), *task, cfg);
    REQUIRE(tree.nodes.size() >= 20);
    const State& s = tree.root();
    std::size_t external = 0;
    for (std::size_t i : jump_candidates(tree)) {
      GraphPair p = encode_external(s, tree.nodes[i].state, *task);
      external += p.left.edges.size() + p.right.edges.size();
    }
    const std::size_t ad = encode_ad(tree, *task).edges.size();
    const std::size_t root_units = s.size() + task->goal().size();
    CHECK(external >= ad + (tree.nodes.size() - 2) * root_units);
    CHECK(ad * 2 < external);
  }
}

TEST_CASE("internal encodings") {
  auto task = load_fixture("gripper/domain.pddl", "gripper/p2.pddl");
  const State& s = task->initial_state();
  const std::size_t rs = s.size() + task->goal().size();

  RelGraph same = encode_internal(s, s, *task);
  CHECK(same.edges.size() == 2 * rs);
  for (std::size_t i = 0; i < rs; ++i) {
    CHECK(same.edges[rs + i].label == same.edges[i].label + "'");
    CHECK(same.edges[rs + i].nodes == same.edges[i].nodes);
    CHECK_FALSE(same.edges[i].label.ends_with("'"));
  }
  CHECK(encode_internal_delta(s, s, *task).edges == encode_state(s, *task).edges);

  std::mt19937_64 rng(11);
  State cur = s;
  for (int step = 0; step < 30; ++step) {
    auto acts = applicable_actions(cur, *task);
    State next = apply(cur, acts[rng() % acts.size()]);
    RelGraph in = encode_internal(cur, next, *task);
    CHECK(in.edges.size() == rs - s.size() + cur.size() + next.size() + task->goal().size());
    CHECK(in.nodes.size() == task->instance().objects.size());

    RelGraph d = encode_internal_delta(cur, next, *task);
    const std::size_t base = cur.size() + task->goal().size();
    CHECK(d.edges.size() == base + delta_size(cur, next) + goal_delta_size(cur, next, *task));
    for (std::size_t i = base; i < d.edges.size(); ++i) {
      std::string pred = d.edges[i].label.substr(0, d.edges[i].label.find('@'));
      CHECK(d.edges[i].nodes.size() == task->domain().predicates[*task->domain().find_predicate(pred)].arity());
    }
    CHECK(count_kind(d, NodeKind::state) == 0);
    cur = next;
  }
}

TEST_CASE("renaming objects gives isomorphic graphs") {
  const std::vector<std::pair<const char*, std::string>> instances = {
      {"blocksworld/domain.pddl", blocksworld_problem(4, 8)},
      {"spanner/domain.pddl", spanner_problem(3, 2, 2, 1)},
      {"gripper/domain.pddl", gripper_problem(3, 2)},
  };
  for (const auto& [d, p] : instances) {
    auto task = task_from_text(d, p);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Renamed r = rename(*task, seed);
      const State& s = task->initial_state();
      const State s2 = translate(s, *task, r);
      CHECK(s2 == r.task->initial_state());

      CHECK(hash_original(encode_state(s, *task)) == hash_renamed(encode_state(s2, *r.task), r));

      auto acts = applicable_actions(s, *task);
      std::vector<GroundAction> acts2;
      for (const auto& a : acts) {
        std::vector<ObjectId> args;
        for (ObjectId o : a.args) args.push_back(r.perm[o]);
        acts2.push_back(r.task->ground(a.schema, args));
      }
      CHECK(hash_original(encode_aa(s, acts, *task)) == hash_renamed(encode_aa(s2, acts2, *r.task), r));

      auto tree = lookahead(s, *task, {});
      LookaheadTree tree2 = tree;
      for (auto& n : tree2.nodes) n.state = translate(n.state, *task, r);
      CHECK(hash_original(encode_ad(tree, *task)) == hash_renamed(encode_ad(tree2, *r.task), r));

      if (tree.nodes.size() > 1) {
        const State& c = tree.nodes.back().state;
        const State c2 = translate(c, *task, r);
        CHECK(hash_original(encode_internal(s, c, *task)) ==
              hash_renamed(encode_internal(s2, c2, *r.task), r));
        CHECK(hash_original(encode_internal_delta(s, c, *task)) ==
              hash_renamed(encode_internal_delta(s2, c2, *r.task), r));
        GraphPair e1 = encode_external(s, c, *task);
        GraphPair e2 = encode_external(s2, c2, *r.task);
        CHECK(hash_original(e1.right) == hash_renamed(e2.right, r));
      }

      // A different state must not collide.
      if (tree.nodes.size() > 1)
        CHECK(hash_original(encode_state(tree.nodes[1].state, *task)) !=
              hash_original(encode_state(s, *task)));
    }
  }
}

TEST_CASE("wire schema") {
  auto task = load_fixture("blocksworld/domain.pddl", "blocksworld/p2.pddl");
  auto tree = lookahead(task->initial_state(), *task, {});
  json j = to_json(encode_ad(tree, *task));
  CHECK(j["v"] == 1);
  CHECK(j["kind"] == "graph");
  CHECK(j["meta"]["instance"] == "bw-2");
  CHECK(j["meta"]["encoding"] == "ad");
  CHECK(j["nodes"][0] == json::array({0, "object", "a"}));
  CHECK(j["edges"][0] == json::array({"ontable", json::array({0})}));
  CHECK(j["candidates"].size() == tree.nodes.size() - 1);
  for (const auto& n : j["nodes"]) {
    CHECK(n.size() == 3);
    const std::string kind = n[1];
    CHECK((kind == "object" || kind == "state" || kind == "depth"));
  }

  json pair = to_json(encode_external(task->initial_state(), tree.nodes[1].state, *task));
  CHECK(pair["kind"] == "graph_pair");
  CHECK(pair["left"]["kind"] == "graph");
  CHECK(pair["right"]["meta"]["encoding"] == "ext");
}

TEST_CASE("round trip of random graphs") {
  std::mt19937_64 rng(99);
  std::stringstream stream;
  std::vector<GraphRecord> written;
  for (int i = 0; i < 1000; ++i) {
    GraphRecord r = rng() % 4 == 0 ? GraphRecord(GraphPair{random_graph(rng), random_graph(rng)})
                                   : GraphRecord(random_graph(rng));
    serialize_graph(r, stream);
    written.push_back(std::move(r));
  }
  std::vector<GraphRecord> read = deserialize_graphs(stream);
  REQUIRE(read.size() == written.size());
  for (std::size_t i = 0; i < read.size(); ++i) CHECK(read[i] == written[i]);
}

TEST_CASE("round trip of encoder output") {
  auto task = load_fixture("spanner/domain.pddl", "spanner/appendix.pddl");
  auto tree = lookahead(task->initial_state(), *task, {});
  std::stringstream stream;
  RelGraph ad = encode_ad(tree, *task);
  RelGraph empty = encode_state(task->initial_state(), *task);
  serialize_graph(ad, stream);
  serialize_graph(empty, stream);
  auto back = deserialize_graphs(stream);
  REQUIRE(back.size() == 2);
  CHECK(std::get<RelGraph>(back[0]) == ad);
  CHECK(std::get<RelGraph>(back[1]) == empty);
  CHECK(std::get<RelGraph>(back[1]).candidates.empty());
}

TEST_CASE("malformed records") {
  auto bad = [](const std::string& line) {
    CHECK_THROWS_AS(parse_record(line), MalformedRecord);
  };
  const std::string ok =
      R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[[0,"object","a"]],"edges":[["p",[0]]],"candidates":[0]})";
  CHECK_NOTHROW(parse_record(ok));
  bad(R"({"v":1,"kind":"tree","meta":{"instance":"x","encoding":"state"},"nodes":[],"edges":[],"candidates":[]})");
  bad(R"({"v":2,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[],"edges":[],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"gnn"},"nodes":[],"edges":[],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[[0,"blob","a"]],"edges":[],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[[0,"object","a"],[0,"object","b"]],"edges":[],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[[0,"object","a"]],"edges":[["p",[1]]],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[[0,"object","a"]],"edges":[],"candidates":[3]})");
  bad(R"({"v":1,"kind":"graph","meta":{"instance":"x","encoding":"state"},"nodes":[[-1,"object","a"]],"edges":[],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph","nodes":[],"edges":[],"candidates":[]})");
  bad(R"({"v":1,"kind":"graph_pair","left":{}})");
  bad(R"([1,2,3])");
  bad(R"({"v":1,"kind":"graph",)");

  std::stringstream stream(ok + "\n\n" + R"({"v":1,"kind":"graph" oops})" + "\n");
  try {
    deserialize_graphs(stream);
    FAIL("expected a malformed record");
  } catch (const MalformedRecord& e) {
    CHECK(e.offset() >= ok.size() + 2);
    CHECK(e.offset() < ok.size() + 2 + 30);
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}
