#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "gplan/policy.hpp"

namespace gplan {

using nlohmann::json;

const char* to_string(PolicyMode m) {
  switch (m) {
    case PolicyMode::flat_aa: return "flat_aa";
    case PolicyMode::flat_ad: return "flat_ad";
    case PolicyMode::iw_jump: return "iw_jump";
  }
  return "?";
}

PolicyMode parse_mode(const std::string& name) {
  if (name == "flat_aa") return PolicyMode::flat_aa;
  if (name == "flat_ad") return PolicyMode::flat_ad;
  if (name == "iw_jump") return PolicyMode::iw_jump;
  throw std::invalid_argument("unknown policy mode '" + name + "'");
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::choice_limit: return "choice_limit";
    case FailureReason::timeout: return "timeout";
    case FailureReason::dead_end: return "dead_end";
  }
  return "?";
}

Encoding EpisodeConfig::effective_encoding() const {
  if (encoding) return *encoding;
  return mode == PolicyMode::flat_aa ? Encoding::aggregated_actions : Encoding::aggregated_delta;
}

void EpisodeConfig::validate() const {
  lookahead.validate();
  const Encoding enc = effective_encoding();
  switch (mode) {
    case PolicyMode::flat_aa:
      if (enc != Encoding::aggregated_actions)
        throw std::invalid_argument("flat_aa requires the aa encoding");
      break;
    case PolicyMode::flat_ad:
      if (enc != Encoding::aggregated_delta)
        throw std::invalid_argument("flat_ad requires the ad encoding");
      break;
    case PolicyMode::iw_jump:
      if (enc == Encoding::aggregated_actions || enc == Encoding::state)
        throw std::invalid_argument(std::string("iw_jump cannot use the ") + to_string(enc) +
                                    " encoding");
      break;
  }
  if (limits.max_choices < 1) throw std::invalid_argument("max_choices must be at least 1");
}

namespace {

// The candidates available at one decision point. `tree` holds every
// candidate (flat modes use a depth-1 tree of distinct successors).
struct Decision {
  LookaheadTree tree;
  std::vector<GroundAction> actions;      // flat_aa only, aligned with `states`
  std::vector<State> states;              // all candidates, generation order
  std::vector<std::size_t> tree_index;    // candidate -> tree node (tree modes)
};

Decision flat_decision(const State& s, const Task& task, bool by_action) {
  Decision d;
  d.tree.nodes.push_back({s, 0, std::nullopt, std::nullopt});
  std::unordered_set<State, StateHash> seen{s};
  for (GroundAction& a : applicable_actions(s, task)) {
    State next = apply(s, a);
    if (by_action) {
      d.states.push_back(next);
      d.actions.push_back(std::move(a));
      continue;
    }
    if (!seen.insert(next).second) continue;
    d.tree_index.push_back(d.tree.nodes.size());
    d.states.push_back(next);
    d.tree.nodes.push_back({std::move(next), 1, 0, std::move(a)});
  }
  return d;
}

Decision jump_decision(const State& s, const Task& task, const LookaheadConfig& cfg) {
  Decision d;
  d.tree = lookahead(s, task, cfg);
  for (std::size_t i : jump_candidates(d.tree)) {
    d.tree_index.push_back(i);
    d.states.push_back(d.tree.nodes[i].state);
  }
  return d;
}

json wire_request(const Decision& d, const std::vector<std::size_t>& survivors, const Task& task,
                  const State& current, Encoding enc) {
  switch (enc) {
    case Encoding::aggregated_actions: {
      RelGraph g = encode_aa(current, d.actions, task);
      std::vector<NodeId> kept;
      for (std::size_t c : survivors) kept.push_back(g.candidates[c]);
      g.candidates = std::move(kept);
      return to_json(g);
    }
    case Encoding::aggregated_delta: {
      RelGraph g = encode_ad(d.tree, task);
      g.candidates.clear();
      for (std::size_t c : survivors) g.candidates.push_back(ad_state_node(task, d.tree_index[c]));
      return to_json(g);
    }
    default: break;
  }
  json items = json::array();
  for (std::size_t c : survivors) {
    const State& succ = d.states[c];
    if (enc == Encoding::external)
      items.push_back(to_json(encode_external(current, succ, task)));
    else if (enc == Encoding::internal)
      items.push_back(to_json(encode_internal(current, succ, task)));
    else
      items.push_back(to_json(encode_internal_delta(current, succ, task)));
  }
  return {{"v", 1}, {"kind", "batch"}, {"encoding", to_string(enc)}, {"items", std::move(items)}};
}

}  // namespace

EpisodeResult run_episode(const Task& task, Scorer& scorer, const EpisodeConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const Encoding enc = cfg.effective_encoding();
  const std::size_t step_cap = cfg.limits.step_cap.value_or(
      cfg.mode == PolicyMode::iw_jump ? EpisodeLimits::kJumpActionCap : cfg.limits.max_choices);

  EpisodeResult result;
  State current = task.initial_state();
  std::unordered_set<State, StateHash> visited{current};
  result.visited.push_back(current);

  auto finish = [&](std::optional<FailureReason> reason) {
    result.solved = !reason;
    result.failure_reason = reason;
    result.wall_time = clock::now() - start;
    return result;
  };

  for (;;) {
    if (is_goal(current, task)) return finish(std::nullopt);
    if (result.choices >= cfg.limits.max_choices) return finish(FailureReason::choice_limit);
    if (clock::now() - start > cfg.limits.timeout) return finish(FailureReason::timeout);

    Decision d = cfg.mode == PolicyMode::iw_jump
                     ? jump_decision(current, task, cfg.lookahead)
                     : flat_decision(current, task, cfg.mode == PolicyMode::flat_aa);
    if (clock::now() - start > cfg.limits.timeout) return finish(FailureReason::timeout);

    std::vector<std::size_t> survivors;
    for (std::size_t c = 0; c < d.states.size(); ++c)
      if (!visited.count(d.states[c])) survivors.push_back(c);
    if (survivors.empty()) return finish(FailureReason::dead_end);

    ScoringRequest request;
    request.task = &task;
    request.current = &current;
    for (std::size_t c : survivors) request.candidates.push_back(d.states[c]);
    request.wire = [&] { return wire_request(d, survivors, task, current, enc); };
    std::vector<double> q = scorer.score(request);
    if (q.size() != survivors.size())
      throw ScorerError("scorer returned " + std::to_string(q.size()) + " values for " +
                        std::to_string(survivors.size()) + " candidates");

    std::size_t best = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (std::isnan(q[i])) throw ScorerError("scorer returned NaN");
      if (q[i] > q[best]) best = i;
    }
    const std::size_t chosen = survivors[best];

    if (cfg.mode == PolicyMode::flat_aa) {
      result.plan.push_back(d.actions[chosen]);
    } else {
      for (auto& a : extract_plan(d.tree, d.tree_index[chosen])) result.plan.push_back(std::move(a));
    }
    current = d.states[chosen];
    visited.insert(current);
    result.visited.push_back(current);
    ++result.choices;
    if (result.plan.size() > step_cap && !is_goal(current, task))
      return finish(FailureReason::choice_limit);
  }
}

json episode_record(const Task& task, const EpisodeConfig& cfg, const EpisodeResult& r) {
  json plan = json::array();
  for (const auto& a : r.plan) plan.push_back(task.action_name(a));
  json rec = {{"instance", task.instance().name},
              {"mode", to_string(cfg.mode)},
              {"variant", to_string(cfg.lookahead.variant)},
              {"encoding", to_string(cfg.effective_encoding())},
              {"solved", r.solved},
              {"choices", r.choices},
              {"plan_length", r.plan.size()},
              {"wall_time", r.wall_time.count()},
              {"failure_reason", nullptr},
              {"plan", std::move(plan)}};
  if (r.failure_reason) rec["failure_reason"] = to_string(*r.failure_reason);
  return rec;
}

std::vector<std::size_t> branching_samples(const Task& task, std::size_t walk_len,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> samples;
  State s = task.initial_state();
  for (std::size_t step = 0;; ++step) {
    std::vector<GroundAction> actions = applicable_actions(s, task);
    samples.push_back(actions.size());
    if (actions.empty() || step == walk_len) break;
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    s = apply(s, actions[pick(rng)]);
  }
  return samples;
}

double branching_factor(const Task& task, std::size_t walk_len, std::uint64_t seed) {
  auto samples = branching_samples(task, walk_len, seed);
  double sum = 0;
  for (std::size_t c : samples) sum += static_cast<double>(c);
  return sum / static_cast<double>(samples.size());
}

}  // namespace gplan
