#include <deque>
#include <limits>

#include "gplan/policy.hpp"

namespace gplan {

std::vector<double> ZeroScorer::score(const ScoringRequest& request) {
  return std::vector<double>(request.candidates.size(), 0.0);
}

OracleScorer::OracleScorer(const Task& task, const State& from, std::size_t max_states) {
  std::vector<State> states{from};
  std::vector<std::vector<std::size_t>> predecessors(1);
  index_.emplace(from, 0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State current = states[i];
    for (const GroundAction& a : applicable_actions(current, task)) {
      State next = apply(current, a);
      auto [it, inserted] = index_.emplace(next, states.size());
      if (inserted) {
        if (states.size() >= max_states)
          throw StateSpaceTooLarge("reachable state space exceeds " + std::to_string(max_states) +
                                   " states");
        states.push_back(std::move(next));
        predecessors.emplace_back();
      }
      predecessors[it->second].push_back(i);
    }
  }

  dist_.assign(states.size(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (is_goal(states[i], task)) {
      dist_[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : predecessors[v]) {
      if (dist_[u] >= 0) continue;
      dist_[u] = dist_[v] + 1;
      queue.push_back(u);
    }
  }
}

std::optional<std::size_t> OracleScorer::distance(const State& s) const {
  auto it = index_.find(s);
  if (it == index_.end())
    throw ScorerError("oracle queried with a state outside the enumerated space");
  if (dist_[it->second] < 0) return std::nullopt;
  return static_cast<std::size_t>(dist_[it->second]);
}

std::vector<double> OracleScorer::score(const ScoringRequest& request) {
  std::vector<double> q;
  q.reserve(request.candidates.size());
  for (const State& s : request.candidates) {
    auto d = distance(s);
    q.push_back(d ? -static_cast<double>(*d) : -std::numeric_limits<double>::infinity());
  }
  return q;
}

std::unique_ptr<Scorer> make_scorer(const std::string& spec, const Task& task) {
  if (spec == "zero") return std::make_unique<ZeroScorer>();
  if (spec == "oracle") return std::make_unique<OracleScorer>(task);
  if (spec.rfind("cmd:", 0) == 0) return StreamScorer::spawn(spec.substr(4));
  if (spec.rfind("unix:", 0) == 0) return StreamScorer::connect_unix(spec.substr(5));
  throw std::invalid_argument("unknown scorer '" + spec +
                              "' (expected oracle, zero, cmd:<command> or unix:<path>)");
}

}  // namespace gplan
