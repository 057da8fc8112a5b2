#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "gplan/encode.hpp"
#include "gplan/ground.hpp"
#include "gplan/lookahead.hpp"

namespace gplan {

// One batch of candidates to be scored at a decision point.
struct ScoringRequest {
  const Task* task = nullptr;
  const State* current = nullptr;
  std::vector<State> candidates;
  // Builds the wire record (graph, graph_pair or batch); only remote scorers
  // call it.
  std::function<nlohmann::json()> wire;
};

class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Q-value provider: one value per candidate, higher is better.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(const ScoringRequest& request) = 0;
};

// Q = 0 for every candidate.
class ZeroScorer final : public Scorer {
 public:
  std::vector<double> score(const ScoringRequest& request) override;
};

class StateSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact oracle: Q(s') = -(shortest distance from s' to a goal state), and
// -infinity for states that cannot reach a goal. The reachable space from
// `from` is enumerated up front.
class OracleScorer final : public Scorer {
 public:
  static constexpr std::size_t kDefaultMaxStates = 100000;

  OracleScorer(const Task& task, const State& from, std::size_t max_states = kDefaultMaxStates);
  explicit OracleScorer(const Task& task, std::size_t max_states = kDefaultMaxStates)
      : OracleScorer(task, task.initial_state(), max_states) {}

  std::vector<double> score(const ScoringRequest& request) override;

  // Distance to the nearest goal, or nullopt when no goal is reachable.
  std::optional<std::size_t> distance(const State& s) const;
  std::size_t reachable_states() const { return index_.size(); }

 private:
  std::unordered_map<State, std::size_t, StateHash> index_;
  std::vector<std::int64_t> dist_;  // -1 = dead end
};

// Scorer behind a byte stream using length-prefixed frames:
//   <decimal byte length>\n<json payload>\n
// Requests are graph/graph_pair/batch records; responses are
//   {"v":1,"kind":"q","values":[...]} or {"v":1,"kind":"error","message":...}.
class StreamScorer final : public Scorer {
 public:
  StreamScorer(int read_fd, int write_fd, int child_pid = -1);
  ~StreamScorer() override;
  StreamScorer(const StreamScorer&) = delete;
  StreamScorer& operator=(const StreamScorer&) = delete;

  // Runs `command` through /bin/sh with its stdin/stdout attached.
  static std::unique_ptr<StreamScorer> spawn(const std::string& command);
  // Connects to a Unix domain socket.
  static std::unique_ptr<StreamScorer> connect_unix(const std::string& path);

  std::vector<double> score(const ScoringRequest& request) override;
  nlohmann::json round_trip(const nlohmann::json& request);

 private:
  int read_fd_;
  int write_fd_;
  int child_pid_;
};

void write_frame(int fd, const std::string& payload);
// nullopt on clean end of stream before a header.
std::optional<std::string> read_frame(int fd);

// "oracle", "zero", "cmd:<shell command>" or "unix:<socket path>".
std::unique_ptr<Scorer> make_scorer(const std::string& spec, const Task& task);

enum class PolicyMode { flat_aa, flat_ad, iw_jump };
const char* to_string(PolicyMode m);
PolicyMode parse_mode(const std::string& name);

enum class FailureReason { choice_limit, timeout, dead_end };
const char* to_string(FailureReason r);

struct EpisodeLimits {
  static constexpr std::size_t kDefaultMaxChoices = 1000;
  static constexpr std::size_t kJumpActionCap = 1000000;

  std::size_t max_choices = kDefaultMaxChoices;
  // Cap on primitive actions; defaults to max_choices in flat modes and
  // kJumpActionCap for jumps.
  std::optional<std::size_t> step_cap;
  std::chrono::milliseconds timeout{std::chrono::minutes(60)};
};

struct EpisodeConfig {
  PolicyMode mode = PolicyMode::iw_jump;
  // Wire encoding; defaults to aa for flat_aa and ad otherwise. iw_jump
  // accepts ad, ext, int and intd.
  std::optional<Encoding> encoding;
  LookaheadConfig lookahead;
  EpisodeLimits limits;

  Encoding effective_encoding() const;
  void validate() const;
};

struct EpisodeResult {
  bool solved = false;
  std::size_t choices = 0;
  std::vector<GroundAction> plan;
  std::chrono::duration<double> wall_time{0};
  std::optional<FailureReason> failure_reason;
  // Decision-point states in visiting order, starting with the initial state.
  std::vector<State> visited;
};

EpisodeResult run_episode(const Task& task, Scorer& scorer, const EpisodeConfig& cfg);

// JSON line: instance, mode, variant, solved, choices, plan_length, wall_time,
// failure_reason, plan.
nlohmann::json episode_record(const Task& task, const EpisodeConfig& cfg, const EpisodeResult& r);

// Applicable-action counts along a seeded uniform random walk of up to
// walk_len steps from the initial state, including the initial state.
std::vector<std::size_t> branching_samples(const Task& task, std::size_t walk_len,
                                           std::uint64_t seed);
double branching_factor(const Task& task, std::size_t walk_len = 10, std::uint64_t seed = 0);

}  // namespace gplan
