#include "gplan/cli.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gplan/encode.hpp"
#include "gplan/lookahead.hpp"
#include "gplan/policy.hpp"

namespace gplan {

using nlohmann::json;

namespace {

struct RunConfig {
  std::string command;
  std::string domain;
  std::vector<std::string> instances;
  std::string variant = "aiw";
  int width = 1;
  std::optional<std::size_t> capacity;
  std::size_t max_states = LookaheadConfig::kDefaultMaxStates;
  std::optional<std::size_t> max_depth;
  bool register_kept_only = false;
  bool dump_states = false;
  std::string encoding;
  std::string scorer = "oracle";
  std::string mode = "iw_jump";
  std::size_t max_choices = EpisodeLimits::kDefaultMaxChoices;
  std::optional<std::size_t> step_cap;
  double timeout_s = 3600;
  std::size_t walk_len = 10;
  std::uint64_t seed = 0;
  std::string output;
  bool pretty = false;
  unsigned jobs = 1;

  LookaheadConfig lookahead() const {
    LookaheadConfig c;
    c.variant = parse_variant(variant);
    c.width = width;
    c.capacity = capacity;
    c.max_states = max_states;
    c.max_depth = max_depth;
    c.register_pruned = !register_kept_only;
    c.validate();
    return c;
  }
};

// Output of one instance: records plus whether it counts as a failure.
struct InstanceOutput {
  std::vector<json> records;
  bool failed = false;
  std::string error;
};

using Command = InstanceOutput (*)(const RunConfig&, const Domain&, const std::string&);

std::shared_ptr<Task> load_task(const Domain& domain, const std::string& path) {
  return std::make_shared<Task>(domain, load_instance(path, domain));
}

InstanceOutput cmd_lookahead(const RunConfig& cfg, const Domain& domain, const std::string& path) {
  auto task = load_task(domain, path);
  LookaheadConfig lc = cfg.lookahead();
  auto start = std::chrono::steady_clock::now();
  LookaheadTree tree = lookahead(task->initial_state(), *task, lc);
  std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  json rec = {{"kind", "lookahead"},
              {"instance", task->instance().name},
              {"variant", to_string(lc.variant)},
              {"k", lc.width},
              {"nodes", tree.nodes.size()},
              {"depth", tree.max_depth()},
              {"seen", tree.seen_size},
              {"generated", tree.generated},
              {"truncated", tree.truncated},
              {"objects", task->instance().objects.size()},
              {"capacity_bound", novel_capacity_bound(*task)},
              {"wall_time", elapsed.count()}};
  if (auto c = lc.effective_capacity()) rec["capacity"] = *c;
  if (cfg.dump_states) {
    json states = json::array();
    for (const auto& n : tree.nodes) states.push_back(task->state_names(n.state));
    rec["states"] = std::move(states);
  }
  return {{std::move(rec)}, false, {}};
}

InstanceOutput cmd_encode(const RunConfig& cfg, const Domain& domain, const std::string& path) {
  auto task = load_task(domain, path);
  const Encoding enc = parse_encoding(cfg.encoding.empty() ? "ad" : cfg.encoding);
  const State& s0 = task->initial_state();
  InstanceOutput out;
  switch (enc) {
    case Encoding::state:
      out.records.push_back(to_json(encode_state(s0, *task)));
      return out;
    case Encoding::aggregated_actions:
      out.records.push_back(to_json(encode_aa(s0, applicable_actions(s0, *task), *task)));
      return out;
    default: break;
  }
  LookaheadTree tree = lookahead(s0, *task, cfg.lookahead());
  if (enc == Encoding::aggregated_delta) {
    out.records.push_back(to_json(encode_ad(tree, *task)));
    return out;
  }
  for (std::size_t i : jump_candidates(tree)) {
    const State& succ = tree.nodes[i].state;
    if (enc == Encoding::external)
      out.records.push_back(to_json(encode_external(s0, succ, *task)));
    else if (enc == Encoding::internal)
      out.records.push_back(to_json(encode_internal(s0, succ, *task)));
    else
      out.records.push_back(to_json(encode_internal_delta(s0, succ, *task)));
  }
  return out;
}

InstanceOutput cmd_solve(const RunConfig& cfg, const Domain& domain, const std::string& path) {
  auto task = load_task(domain, path);
  EpisodeConfig ec;
  ec.mode = parse_mode(cfg.mode);
  if (!cfg.encoding.empty()) ec.encoding = parse_encoding(cfg.encoding);
  ec.lookahead = cfg.lookahead();
  ec.limits.max_choices = cfg.max_choices;
  ec.limits.step_cap = cfg.step_cap;
  ec.limits.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(cfg.timeout_s * 1000));
  ec.validate();
  auto scorer = make_scorer(cfg.scorer, *task);
  EpisodeResult r = run_episode(*task, *scorer, ec);
  return {{episode_record(*task, ec, r)}, !r.solved, {}};
}

InstanceOutput cmd_branching(const RunConfig& cfg, const Domain& domain, const std::string& path) {
  auto task = load_task(domain, path);
  auto samples = branching_samples(*task, cfg.walk_len, cfg.seed);
  double sum = 0;
  for (auto c : samples) sum += static_cast<double>(c);
  json rec = {{"kind", "branching"},
              {"instance", task->instance().name},
              {"objects", task->instance().objects.size()},
              {"walk_len", cfg.walk_len},
              {"seed", cfg.seed},
              {"average", sum / static_cast<double>(samples.size())},
              {"samples", samples}};
  return {{std::move(rec)}, false, {}};
}

void add_instance_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-d,--domain", cfg.domain, "PDDL domain file")->required()->check(CLI::ExistingFile);
  sub->add_option("-i,--instance", cfg.instances, "PDDL instance file(s)")
      ->required()
      ->check(CLI::ExistingFile);
}

void add_lookahead_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--variant", cfg.variant, "Lookahead variant")
      ->check(CLI::IsMember({"iw", "aiw", "baiw", "caiw"}));
  sub->add_option("-k,--k", cfg.width, "Novelty width")->check(CLI::Range(1, 2));
  sub->add_option("--capacity", cfg.capacity, "Per-depth retention limit (caiw)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-states", cfg.max_states, "Lookahead state cap")
      ->envname("GPLAN_MAX_STATES")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-depth", cfg.max_depth, "Lookahead depth cap");
  sub->add_flag("--register-kept-only", cfg.register_kept_only,
                "Only record novelty tuples of kept states");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Width-based lookahead, relational encodings and jump-policy execution"};
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("-o,--output", cfg.output, "Write records to this file instead of stdout");
  app.add_flag("--pretty", cfg.pretty, "Indented, human-readable output");
  app.add_option("-j,--jobs", cfg.jobs, "Instances processed in parallel")->check(CLI::PositiveNumber);

  auto* la = app.add_subcommand("lookahead", "Build a lookahead tree from the initial state");
  add_instance_options(la, cfg);
  add_lookahead_options(la, cfg);
  la->add_flag("--states", cfg.dump_states, "Include every node's state in the record");

  auto* enc = app.add_subcommand("encode", "Emit relational graph records");
  add_instance_options(enc, cfg);
  add_lookahead_options(enc, cfg);
  enc->add_option("-e,--encoding", cfg.encoding, "state, ext, aa, ad, int or intd")
      ->check(CLI::IsMember({"state", "ext", "aa", "ad", "int", "intd"}));

  auto* solve = app.add_subcommand("solve", "Run greedy policy episodes");
  add_instance_options(solve, cfg);
  add_lookahead_options(solve, cfg);
  solve->add_option("--scorer", cfg.scorer, "oracle, zero, cmd:<command> or unix:<path>");
  solve->add_option("--mode", cfg.mode, "Policy mode")
      ->check(CLI::IsMember({"flat_aa", "flat_ad", "iw_jump"}));
  solve->add_option("-e,--encoding", cfg.encoding, "Wire encoding for remote scorers")
      ->check(CLI::IsMember({"aa", "ad", "ext", "int", "intd"}));
  solve->add_option("--max-choices", cfg.max_choices, "Policy decision limit")
      ->envname("GPLAN_MAX_CHOICES")
      ->check(CLI::PositiveNumber);
  solve->add_option("--step-cap", cfg.step_cap, "Primitive action limit");
  solve->add_option("--timeout", cfg.timeout_s, "Per-instance timeout in seconds")
      ->envname("GPLAN_TIMEOUT")
      ->check(CLI::PositiveNumber);

  auto* br = app.add_subcommand("branching", "Estimate branching factors by random walks");
  add_instance_options(br, cfg);
  br->add_option("--walk-len", cfg.walk_len, "Random walk length");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Command command = nullptr;
  if (*la) command = cmd_lookahead;
  else if (*enc) command = cmd_encode;
  else if (*solve) command = cmd_solve;
  else command = cmd_branching;

  Domain domain;
  try {
    domain = load_domain(cfg.domain);
    cfg.lookahead();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<InstanceOutput> results(cfg.instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.instances.size(); i = next++) {
      try {
        results[i] = command(cfg, domain, cfg.instances[i]);
      } catch (const std::exception& e) {
        results[i].error = cfg.instances[i] + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(cfg.jobs, cfg.instances.size()); ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kExitUsage;
    }
    sink = &file;
  }
  int code = kExitOk;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      err << "error: " << r.error << '\n';
      code = kExitUsage;
      continue;
    }
    for (const auto& rec : r.records) *sink << (cfg.pretty ? rec.dump(2) : rec.dump()) << '\n';
    if (r.failed && code == kExitOk) code = kExitUnsolved;
  }
  return code;
}

}  // namespace gplan
