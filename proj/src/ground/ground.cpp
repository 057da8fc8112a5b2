#include "gplan/ground.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace gplan {

AtomRegistry::AtomRegistry(std::shared_ptr<const Domain> domain,
                           std::shared_ptr<const Instance> instance)
    : domain_(std::move(domain)), instance_(std::move(instance)) {}

std::string AtomRegistry::key(PredicateId predicate, std::span<const ObjectId> args) {
  std::string k((args.size() + 1) * sizeof(std::uint32_t), '\0');
  std::memcpy(k.data(), &predicate, sizeof(predicate));
  if (!args.empty())
    std::memcpy(k.data() + sizeof(predicate), args.data(), args.size() * sizeof(ObjectId));
  return k;
}

AtomId AtomRegistry::intern(PredicateId predicate, std::span<const ObjectId> args) {
  std::string k = key(predicate, args);
  {
    std::shared_lock lock(mutex_);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
  }
  GroundAtom atom{predicate, {args.begin(), args.end()}};
  check_atom({atom.predicate, atom.args}, *domain_, instance_->objects);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = index_.emplace(std::move(k), static_cast<AtomId>(atoms_.size()));
  if (inserted) atoms_.push_back(std::move(atom));
  return it->second;
}

std::optional<AtomId> AtomRegistry::find(PredicateId predicate,
                                         std::span<const ObjectId> args) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(key(predicate, args));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GroundAtom AtomRegistry::atom(AtomId id) const {
  std::shared_lock lock(mutex_);
  return atoms_.at(id);
}

std::size_t AtomRegistry::size() const {
  std::shared_lock lock(mutex_);
  return atoms_.size();
}

State::State(std::vector<AtomId> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  std::size_t h = 0xcbf29ce484222325ull;
  for (AtomId a : atoms_) {
    h ^= a + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  hash_ = h;
}

bool State::contains(AtomId a) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

Task::Task(Domain domain, Instance instance)
    : domain_(std::make_shared<const Domain>(std::move(domain))),
      instance_(std::make_shared<const Instance>(std::move(instance))),
      registry_(std::make_unique<AtomRegistry>(domain_, instance_)) {
  std::vector<AtomId> init;
  for (const auto& a : instance_->init) init.push_back(registry_->intern(a.predicate, a.args));
  initial_ = State(std::move(init));
  for (const auto& a : instance_->goal) goal_.push_back(registry_->intern(a.predicate, a.args));
  std::sort(goal_.begin(), goal_.end());
  goal_.erase(std::unique(goal_.begin(), goal_.end()), goal_.end());

  static_.assign(domain_->predicates.size(), true);
  for (const auto& a : domain_->actions) {
    for (const auto& e : a.add) static_[e.predicate] = false;
    for (const auto& e : a.del) static_[e.predicate] = false;
  }

  by_type_.resize(domain_->types.size());
  for (TypeId t = 0; t < domain_->types.size(); ++t)
    for (ObjectId o = 0; o < instance_->objects.size(); ++o)
      if (domain_->types.is_subtype(instance_->objects[o].type, t)) by_type_[t].push_back(o);

  schema_order_.resize(domain_->actions.size());
  std::iota(schema_order_.begin(), schema_order_.end(), 0);
  std::stable_sort(schema_order_.begin(), schema_order_.end(), [&](SchemaId a, SchemaId b) {
    return domain_->actions[a].name < domain_->actions[b].name;
  });
}

std::shared_ptr<Task> Task::load(const std::string& domain_path,
                                 const std::string& instance_path) {
  Domain d = load_domain(domain_path);
  Instance i = load_instance(instance_path, d);
  return std::make_shared<Task>(std::move(d), std::move(i));
}

bool Task::is_goal_atom(AtomId a) const {
  return std::binary_search(goal_.begin(), goal_.end(), a);
}

std::string Task::atom_name(AtomId id) const {
  GroundAtom a = registry_->atom(id);
  std::string s = domain_->predicates[a.predicate].name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += instance_->objects[a.args[i]].name;
  }
  return s + ")";
}

std::string Task::action_name(const GroundAction& a) const {
  std::string s = "(" + domain_->actions[a.schema].name;
  for (ObjectId o : a.args) s += " " + instance_->objects[o].name;
  return s + ")";
}

std::vector<std::string> Task::state_names(const State& s) const {
  std::vector<std::string> out;
  for (AtomId a : s) out.push_back(atom_name(a));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<AtomId> instantiate(const std::vector<LiftedAtom>& atoms,
                                std::span<const ObjectId> args, AtomRegistry& reg) {
  std::vector<AtomId> out;
  out.reserve(atoms.size());
  std::vector<ObjectId> buf;
  for (const auto& la : atoms) {
    buf.clear();
    for (const Term& t : la.args)
      buf.push_back(t.kind == Term::Kind::variable ? args[t.index] : t.index);
    out.push_back(reg.intern(la.predicate, buf));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

GroundAction Task::ground(SchemaId schema, std::span<const ObjectId> args) const {
  const ActionSchema& s = domain_->actions.at(schema);
  if (args.size() != s.params.size())
    throw ArityError("action '" + s.name + "' expects " + std::to_string(s.params.size()) +
                     " arguments");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!domain_->types.is_subtype(type_of(args[i]), s.params[i].type))
      throw TypeMismatchError("argument " + std::to_string(i + 1) + " of action '" + s.name +
                              "' has the wrong type");
  GroundAction a;
  a.schema = schema;
  a.args.assign(args.begin(), args.end());
  a.pre = instantiate(s.pre, args, *registry_);
  a.add = instantiate(s.add, args, *registry_);
  std::vector<AtomId> del = instantiate(s.del, args, *registry_);
  // An atom both added and deleted stays true.
  std::set_difference(del.begin(), del.end(), a.add.begin(), a.add.end(),
                      std::back_inserter(a.del));
  return a;
}

namespace {

// Backtracking matcher binding schema parameters against the atoms of one
// state. Preconditions with few candidate atoms are matched first.
class Matcher {
 public:
  Matcher(const Task& task, const std::vector<std::vector<const GroundAtom*>>& by_pred)
      : task_(task), by_pred_(by_pred) {}

  std::vector<std::vector<ObjectId>> match(const ActionSchema& schema) {
    schema_ = &schema;
    results_.clear();
    order_.clear();
    for (std::size_t i = 0; i < schema.pre.size(); ++i) {
      if (by_pred_[schema.pre[i].predicate].empty()) return {};
      order_.push_back(i);
    }
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      PredicateId pa = schema.pre[a].predicate, pb = schema.pre[b].predicate;
      std::size_t ca = by_pred_[pa].size(), cb = by_pred_[pb].size();
      if (ca != cb) return ca < cb;
      return task_.is_static(pa) && !task_.is_static(pb);
    });
    binding_.assign(schema.params.size(), kUnbound);
    match_pre(0);
    std::sort(results_.begin(), results_.end());
    return std::move(results_);
  }

 private:
  static constexpr std::int64_t kUnbound = -1;

  void match_pre(std::size_t i) {
    if (i == order_.size()) {
      bind_free(0);
      return;
    }
    const LiftedAtom& la = schema_->pre[order_[i]];
    std::vector<std::uint32_t> newly;
    for (const GroundAtom* ga : by_pred_[la.predicate]) {
      newly.clear();
      bool ok = true;
      for (std::size_t j = 0; j < la.args.size() && ok; ++j) {
        const Term& t = la.args[j];
        ObjectId o = ga->args[j];
        if (t.kind == Term::Kind::constant) {
          ok = t.index == o;
        } else if (binding_[t.index] != kUnbound) {
          ok = binding_[t.index] == o;
        } else if (task_.domain().types.is_subtype(task_.type_of(o),
                                                   schema_->params[t.index].type)) {
          binding_[t.index] = o;
          newly.push_back(t.index);
        } else {
          ok = false;
        }
      }
      if (ok) match_pre(i + 1);
      for (std::uint32_t v : newly) binding_[v] = kUnbound;
    }
  }

  void bind_free(std::size_t p) {
    if (p == binding_.size()) {
      std::vector<ObjectId> args(binding_.begin(), binding_.end());
      results_.push_back(std::move(args));
      return;
    }
    if (binding_[p] != kUnbound) {
      bind_free(p + 1);
      return;
    }
    for (ObjectId o : task_.objects_of_type(schema_->params[p].type)) {
      binding_[p] = o;
      bind_free(p + 1);
    }
    binding_[p] = kUnbound;
  }

  const Task& task_;
  const std::vector<std::vector<const GroundAtom*>>& by_pred_;
  const ActionSchema* schema_ = nullptr;
  std::vector<std::size_t> order_;
  std::vector<std::int64_t> binding_;
  std::vector<std::vector<ObjectId>> results_;
};

}  // namespace

std::vector<GroundAction> applicable_actions(const State& s, const Task& task) {
  std::vector<GroundAtom> decoded;
  decoded.reserve(s.size());
  for (AtomId a : s) decoded.push_back(task.atoms().atom(a));
  std::vector<std::vector<const GroundAtom*>> by_pred(task.domain().predicates.size());
  for (const auto& a : decoded) by_pred[a.predicate].push_back(&a);

  std::vector<GroundAction> out;
  Matcher matcher(task, by_pred);
  for (SchemaId sid : task.schema_order()) {
    for (const auto& args : matcher.match(task.domain().actions[sid]))
      out.push_back(task.ground(sid, args));
  }
  return out;
}

State apply(const State& s, const GroundAction& a) {
  if (!std::includes(s.begin(), s.end(), a.pre.begin(), a.pre.end()))
    throw PreconditionError("action preconditions do not hold in the state");
  std::vector<AtomId> kept;
  kept.reserve(s.size() + a.add.size());
  std::set_difference(s.begin(), s.end(), a.del.begin(), a.del.end(), std::back_inserter(kept));
  std::vector<AtomId> out;
  out.reserve(kept.size() + a.add.size());
  std::set_union(kept.begin(), kept.end(), a.add.begin(), a.add.end(), std::back_inserter(out));
  return State(std::move(out));
}

bool is_goal(const State& s, const Task& task) {
  return std::includes(s.begin(), s.end(), task.goal().begin(), task.goal().end());
}

}  // namespace gplan
