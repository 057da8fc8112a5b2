#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gplan/pddl.hpp"

namespace gplan {

using AtomId = std::uint32_t;

struct GroundAtom {
  PredicateId predicate = 0;
  std::vector<ObjectId> args;
  bool operator==(const GroundAtom&) const = default;
};

// Dense, append-only interning of ground atoms. Safe for concurrent use.
class AtomRegistry {
 public:
  AtomRegistry(std::shared_ptr<const Domain> domain, std::shared_ptr<const Instance> instance);

  AtomRegistry(const AtomRegistry&) = delete;
  AtomRegistry& operator=(const AtomRegistry&) = delete;

  // Same (predicate, args) always yields the same id. Throws ArityError or
  // TypeMismatchError if the atom does not fit the predicate.
  AtomId intern(PredicateId predicate, std::span<const ObjectId> args);
  std::optional<AtomId> find(PredicateId predicate, std::span<const ObjectId> args) const;
  GroundAtom atom(AtomId id) const;
  std::size_t size() const;

 private:
  static std::string key(PredicateId predicate, std::span<const ObjectId> args);

  std::shared_ptr<const Domain> domain_;
  std::shared_ptr<const Instance> instance_;
  mutable std::shared_mutex mutex_;
  std::deque<GroundAtom> atoms_;
  std::unordered_map<std::string, AtomId> index_;
};

// Sorted, duplicate-free set of atoms.
class State {
 public:
  State() = default;
  explicit State(std::vector<AtomId> atoms);

  bool contains(AtomId a) const;
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }
  const std::vector<AtomId>& atoms() const { return atoms_; }
  std::size_t hash() const { return hash_; }

  bool operator==(const State& o) const { return hash_ == o.hash_ && atoms_ == o.atoms_; }

 private:
  std::vector<AtomId> atoms_;
  std::size_t hash_ = 0;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GroundAction {
  SchemaId schema = 0;
  std::vector<ObjectId> args;
  std::vector<AtomId> pre;  // sorted
  std::vector<AtomId> add;  // sorted, disjoint from del
  std::vector<AtomId> del;  // sorted

  bool operator==(const GroundAction& o) const { return schema == o.schema && args == o.args; }
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A parsed problem together with its atom registry. Shared across searches;
// the registry grows only with atoms that are actually touched.
class Task {
 public:
  Task(Domain domain, Instance instance);

  static std::shared_ptr<Task> load(const std::string& domain_path,
                                    const std::string& instance_path);

  const Domain& domain() const { return *domain_; }
  const Instance& instance() const { return *instance_; }
  AtomRegistry& atoms() const { return *registry_; }

  const State& initial_state() const { return initial_; }
  // Sorted goal atom ids.
  const std::vector<AtomId>& goal() const { return goal_; }
  bool is_goal_atom(AtomId a) const;

  bool is_static(PredicateId p) const { return static_[p]; }
  // Objects whose type is a subtype of `t`, in id order.
  const std::vector<ObjectId>& objects_of_type(TypeId t) const { return by_type_[t]; }
  TypeId type_of(ObjectId o) const { return instance_->objects[o].type; }
  // Action schemas sorted by name.
  const std::vector<SchemaId>& schema_order() const { return schema_order_; }

  std::string atom_name(AtomId a) const;
  std::string action_name(const GroundAction& a) const;
  std::vector<std::string> state_names(const State& s) const;

  // Instantiates `schema` with `args`. Does not check applicability.
  GroundAction ground(SchemaId schema, std::span<const ObjectId> args) const;

 private:
  std::shared_ptr<const Domain> domain_;
  std::shared_ptr<const Instance> instance_;
  std::unique_ptr<AtomRegistry> registry_;
  State initial_;
  std::vector<AtomId> goal_;
  std::vector<bool> static_;
  std::vector<std::vector<ObjectId>> by_type_;
  std::vector<SchemaId> schema_order_;
};

// All ground actions with pre ⊆ s, sorted by schema name then argument ids.
std::vector<GroundAction> applicable_actions(const State& s, const Task& task);

// (s \ del) ∪ add. Throws PreconditionError when a.pre ⊄ s.
State apply(const State& s, const GroundAction& a);

bool is_goal(const State& s, const Task& task);

}  // namespace gplan
