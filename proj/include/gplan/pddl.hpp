#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gplan {

using TypeId = std::uint32_t;
using PredicateId = std::uint32_t;
using ObjectId = std::uint32_t;
using SchemaId = std::uint32_t;

// Errors raised while reading or validating PDDL input.
class PddlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public PddlError {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedError : public PddlError {
 public:
  using PddlError::PddlError;
};

class UndeclaredError : public PddlError {
 public:
  using PddlError::PddlError;
};

class ArityError : public PddlError {
 public:
  using PddlError::PddlError;
};

class TypeMismatchError : public PddlError {
 public:
  using PddlError::PddlError;
};

// Single-inheritance type hierarchy rooted at the universal type `object`.
class TypeTree {
 public:
  static constexpr TypeId root = 0;

  TypeTree();

  // Builds a tree from (type, parent) declarations in any order. Types named
  // only as parents are created under the root. Throws PddlError on cycles.
  static TypeTree from_declarations(
      const std::vector<std::pair<std::string, std::string>>& decls);

  std::optional<TypeId> find(std::string_view name) const;
  // Throws UndeclaredError for unknown names.
  TypeId id(std::string_view name) const;
  const std::string& name(TypeId t) const { return names_.at(t); }
  // The root is its own parent.
  TypeId parent(TypeId t) const { return parents_.at(t); }
  std::size_t size() const { return names_.size(); }

  // Reflexive: true iff `super` lies on the parent chain of `sub`.
  bool is_subtype(TypeId sub, TypeId super) const;
  // Number of types on the longest root chain, counting the root.
  std::size_t depth() const;

  bool operator==(const TypeTree& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<TypeId> parents_;
  std::unordered_map<std::string, TypeId> index_;
};

bool is_subtype(std::string_view sub, std::string_view super,
                const TypeTree& tree);

struct PredicateDef {
  std::string name;
  std::vector<TypeId> arg_types;

  std::size_t arity() const { return arg_types.size(); }
  bool operator==(const PredicateDef&) const = default;
};

struct Parameter {
  std::string name;  // without the leading '?'
  TypeId type = TypeTree::root;
  bool operator==(const Parameter&) const = default;
};

// An action argument: either a schema parameter or a domain constant.
struct Term {
  enum class Kind : std::uint8_t { variable, constant };
  Kind kind = Kind::variable;
  std::uint32_t index = 0;  // parameter index or ObjectId

  static Term variable(std::uint32_t i) { return {Kind::variable, i}; }
  static Term constant(ObjectId o) { return {Kind::constant, o}; }
  bool operator==(const Term&) const = default;
};

struct LiftedAtom {
  PredicateId predicate = 0;
  std::vector<Term> args;
  bool operator==(const LiftedAtom&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Parameter> params;
  std::vector<LiftedAtom> pre;
  std::vector<LiftedAtom> add;
  std::vector<LiftedAtom> del;
  bool operator==(const ActionSchema&) const = default;
};

struct Object {
  std::string name;
  TypeId type = TypeTree::root;
  bool operator==(const Object&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  TypeTree types;
  std::vector<Object> constants;
  std::vector<PredicateDef> predicates;
  std::vector<ActionSchema> actions;

  std::optional<PredicateId> find_predicate(std::string_view name) const;
  std::optional<ObjectId> find_constant(std::string_view name) const;

  bool operator==(const Domain&) const = default;
};

struct GroundAtomSpec {
  PredicateId predicate = 0;
  std::vector<ObjectId> args;
  bool operator==(const GroundAtomSpec&) const = default;
  auto operator<=>(const GroundAtomSpec&) const = default;
};

// Objects are numbered with the domain constants first, in declaration order,
// followed by the instance's own objects.
struct Instance {
  std::string name;
  std::string domain_name;
  std::vector<Object> objects;
  std::vector<GroundAtomSpec> init;
  std::vector<GroundAtomSpec> goal;

  std::optional<ObjectId> find_object(std::string_view name) const;
};

Domain parse_domain(std::string_view text);
Instance parse_instance(std::string_view text, const Domain& domain);

Domain load_domain(const std::string& path);
Instance load_instance(const std::string& path, const Domain& domain);

// Canonical PDDL text; parse_domain(to_pddl(d)) == d.
std::string to_pddl(const Domain& domain);
std::string to_pddl(const Instance& instance, const Domain& domain);

// Throws TypeMismatchError / ArityError if `atom` does not fit its predicate.
void check_atom(const GroundAtomSpec& atom, const Domain& domain,
                const std::vector<Object>& objects);

}  // namespace gplan
