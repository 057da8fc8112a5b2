#include <algorithm>
#include <functional>

#include "gplan/pddl.hpp"

namespace gplan {

SyntaxError::SyntaxError(const std::string& what, std::size_t line, std::size_t column)
    : PddlError(what + " at line " + std::to_string(line) + ", column " +
                std::to_string(column)),
      line_(line),
      column_(column) {}

TypeTree::TypeTree() {
  names_.push_back("object");
  parents_.push_back(root);
  index_.emplace("object", root);
}

TypeTree TypeTree::from_declarations(
    const std::vector<std::pair<std::string, std::string>>& decls) {
  std::unordered_map<std::string, std::string> parent_of;
  std::vector<std::string> order;
  auto note = [&](const std::string& n) {
    if (n == "object") return;
    if (!parent_of.count(n)) {
      parent_of.emplace(n, "object");
      order.push_back(n);
    }
  };
  for (const auto& [type, parent] : decls) {
    if (type == "object") {
      if (parent != "object") throw PddlError("the root type 'object' cannot have a parent");
      continue;
    }
    note(type);
    note(parent);
    parent_of[type] = parent;
  }

  TypeTree tree;
  // Insert parents before children; anything left over sits on a cycle.
  std::unordered_map<std::string, int> state;  // 1 = visiting, 2 = done
  std::function<void(const std::string&)> insert = [&](const std::string& n) {
    if (n == "object" || state[n] == 2) return;
    if (state[n] == 1) throw PddlError("cyclic type hierarchy through '" + n + "'");
    state[n] = 1;
    const std::string& p = parent_of.at(n);
    insert(p);
    TypeId id = static_cast<TypeId>(tree.names_.size());
    tree.names_.push_back(n);
    tree.parents_.push_back(tree.index_.at(p));
    tree.index_.emplace(n, id);
    state[n] = 2;
  };
  for (const auto& n : order) insert(n);
  return tree;
}

std::optional<TypeId> TypeTree::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeTree::id(std::string_view name) const {
  if (auto t = find(name)) return *t;
  throw UndeclaredError("undeclared type '" + std::string(name) + "'");
}

bool TypeTree::is_subtype(TypeId sub, TypeId super) const {
  TypeId t = sub;
  for (std::size_t steps = 0; steps <= names_.size(); ++steps) {
    if (t == super) return true;
    if (t == root) return false;
    t = parents_[t];
  }
  return false;
}

std::size_t TypeTree::depth() const {
  std::size_t best = 0;
  for (TypeId t = 0; t < names_.size(); ++t) {
    std::size_t d = 1;
    for (TypeId c = t; c != root; c = parents_[c]) ++d;
    best = std::max(best, d);
  }
  return best;
}

bool TypeTree::operator==(const TypeTree& other) const {
  if (size() != other.size()) return false;
  for (TypeId t = 0; t < size(); ++t) {
    auto o = other.find(names_[t]);
    if (!o) return false;
    if (other.name(other.parent(*o)) != names_[parents_[t]]) return false;
  }
  return true;
}

bool is_subtype(std::string_view sub, std::string_view super, const TypeTree& tree) {
  return tree.is_subtype(tree.id(sub), tree.id(super));
}

std::optional<PredicateId> Domain::find_predicate(std::string_view n) const {
  for (PredicateId p = 0; p < predicates.size(); ++p)
    if (predicates[p].name == n) return p;
  return std::nullopt;
}

std::optional<ObjectId> Domain::find_constant(std::string_view n) const {
  for (ObjectId o = 0; o < constants.size(); ++o)
    if (constants[o].name == n) return o;
  return std::nullopt;
}

std::optional<ObjectId> Instance::find_object(std::string_view n) const {
  for (ObjectId o = 0; o < objects.size(); ++o)
    if (objects[o].name == n) return o;
  return std::nullopt;
}

void check_atom(const GroundAtomSpec& atom, const Domain& domain,
                const std::vector<Object>& objects) {
  if (atom.predicate >= domain.predicates.size())
    throw UndeclaredError("unknown predicate id " + std::to_string(atom.predicate));
  const PredicateDef& pred = domain.predicates[atom.predicate];
  if (atom.args.size() != pred.arity())
    throw ArityError("predicate '" + pred.name + "' expects " + std::to_string(pred.arity()) +
                     " arguments, got " + std::to_string(atom.args.size()));
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (atom.args[i] >= objects.size())
      throw UndeclaredError("unknown object id " + std::to_string(atom.args[i]));
    const Object& o = objects[atom.args[i]];
    if (!domain.types.is_subtype(o.type, pred.arg_types[i]))
      throw TypeMismatchError("object '" + o.name + "' of type '" + domain.types.name(o.type) +
                              "' does not fit argument " + std::to_string(i + 1) + " of '" +
                              pred.name + "' (expects '" +
                              domain.types.name(pred.arg_types[i]) + "')");
  }
}

}  // namespace gplan
