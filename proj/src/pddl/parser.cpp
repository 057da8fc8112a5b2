#include <algorithm>
#include <fstream>
#include <sstream>

#include "gplan/pddl.hpp"
#include "sexpr.hpp"

namespace gplan {

using detail::fail_at;
using detail::SExpr;

namespace {

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (!e.is_list) fail_at(e, std::string("expected ") + what);
  return e;
}

const std::string& expect_symbol(const SExpr& e, const char* what) {
  if (e.is_list || e.symbol.empty()) fail_at(e, std::string("expected ") + what);
  return e.symbol;
}

bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }

// Reads `a b - t c - u d` style lists. Untyped trailing names get `object`.
std::vector<std::pair<std::string, std::string>> read_typed_list(
    const std::vector<SExpr>& items, std::size_t begin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& it = items[i];
    if (it.is_list) {
      if (it.head() == "either") throw UnsupportedError("'either' types are not supported");
      fail_at(it, "unexpected list in typed list");
    }
    if (it.symbol == "-") {
      if (i + 1 >= items.size()) fail_at(it, "missing type after '-'");
      const SExpr& type = items[++i];
      if (type.is_list) {
        if (type.head() == "either") throw UnsupportedError("'either' types are not supported");
        fail_at(type, "expected type name");
      }
      if (pending.empty()) fail_at(it, "'-' without preceding names");
      for (auto& n : pending) out.emplace_back(std::move(n), type.symbol);
      pending.clear();
    } else {
      pending.push_back(it.symbol);
    }
  }
  for (auto& n : pending) out.emplace_back(std::move(n), "object");
  return out;
}

const std::vector<std::string> kSupportedRequirements = {":strips", ":typing"};

class DomainReader {
 public:
  Domain read(const SExpr& root) {
    expect_list(root, "'(define ...)'");
    if (root.head() != "define") fail_at(root, "expected 'define'");
    if (root.items.size() < 2) fail_at(root, "missing domain header");
    const SExpr& header = expect_list(root.items[1], "'(domain <name>)'");
    if (header.head() != "domain" || header.items.size() != 2)
      fail_at(header, "expected '(domain <name>)'");
    d_.name = expect_symbol(header.items[1], "domain name");

    std::vector<const SExpr*> actions;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& sec = expect_list(root.items[i], "domain section");
      std::string_view h = sec.head();
      if (h == ":requirements") {
        read_requirements(sec);
      } else if (h == ":types") {
        d_.types = TypeTree::from_declarations(read_typed_list(sec.items, 1));
      } else if (h == ":constants") {
        constants_ = &sec;
      } else if (h == ":predicates") {
        predicates_ = &sec;
      } else if (h == ":action") {
        actions.push_back(&sec);
      } else if (h == ":functions") {
        throw UnsupportedError("numeric fluents (:functions) are not supported");
      } else if (h == ":derived" || h == ":axiom") {
        throw UnsupportedError("derived predicates are not supported");
      } else if (h == ":durative-action") {
        throw UnsupportedError("durative actions are not supported");
      } else {
        fail_at(sec, "unknown domain section '" + std::string(h) + "'");
      }
    }
    if (constants_) read_constants(*constants_);
    if (predicates_) read_predicates(*predicates_);
    for (const SExpr* a : actions) d_.actions.push_back(read_action(*a));
    return std::move(d_);
  }

 private:
  void read_requirements(const SExpr& sec) {
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
      const std::string& r = expect_symbol(sec.items[i], "requirement");
      if (std::find(kSupportedRequirements.begin(), kSupportedRequirements.end(), r) ==
          kSupportedRequirements.end())
        throw UnsupportedError("unsupported requirement '" + r + "'");
      d_.requirements.push_back(r);
    }
  }

  void read_constants(const SExpr& sec) {
    for (auto& [name, type] : read_typed_list(sec.items, 1)) {
      if (d_.find_constant(name)) throw PddlError("duplicate constant '" + name + "'");
      d_.constants.push_back({name, d_.types.id(type)});
    }
  }

  void read_predicates(const SExpr& sec) {
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
      const SExpr& p = expect_list(sec.items[i], "predicate declaration");
      if (p.items.empty()) fail_at(p, "empty predicate declaration");
      PredicateDef def;
      def.name = expect_symbol(p.items[0], "predicate name");
      if (d_.find_predicate(def.name)) fail_at(p, "duplicate predicate '" + def.name + "'");
      for (auto& [var, type] : read_typed_list(p.items, 1)) {
        if (!is_variable(var)) fail_at(p, "predicate parameters must be variables");
        def.arg_types.push_back(d_.types.id(type));
      }
      d_.predicates.push_back(std::move(def));
    }
  }

  ActionSchema read_action(const SExpr& sec) {
    if (sec.items.size() < 2) fail_at(sec, "missing action name");
    ActionSchema a;
    a.name = expect_symbol(sec.items[1], "action name");
    for (const auto& other : d_.actions)
      if (other.name == a.name) fail_at(sec, "duplicate action '" + a.name + "'");
    for (std::size_t i = 2; i < sec.items.size(); i += 2) {
      const std::string& key = expect_symbol(sec.items[i], "action keyword");
      if (i + 1 >= sec.items.size()) fail_at(sec.items[i], "missing value for " + key);
      const SExpr& value = sec.items[i + 1];
      if (key == ":parameters") {
        expect_list(value, "parameter list");
        for (auto& [var, type] : read_typed_list(value.items, 0)) {
          if (!is_variable(var)) fail_at(value, "parameters must be variables");
          std::string name = var.substr(1);
          for (const auto& p : a.params)
            if (p.name == name) fail_at(value, "duplicate parameter '?" + name + "'");
          a.params.push_back({name, d_.types.id(type)});
        }
      } else if (key == ":precondition") {
        read_precondition(value, a);
      } else if (key == ":effect") {
        read_effect(value, a, false);
      } else {
        fail_at(sec.items[i], "unknown action keyword '" + key + "'");
      }
    }
    return a;
  }

  void read_precondition(const SExpr& e, ActionSchema& a) {
    expect_list(e, "precondition");
    if (e.items.empty()) return;
    std::string_view h = e.head();
    if (h == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) read_precondition(e.items[i], a);
    } else if (h == "not") {
      throw UnsupportedError("negative preconditions are not supported");
    } else if (h == "or" || h == "imply" || h == "exists" || h == "forall") {
      throw UnsupportedError("'" + std::string(h) + "' preconditions are not supported");
    } else if (h == "=") {
      throw UnsupportedError("equality preconditions are not supported");
    } else {
      a.pre.push_back(read_lifted_atom(e, a));
    }
  }

  void read_effect(const SExpr& e, ActionSchema& a, bool negated) {
    expect_list(e, "effect");
    if (e.items.empty()) return;
    std::string_view h = e.head();
    if (h == "and" && !negated) {
      for (std::size_t i = 1; i < e.items.size(); ++i) read_effect(e.items[i], a, false);
    } else if (h == "not" && !negated) {
      if (e.items.size() != 2) fail_at(e, "'not' takes exactly one atom");
      read_effect(e.items[1], a, true);
    } else if (h == "when") {
      throw UnsupportedError("conditional effects are not supported");
    } else if (h == "forall") {
      throw UnsupportedError("universal effects are not supported");
    } else if (h == "increase" || h == "decrease" || h == "assign" || h == "scale-up" ||
               h == "scale-down") {
      throw UnsupportedError("numeric effects are not supported");
    } else if (h == "and" || h == "not") {
      fail_at(e, "nested '" + std::string(h) + "' in negated effect");
    } else {
      (negated ? a.del : a.add).push_back(read_lifted_atom(e, a));
    }
  }

  LiftedAtom read_lifted_atom(const SExpr& e, const ActionSchema& a) {
    const std::string& name = expect_symbol(e.items[0], "predicate name");
    auto pid = d_.find_predicate(name);
    if (!pid) throw UndeclaredError("undeclared predicate '" + name + "' in action '" + a.name + "'");
    const PredicateDef& pred = d_.predicates[*pid];
    if (e.items.size() - 1 != pred.arity())
      throw ArityError("predicate '" + name + "' expects " + std::to_string(pred.arity()) +
                       " arguments in action '" + a.name + "'");
    LiftedAtom atom{*pid, {}};
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const std::string& arg = expect_symbol(e.items[i], "argument");
      TypeId type;
      if (is_variable(arg)) {
        std::string v = arg.substr(1);
        auto it = std::find_if(a.params.begin(), a.params.end(),
                               [&](const Parameter& p) { return p.name == v; });
        if (it == a.params.end())
          throw UndeclaredError("undeclared variable '" + arg + "' in action '" + a.name + "'");
        atom.args.push_back(Term::variable(static_cast<std::uint32_t>(it - a.params.begin())));
        type = it->type;
      } else {
        auto c = d_.find_constant(arg);
        if (!c) throw UndeclaredError("undeclared constant '" + arg + "' in action '" + a.name + "'");
        atom.args.push_back(Term::constant(*c));
        type = d_.constants[*c].type;
      }
      if (!d_.types.is_subtype(type, pred.arg_types[i - 1]))
        throw TypeMismatchError("argument '" + arg + "' of '" + name + "' in action '" + a.name +
                                "' has type '" + d_.types.name(type) + "', expected '" +
                                d_.types.name(pred.arg_types[i - 1]) + "'");
    }
    return atom;
  }

  Domain d_;
  const SExpr* constants_ = nullptr;
  const SExpr* predicates_ = nullptr;
};

class InstanceReader {
 public:
  explicit InstanceReader(const Domain& d) : d_(d) {}

  Instance read(const SExpr& root) {
    expect_list(root, "'(define ...)'");
    if (root.head() != "define") fail_at(root, "expected 'define'");
    if (root.items.size() < 2) fail_at(root, "missing problem header");
    const SExpr& header = expect_list(root.items[1], "'(problem <name>)'");
    if (header.head() != "problem" || header.items.size() != 2)
      fail_at(header, "expected '(problem <name>)'");
    inst_.name = expect_symbol(header.items[1], "problem name");
    inst_.objects = d_.constants;

    const SExpr* init = nullptr;
    const SExpr* goal = nullptr;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& sec = expect_list(root.items[i], "problem section");
      std::string_view h = sec.head();
      if (h == ":domain") {
        if (sec.items.size() != 2) fail_at(sec, "expected '(:domain <name>)'");
        inst_.domain_name = expect_symbol(sec.items[1], "domain name");
      } else if (h == ":requirements") {
        for (std::size_t j = 1; j < sec.items.size(); ++j) {
          const std::string& r = expect_symbol(sec.items[j], "requirement");
          if (std::find(kSupportedRequirements.begin(), kSupportedRequirements.end(), r) ==
              kSupportedRequirements.end())
            throw UnsupportedError("unsupported requirement '" + r + "'");
        }
      } else if (h == ":objects") {
        read_objects(sec);
      } else if (h == ":init") {
        init = &sec;
      } else if (h == ":goal") {
        goal = &sec;
      } else if (h == ":metric") {
        throw UnsupportedError("metrics are not supported");
      } else {
        fail_at(sec, "unknown problem section '" + std::string(h) + "'");
      }
    }
    if (!inst_.domain_name.empty() && inst_.domain_name != d_.name)
      throw PddlError("problem refers to domain '" + inst_.domain_name + "' but domain is '" +
                      d_.name + "'");
    if (!init) fail_at(root, "problem has no :init section");
    if (!goal) fail_at(root, "problem has no :goal section");
    for (std::size_t i = 1; i < init->items.size(); ++i)
      inst_.init.push_back(read_ground_atom(init->items[i]));
    if (goal->items.size() != 2) fail_at(*goal, "expected exactly one goal formula");
    read_goal(goal->items[1]);
    normalize(inst_.init);
    normalize(inst_.goal);
    return std::move(inst_);
  }

 private:
  static void normalize(std::vector<GroundAtomSpec>& atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  }

  void read_objects(const SExpr& sec) {
    for (auto& [name, type] : read_typed_list(sec.items, 1)) {
      auto t = d_.types.find(type);
      if (!t)
        throw TypeMismatchError("object '" + name + "' has undeclared type '" + type + "'");
      if (auto existing = inst_.find_object(name)) {
        // Re-declaring a domain constant with the same type is tolerated.
        if (*existing < d_.constants.size() && inst_.objects[*existing].type == *t) continue;
        throw PddlError("duplicate object '" + name + "'");
      }
      inst_.objects.push_back({name, *t});
    }
  }

  void read_goal(const SExpr& e) {
    expect_list(e, "goal formula");
    if (e.items.empty()) return;
    std::string_view h = e.head();
    if (h == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) read_goal(e.items[i]);
    } else if (h == "not" || h == "or" || h == "imply" || h == "exists" || h == "forall") {
      throw UnsupportedError("'" + std::string(h) + "' goals are not supported");
    } else {
      inst_.goal.push_back(read_ground_atom(e));
    }
  }

  GroundAtomSpec read_ground_atom(const SExpr& e) {
    expect_list(e, "ground atom");
    if (e.items.empty()) fail_at(e, "empty atom");
    const std::string& name = expect_symbol(e.items[0], "predicate name");
    if (name == "=") throw UnsupportedError("numeric fluents are not supported");
    auto pid = d_.find_predicate(name);
    if (!pid) throw UndeclaredError("unknown predicate '" + name + "'");
    GroundAtomSpec atom{*pid, {}};
    if (e.items.size() - 1 != d_.predicates[*pid].arity())
      throw ArityError("predicate '" + name + "' expects " +
                       std::to_string(d_.predicates[*pid].arity()) + " arguments, got " +
                       std::to_string(e.items.size() - 1));
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const std::string& arg = expect_symbol(e.items[i], "object name");
      auto o = inst_.find_object(arg);
      if (!o) throw UndeclaredError("unknown object '" + arg + "'");
      atom.args.push_back(*o);
    }
    check_atom(atom, d_, inst_.objects);
    return atom;
  }

  const Domain& d_;
  Instance inst_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PddlError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Domain parse_domain(std::string_view text) {
  return DomainReader().read(detail::read_sexpr(text));
}

Instance parse_instance(std::string_view text, const Domain& domain) {
  return InstanceReader(domain).read(detail::read_sexpr(text));
}

Domain load_domain(const std::string& path) { return parse_domain(read_file(path)); }

Instance load_instance(const std::string& path, const Domain& domain) {
  return parse_instance(read_file(path), domain);
}

}  // namespace gplan
