#include <sstream>

#include "gplan/pddl.hpp"

namespace gplan {

namespace {

void print_term(std::ostream& out, const Term& t, const ActionSchema& a, const Domain& d) {
  if (t.kind == Term::Kind::variable)
    out << '?' << a.params[t.index].name;
  else
    out << d.constants[t.index].name;
}

void print_atoms(std::ostream& out, const std::vector<LiftedAtom>& atoms, const ActionSchema& a,
                 const Domain& d, bool negated) {
  for (const auto& atom : atoms) {
    out << ' ';
    if (negated) out << "(not ";
    out << '(' << d.predicates[atom.predicate].name;
    for (const auto& t : atom.args) {
      out << ' ';
      print_term(out, t, a, d);
    }
    out << ')';
    if (negated) out << ')';
  }
}

void print_ground(std::ostream& out, const GroundAtomSpec& atom, const Domain& d,
                  const std::vector<Object>& objects) {
  out << '(' << d.predicates[atom.predicate].name;
  for (ObjectId o : atom.args) out << ' ' << objects[o].name;
  out << ')';
}

}  // namespace

std::string to_pddl(const Domain& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (d.types.size() > 1) {
    out << "  (:types";
    for (TypeId t = 1; t < d.types.size(); ++t)
      out << ' ' << d.types.name(t) << " - " << d.types.name(d.types.parent(t));
    out << ")\n";
  }
  if (!d.constants.empty()) {
    out << "  (:constants";
    for (const auto& c : d.constants) out << ' ' << c.name << " - " << d.types.name(c.type);
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto& p : d.predicates) {
    out << " (" << p.name;
    for (std::size_t i = 0; i < p.arity(); ++i)
      out << " ?x" << i << " - " << d.types.name(p.arg_types[i]);
    out << ')';
  }
  out << ")\n";
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n    :parameters (";
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      if (i) out << ' ';
      out << '?' << a.params[i].name << " - " << d.types.name(a.params[i].type);
    }
    out << ")\n    :precondition (and";
    print_atoms(out, a.pre, a, d, false);
    out << ")\n    :effect (and";
    print_atoms(out, a.add, a, d, false);
    print_atoms(out, a.del, a, d, true);
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

std::string to_pddl(const Instance& inst, const Domain& d) {
  std::ostringstream out;
  out << "(define (problem " << inst.name << ")\n  (:domain " << d.name << ")\n  (:objects";
  for (std::size_t o = d.constants.size(); o < inst.objects.size(); ++o)
    out << ' ' << inst.objects[o].name << " - " << d.types.name(inst.objects[o].type);
  out << ")\n  (:init";
  for (const auto& a : inst.init) {
    out << ' ';
    print_ground(out, a, d, inst.objects);
  }
  out << ")\n  (:goal (and";
  for (const auto& a : inst.goal) {
    out << ' ';
    print_ground(out, a, d, inst.objects);
  }
  out << ")))\n";
  return out.str();
}

}  // namespace gplan
