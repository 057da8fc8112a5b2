#include "gplan/novelty.hpp"

#include <algorithm>
#include <cstring>

namespace gplan {

const char* to_string(Reduction r) {
  switch (r) {
    case Reduction::identity: return "identity";
    case Reduction::type: return "type";
    case Reduction::base: return "base";
  }
  return "?";
}

std::string to_string(const AbstractAtom& a, const Task& task) {
  std::string s = task.domain().predicates[a.predicate].name + "(";
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    if (i) s += ',';
    const Slot& slot = a.slots[i];
    s += slot.is_type ? task.domain().types.name(slot.id) : task.instance().objects[slot.id].name;
  }
  return s + ")";
}

std::vector<AbstractAtom> abstraction_forms(AtomId atom, Reduction reduction, const Task& task) {
  GroundAtom g = task.atoms().atom(atom);
  auto concrete = [&] {
    AbstractAtom a{g.predicate, {}};
    for (ObjectId o : g.args) a.slots.push_back({false, o});
    return a;
  };
  if (reduction == Reduction::identity || g.args.empty() || task.is_goal_atom(atom))
    return {concrete()};

  std::vector<AbstractAtom> forms;
  forms.reserve(g.args.size());
  for (std::size_t keep = 0; keep < g.args.size(); ++keep) {
    AbstractAtom a{g.predicate, {}};
    for (std::size_t j = 0; j < g.args.size(); ++j) {
      if (j == keep)
        a.slots.push_back({false, g.args[j]});
      else if (reduction == Reduction::type)
        a.slots.push_back({true, task.type_of(g.args[j])});
      else
        a.slots.push_back({true, TypeTree::root});
    }
    forms.push_back(std::move(a));
  }
  return forms;
}

NoveltyTable::NoveltyTable(const Task& task, int width, Reduction reduction,
                           bool register_pruned)
    : task_(task), width_(width), reduction_(reduction), register_pruned_(register_pruned) {
  if (width < 1 || width > 2)
    throw std::invalid_argument("novelty width must be 1 or 2, got " + std::to_string(width));
}

const std::vector<NoveltyTable::Key>& NoveltyTable::forms_of(AtomId a) {
  auto it = form_cache_.find(a);
  if (it != form_cache_.end()) return it->second;
  std::vector<Key> keys;
  for (const AbstractAtom& f : abstraction_forms(a, reduction_, task_)) {
    Key k((1 + f.slots.size()) * sizeof(std::uint32_t), '\0');
    std::memcpy(k.data(), &f.predicate, sizeof(std::uint32_t));
    for (std::size_t i = 0; i < f.slots.size(); ++i) {
      std::uint32_t v = (f.slots[i].id << 1) | (f.slots[i].is_type ? 1u : 0u);
      std::memcpy(k.data() + (i + 1) * sizeof(std::uint32_t), &v, sizeof(v));
    }
    keys.push_back(std::move(k));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return form_cache_.emplace(a, std::move(keys)).first->second;
}

// Calls fn(key) for every abstracted tuple of size <= width induced by s;
// stops early when fn returns true and reports whether it did.
template <typename Fn>
bool NoveltyTable::for_each_tuple(const State& s, Fn&& fn) {
  const auto& atoms = s.atoms();
  std::vector<const std::vector<Key>*> forms;
  forms.reserve(atoms.size());
  for (AtomId a : atoms) forms.push_back(&forms_of(a));

  Key buf;
  for (const auto* fs : forms) {
    for (const Key& f : *fs) {
      buf.assign(1, '\x01');
      buf += f;
      if (fn(buf)) return true;
    }
  }
  if (width_ < 2) return false;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    for (std::size_t j = i + 1; j < forms.size(); ++j) {
      for (const Key& f1 : *forms[i]) {
        for (const Key& f2 : *forms[j]) {
          if (f1 == f2) continue;
          const Key& lo = f1 < f2 ? f1 : f2;
          const Key& hi = f1 < f2 ? f2 : f1;
          buf.assign(1, '\x02');
          buf += lo;
          buf += hi;
          if (fn(buf)) return true;
        }
      }
    }
  }
  return false;
}

bool NoveltyTable::is_novel(const State& s) {
  return for_each_tuple(s, [&](const Key& k) { return !seen_.count(k); });
}

void NoveltyTable::register_state(const State& s) {
  for_each_tuple(s, [&](const Key& k) {
    seen_.insert(k);
    return false;
  });
}

bool NoveltyTable::check_and_register(const State& s) {
  if (!register_pruned_) {
    bool novel = is_novel(s);
    if (novel) register_state(s);
    return novel;
  }
  bool novel = false;
  for_each_tuple(s, [&](const Key& k) {
    if (seen_.insert(k).second) novel = true;
    return false;
  });
  return novel;
}

std::size_t novel_capacity_bound(const Task& task) {
  const std::size_t t = task.domain().types.size();
  const std::size_t n_objects = task.instance().objects.size();
  std::size_t bound = task.goal().size();
  for (const auto& p : task.domain().predicates) {
    if (p.arity() == 0) {
      ++bound;
      continue;
    }
    std::size_t power = 1;
    for (std::size_t i = 1; i < p.arity(); ++i) power *= t;
    bound += p.arity() * power * n_objects;
  }
  return bound;
}

}  // namespace gplan
