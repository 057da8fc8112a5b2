#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gplan/ground.hpp"

namespace gplan {

// How object slots are compressed when testing novelty.
//   identity: r(o) = o        (plain IW)
//   type:     r(o) = type(o)  (AIW)
//   base:     r(o) = object   (BAIW)
enum class Reduction { identity, type, base };

const char* to_string(Reduction r);

struct Slot {
  bool is_type = false;
  std::uint32_t id = 0;  // ObjectId or TypeId
  bool operator==(const Slot&) const = default;
  auto operator<=>(const Slot&) const = default;
};

struct AbstractAtom {
  PredicateId predicate = 0;
  std::vector<Slot> slots;
  bool operator==(const AbstractAtom&) const = default;
  auto operator<=>(const AbstractAtom&) const = default;
};

std::string to_string(const AbstractAtom& a, const Task& task);

// The abstracted forms F(q) of an atom. Goal atoms and the identity reduction
// give the atom itself; otherwise an n-ary atom yields n forms, form i keeping
// slot i concrete and reducing the rest.
std::vector<AbstractAtom> abstraction_forms(AtomId atom, Reduction reduction, const Task& task);

// Seen-set over abstracted atoms (width 1) or abstracted atom pairs (width 2).
class NoveltyTable {
 public:
  // When `register_pruned` is false only states judged novel are inserted.
  NoveltyTable(const Task& task, int width, Reduction reduction, bool register_pruned = true);

  // True iff `s` contains an unseen abstracted tuple of size <= width. The
  // tuples of `s` are then inserted (always, unless register_pruned is off
  // and the state was not novel).
  bool check_and_register(const State& s);

  bool is_novel(const State& s);
  void register_state(const State& s);

  int width() const { return width_; }
  Reduction reduction() const { return reduction_; }
  // Number of distinct tuples seen so far.
  std::size_t size() const { return seen_.size(); }

 private:
  using Key = std::string;

  const std::vector<Key>& forms_of(AtomId a);
  template <typename Fn>
  bool for_each_tuple(const State& s, Fn&& fn);

  const Task& task_;
  int width_;
  Reduction reduction_;
  bool register_pruned_;
  std::unordered_set<Key> seen_;
  std::unordered_map<AtomId, std::vector<Key>> form_cache_;
};

// Upper bound on seen-set growth for the type reduction at width 1:
// sum over predicates of arity * t^(arity-1) * |objects|, plus |goal|, plus
// one per nullary predicate. t counts all declared types including the root.
std::size_t novel_capacity_bound(const Task& task);

}  // namespace gplan
