#pragma once

#include <random>

#include "gplan/lookahead.hpp"

namespace gplan::testing {

// |a xor b| over atoms.
std::size_t delta_size(const State& a, const State& b);
// Goal atoms whose truth differs between `a` and `b`.
std::size_t goal_delta_size(const State& a, const State& b, const Task& task);

// Expected hyperedge count of the aggregated-delta graph, computed from the
// tree's state sets alone.
std::size_t ad_expected_edges(const LookaheadTree& tree, const Task& task);

// Lookahead from a random-walk root with a random variant, capacity and depth cap.
LookaheadTree random_tree(const Task& task, std::mt19937_64& rng);

}  // namespace gplan::testing
