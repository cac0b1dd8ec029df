#pragma once

#include "tsce/engine.hpp"
#include "tsce/graph.hpp"

#include <cstddef>
#include <set>
#include <string>

namespace tsce {

/// Keeps the root -> target path and, below every path node, descendants up
/// to relative depth w. Indicators and sequence ids are carried over as is.
/// When (var, t) occurs several times, the single expanded occurrence is used.
ExplanationTree path_channel(const ExplanationTree& tree, const TimedVar& target, int w);

/// Removes masked variables and bridges every path whose interior lies wholly
/// in the mask with one edge: weight = product of path weights, lag = sum of
/// lags. Bridges and pre-existing edges with equal (src, dst, lag) are summed;
/// sums of exactly zero are dropped. Throws invalid_argument when more than
/// `max_paths` bridging paths exist.
TemporalCausalGraph mask_graph(const TemporalCausalGraph& graph, const std::set<std::string>& masked,
                               std::size_t max_paths = 100000);

/// Tree counterpart: masked inner nodes are spliced out, their children hang
/// off the grandparent with the product weight and re-evaluated indicators,
/// and siblings that end up sharing (var, t) are merged by summing weights.
/// Masking the root's variable or a variable that never gets explained is
/// rejected.
ExplanationTree mask_tree(const ExplanationTree& tree, const std::set<std::string>& masked);

/// Absorbs runs of at most `max_gap` interrupting nodes that sit between two
/// sequence segments of one variable with equal child signatures. With
/// `rewrite`, the interrupters' child indicators are overwritten with the
/// surrounding signature. Topology is unchanged.
ExplanationTree leave_n_out(const ExplanationTree& tree, int max_gap, bool rewrite = false);

}  // namespace tsce
