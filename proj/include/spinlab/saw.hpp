#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spinlab/exact.hpp"
#include "spinlab/spin_system.hpp"

namespace spinlab {

/// Rooted tree of self-avoiding walks. Each node carries its origin vertex
/// in G; cycle-closing and pinned copies are leaves with a forced spin.
struct SAWNode {
    int origin = 0;
    int parent = -1;
    std::vector<int> children;
    std::optional<Spin> forced;
    int depth = 0;
};

struct SAWTree {
    std::vector<SAWNode> nodes;  // node 0 is the root
    int root = 0;
    PartialConfig source_pinning;

    int size() const { return static_cast<int>(nodes.size()); }
    std::string to_dot() const;
};

struct SAWTreeResult {
    SAWTree tree;
    SpinSystem system;  // 2-spin system on the tree, forced copies pinned
};

/// Weitz SAW tree of a 2-spin system rooted at `root`, with the system's
/// pinning extended into the tree (free copies of pinned vertices become
/// pinned leaves). Cycle-closing leaves are forced by the vertex-order rule.
/// Throws SizeError when the walk depth exceeds depth_cap, DomainError if
/// the root is pinned or q != 2.
SAWTreeResult build_saw_tree(const SpinSystem& system, int root, int depth_cap = 64);

/// Root marginal of the tree system by the leaf-to-root ratio recursion.
/// Equals the root marginal of the original system (the Weitz identity).
Eigen::Vector2d saw_root_marginal(const SAWTreeResult& t);

struct TreeInfluence {
    std::vector<double> psi;        // signed influence of the root on each node
    std::vector<double> level_sum;  // sum of |psi| per depth
    /// Sum of |psi| over all copies of origin vertex u.
    std::vector<double> per_origin_sum;
};

/// Influence of the root on every tree node, computed edge-wise from exact
/// two-node conditional marginals and multiplied along root-to-node paths
/// (influences factorize over tree paths).
TreeInfluence tree_influence(const SAWTreeResult& t);

}  // namespace spinlab
