#include "spinlab/saw.hpp"

#include <algorithm>
#include <sstream>

#include "spinlab/errors.hpp"

namespace spinlab {

namespace {

struct Builder {
    const SpinSystem& sys;
    const Graph& g;
    const std::vector<int>& order;
    int depth_cap;
    SAWTree tree;
    std::vector<int> path;       // origins along the current root-to-node walk
    std::vector<char> on_path;   // indexed by origin vertex
    std::vector<int> path_succ;  // successor of each on-path vertex along the walk

    Builder(const SpinSystem& s, int cap)
        : sys(s), g(s.graph()), order(s.graph().vertex_order()), depth_cap(cap) {
        on_path.assign(g.vertex_count(), 0);
        path_succ.assign(g.vertex_count(), -1);
    }

    int add_node(int origin, int parent, int depth, std::optional<Spin> forced) {
        SAWNode node;
        node.origin = origin;
        node.parent = parent;
        node.depth = depth;
        node.forced = forced;
        tree.nodes.push_back(node);
        int id = static_cast<int>(tree.nodes.size()) - 1;
        if (parent >= 0) tree.nodes[parent].children.push_back(id);
        return id;
    }

    // Expand the free node `id` whose origin is `v`, reached from `from`.
    void expand(int id, int v, int from, int depth) {
        if (depth > depth_cap) throw SizeError("saw tree: depth cap exceeded");
        on_path[v] = 1;
        if (from >= 0) path_succ[from] = v;
        for (int u : g.neighbors(v)) {  // neighbor order = ascending index
            if (u == from) continue;
            if (on_path[u]) {
                // Cycle closing: the walk is u -> succ(u) -> ... -> v -> u.
                // Forced - iff the successor of u outranks v.
                Spin forced = order[path_succ[u]] > order[v] ? Spin{0} : Spin{1};
                add_node(u, id, depth + 1, forced);
                continue;
            }
            if (sys.is_pinned(u)) {
                // Pinning extension: free copies of pinned vertices become
                // pinned leaves with no descendants.
                add_node(u, id, depth + 1, sys.pinned_value(u));
                continue;
            }
            int child = add_node(u, id, depth + 1, std::nullopt);
            expand(child, u, v, depth + 1);
        }
        on_path[v] = 0;
        if (from >= 0) path_succ[from] = -1;
    }
};

}  // namespace

SAWTreeResult build_saw_tree(const SpinSystem& system, int root, int depth_cap) {
    if (system.q() != 2) throw DomainError("saw tree: q must be 2");
    if (root < 0 || root >= system.vertex_count()) throw DomainError("saw tree: bad root");
    if (system.is_pinned(root)) throw DomainError("saw tree: root is pinned");

    Builder b(system, depth_cap);
    b.tree.root = b.add_node(root, -1, 0, std::nullopt);
    b.tree.source_pinning = system.pinning();
    b.expand(b.tree.root, root, -1, 0);

    // Materialize the 2-spin system on the tree. Node i maps to tree vertex i.
    const int nt = b.tree.size();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < nt; ++i)
        if (b.tree.nodes[i].parent >= 0) edges.emplace_back(b.tree.nodes[i].parent, i);
    Graph tg(nt, std::move(edges));

    std::vector<std::vector<Spin>> domain(nt, {0, 1});
    std::vector<Eigen::VectorXd> field(nt);
    std::vector<Eigen::MatrixXd> inter(tg.edge_count());
    PartialConfig pin;
    for (int i = 0; i < nt; ++i) {
        field[i] = system.field(b.tree.nodes[i].origin);
        if (b.tree.nodes[i].forced) pin.set(i, *b.tree.nodes[i].forced);
    }
    // Every tree edge copies the interaction of the corresponding G edge.
    for (int e = 0; e < tg.edge_count(); ++e) {
        auto [pi_, ci_] = tg.edges()[e];
        int u = b.tree.nodes[pi_].origin, v = b.tree.nodes[ci_].origin;
        int src = -1;
        for (auto [nb, ge] : system.graph().incident(u))
            if (nb == v) {
                src = ge;
                break;
            }
        inter[e] = system.interaction(src);
    }

    SAWTreeResult out;
    out.tree = std::move(b.tree);
    out.system = SpinSystem(std::move(tg), 2, std::move(domain), std::move(field),
                            std::move(inter), std::move(pin));
    return out;
}

namespace {

// Bottom-up subtree weights W_i(c), normalized per node to dodge underflow.
// Pinned leaves contribute the indicator of their forced value; the field of
// a pinned copy never enters (conditional-weight convention on the tree).
std::vector<Eigen::Vector2d> subtree_weights(const SAWTreeResult& t) {
    const auto& nodes = t.tree.nodes;
    const int nt = static_cast<int>(nodes.size());
    std::vector<Eigen::Vector2d> w(nt);
    // Children always follow parents in construction order.
    for (int i = nt - 1; i >= 0; --i) {
        Eigen::Vector2d acc;
        if (nodes[i].forced) {
            acc = Eigen::Vector2d::Zero();
            acc[*nodes[i].forced] = 1.0;
        } else {
            acc = t.system.field(i).head<2>();
            for (int c : nodes[i].children) {
                int e = -1;
                for (auto [nb, te] : t.system.graph().incident(i))
                    if (nb == c) {
                        e = te;
                        break;
                    }
                const Eigen::MatrixXd& A = t.system.interaction(e);
                Eigen::Vector2d pass;
                pass[0] = A(0, 0) * w[c][0] + A(0, 1) * w[c][1];
                pass[1] = A(1, 0) * w[c][0] + A(1, 1) * w[c][1];
                acc = acc.cwiseProduct(pass);
            }
        }
        double mx = acc.maxCoeff();
        if (mx > 0.0) acc /= mx;  // root marginal is scale invariant
        w[i] = acc;
    }
    return w;
}

}  // namespace

Eigen::Vector2d saw_root_marginal(const SAWTreeResult& t) {
    auto w = subtree_weights(t);
    Eigen::Vector2d r = w[t.tree.root];
    double z = r.sum();
    if (!(z > 0.0)) throw InfeasibleError("saw root marginal: infeasible tree system");
    return r / z;
}

TreeInfluence tree_influence(const SAWTreeResult& t) {
    const auto& nodes = t.tree.nodes;
    const int nt = static_cast<int>(nodes.size());
    auto w = subtree_weights(t);

    TreeInfluence out;
    out.psi.assign(nt, 0.0);
    out.psi[t.tree.root] = 1.0;
    int max_depth = 0, max_origin = 0;
    for (const auto& nd : nodes) {
        max_depth = std::max(max_depth, nd.depth);
        max_origin = std::max(max_origin, nd.origin);
    }
    out.level_sum.assign(max_depth + 1, 0.0);
    out.level_sum[0] = 1.0;
    out.per_origin_sum.assign(max_origin + 1, 0.0);
    out.per_origin_sum[nodes[t.tree.root].origin] += 1.0;

    // Edge influence parent -> child from the child's subtree weights, then
    // multiply along the path from the root. Forced copies and children whose
    // conditional is undefined contribute zero.
    for (int i = 0; i < nt; ++i) {
        for (int c : nodes[i].children) {
            double edge_psi = 0.0;
            if (!nodes[c].forced) {
                int e = -1;
                for (auto [nb, te] : t.system.graph().incident(i))
                    if (nb == c) {
                        e = te;
                        break;
                    }
                const Eigen::MatrixXd& A = t.system.interaction(e);
                double zp = A(1, 0) * w[c][0] + A(1, 1) * w[c][1];
                double zm = A(0, 0) * w[c][0] + A(0, 1) * w[c][1];
                if (zp > 0.0 && zm > 0.0)
                    edge_psi = A(1, 1) * w[c][1] / zp - A(0, 1) * w[c][1] / zm;
            }
            out.psi[c] = out.psi[i] * edge_psi;
            out.level_sum[nodes[c].depth] += std::abs(out.psi[c]);
            out.per_origin_sum[nodes[c].origin] += std::abs(out.psi[c]);
        }
    }
    return out;
}

std::string SAWTree::to_dot() const {
    std::ostringstream os;
    os << "digraph saw {\n";
    for (int i = 0; i < size(); ++i) {
        os << "  n" << i << " [label=\"v" << nodes[i].origin;
        if (nodes[i].forced) os << (*nodes[i].forced == 0 ? " (-)" : " (+)");
        os << "\"];\n";
        if (nodes[i].parent >= 0) os << "  n" << nodes[i].parent << " -> n" << i << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace spinlab
