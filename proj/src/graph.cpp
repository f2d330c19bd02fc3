#include "spinlab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "spinlab/errors.hpp"

namespace spinlab {

Graph::Graph(int n, std::vector<std::pair<int, int>> edge_list,
             std::optional<Bipartition> bipartition)
    : n_(n), parts_(std::move(bipartition)) {
    if (n < 0) throw DomainError("graph: negative vertex count");
    for (auto& [u, v] : edge_list) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw DomainError("graph: vertex out of range");
        if (u == v) throw DomainError("graph: self-loop");
        if (u > v) std::swap(u, v);
    }
    std::sort(edge_list.begin(), edge_list.end());
    if (std::adjacent_find(edge_list.begin(), edge_list.end()) != edge_list.end())
        throw DomainError("graph: parallel edge");
    edges_ = std::move(edge_list);

    adj_.assign(n_, {});
    inc_.assign(n_, {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        auto [u, v] = edges_[e];
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        inc_[u].emplace_back(v, e);
        inc_[v].emplace_back(u, e);
    }
    for (int v = 0; v < n_; ++v) {
        std::sort(adj_[v].begin(), adj_[v].end());
        std::sort(inc_[v].begin(), inc_[v].end());
    }

    if (parts_) {
        left_mask_.assign(n_, 0);
        std::vector<char> seen(n_, 0);
        for (int v : parts_->left) {
            if (v < 0 || v >= n_ || seen[v]) throw DomainError("graph: bad bipartition");
            seen[v] = 1;
            left_mask_[v] = 1;
        }
        for (int v : parts_->right) {
            if (v < 0 || v >= n_ || seen[v]) throw DomainError("graph: bad bipartition");
            seen[v] = 1;
        }
        if (std::count(seen.begin(), seen.end(), 1) != n_)
            throw DomainError("graph: bipartition does not cover V");
        for (auto [u, v] : edges_)
            if (left_mask_[u] == left_mask_[v])
                throw DomainError("graph: edge inside one part of the bipartition");
        std::sort(parts_->left.begin(), parts_->left.end());
        std::sort(parts_->right.begin(), parts_->right.end());
    }

    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
}

int Graph::max_degree() const {
    int d = 0;
    for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
    return d;
}

int Graph::max_degree_of(const std::vector<int>& side) const {
    int d = 0;
    for (int v : side) d = std::max(d, degree(v));
    return d;
}

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

bool Graph::has_triangle() const {
    for (auto [u, v] : edges_)
        for (int w : adj_[u])
            if (w != v && has_edge(w, v)) return true;
    return false;
}

bool Graph::is_left(int v) const {
    if (!parts_) throw DomainError("graph: no bipartition declared");
    return left_mask_[v] != 0;
}

void Graph::set_vertex_order(std::vector<int> order) {
    if (static_cast<int>(order.size()) != n_) throw DomainError("vertex order: wrong size");
    std::vector<char> seen(n_, 0);
    for (int r : order) {
        if (r < 0 || r >= n_ || seen[r]) throw DomainError("vertex order: not a permutation");
        seen[r] = 1;
    }
    order_ = std::move(order);
}

Graph make_path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, std::move(e));
}

Graph make_cycle(int n) {
    if (n < 3) throw DomainError("cycle: need n >= 3");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, std::move(e));
}

Graph make_complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return Graph(n, std::move(e));
}

Graph make_star(int leaves) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return Graph(leaves + 1, std::move(e));
}

Graph make_complete_bipartite(int l, int r) {
    std::vector<std::pair<int, int>> e;
    Bipartition parts;
    for (int i = 0; i < l; ++i) parts.left.push_back(i);
    for (int j = 0; j < r; ++j) parts.right.push_back(l + j);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < r; ++j) e.emplace_back(i, l + j);
    return Graph(l + r, std::move(e), parts);
}

namespace {

// Pair up stubs, then repair self-loops / duplicates by random swaps.
std::vector<std::pair<int, int>> match_stubs(std::vector<int> stubs, RngStream& rng,
                                             const std::function<bool(int, int)>& allowed) {
    // Fisher-Yates shuffle.
    for (int i = static_cast<int>(stubs.size()) - 1; i > 0; --i)
        std::swap(stubs[i], stubs[rng.below(i + 1)]);
    const int m = static_cast<int>(stubs.size()) / 2;
    std::vector<std::pair<int, int>> pairs(m);
    for (int i = 0; i < m; ++i) pairs[i] = {stubs[2 * i], stubs[2 * i + 1]};

    auto count_multi = [&](const std::vector<std::pair<int, int>>& ps) {
        std::set<std::pair<int, int>> seen;
        std::vector<int> bad;
        for (int i = 0; i < m; ++i) {
            auto [u, v] = ps[i];
            auto key = std::minmax(u, v);
            if (u == v || !allowed(u, v) || !seen.insert({key.first, key.second}).second)
                bad.push_back(i);
        }
        return bad;
    };

    for (int attempt = 0; attempt < 200000; ++attempt) {
        auto bad = count_multi(pairs);
        if (bad.empty()) return pairs;
        // swap one endpoint of a bad pair with a uniformly random pair
        int i = bad[rng.below(static_cast<int>(bad.size()))];
        int j = rng.below(m);
        if (i == j) continue;
        std::swap(pairs[i].second, pairs[j].second);
    }
    throw ConstructionError("random graph: stub repair did not converge", 0, 0);
}

}  // namespace

Graph random_regular(int n, int d, RngStream& rng) {
    if (n * d % 2 != 0) throw DomainError("random_regular: n*d must be even");
    if (d >= n) throw DomainError("random_regular: d must be < n");
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < d; ++i) stubs.push_back(v);
    auto pairs = match_stubs(std::move(stubs), rng, [](int, int) { return true; });
    return Graph(n, std::move(pairs));
}

Graph random_bipartite_biregular(int nl, int nr, int dl, int dr, RngStream& rng) {
    if (nl * dl != nr * dr)
        throw DomainError("random_bipartite_biregular: nl*dl must equal nr*dr");
    // Stubs on the left match stubs on the right directly.
    std::vector<int> right_stubs;
    for (int v = 0; v < nr; ++v)
        for (int i = 0; i < dr; ++i) right_stubs.push_back(nl + v);
    for (int i = static_cast<int>(right_stubs.size()) - 1; i > 0; --i)
        std::swap(right_stubs[i], right_stubs[rng.below(i + 1)]);

    const int m = nl * dl;
    std::vector<std::pair<int, int>> pairs(m);
    for (int v = 0, s = 0; v < nl; ++v)
        for (int i = 0; i < dl; ++i, ++s) pairs[s] = {v, right_stubs[s]};

    for (int attempt = 0; attempt < 200000; ++attempt) {
        std::set<std::pair<int, int>> seen;
        std::vector<int> bad;
        for (int i = 0; i < m; ++i)
            if (!seen.insert(pairs[i]).second) bad.push_back(i);
        if (bad.empty()) break;
        int i = bad[rng.below(static_cast<int>(bad.size()))];
        int j = rng.below(m);
        std::swap(pairs[i].second, pairs[j].second);
        if (attempt == 199999)
            throw ConstructionError("random bipartite graph: repair did not converge", 0, 0);
    }

    Bipartition parts;
    for (int v = 0; v < nl; ++v) parts.left.push_back(v);
    for (int v = 0; v < nr; ++v) parts.right.push_back(nl + v);
    return Graph(nl + nr, std::move(pairs), parts);
}

Graph load_graph(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw DomainError("graph file: empty input");
    std::istringstream hs(header);
    int n = 0, m = 0;
    if (!(hs >> n >> m)) throw DomainError("graph file: bad header");
    std::string tag;
    std::optional<Bipartition> parts;
    if (hs >> tag) {
        if (tag != "bipartite") throw DomainError("graph file: unknown header tag '" + tag + "'");
        int l = 0, r = 0;
        if (!(hs >> l >> r) || l + r != n) throw DomainError("graph file: bad bipartite sizes");
        Bipartition b;
        for (int v = 0; v < l; ++v) b.left.push_back(v);
        for (int v = 0; v < r; ++v) b.right.push_back(l + v);
        parts = std::move(b);
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(m);
    for (int e = 0; e < m; ++e) {
        int u = 0, v = 0;
        if (!(in >> u >> v)) throw DomainError("graph file: truncated edge list");
        edges.emplace_back(u, v);
    }
    return Graph(n, std::move(edges), std::move(parts));
}

Graph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open graph file: " + path);
    return load_graph(in);
}

void save_graph(const Graph& g, std::ostream& out) {
    out << g.vertex_count() << ' ' << g.edge_count();
    if (g.bipartition())
        out << " bipartite " << g.bipartition()->left.size() << ' '
            << g.bipartition()->right.size() << '\n';
    else
        out << '\n';
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace spinlab
