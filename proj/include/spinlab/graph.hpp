#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinlab/rng.hpp"

namespace spinlab {

struct Bipartition {
    std::vector<int> left;
    std::vector<int> right;
};

/// Simple undirected graph: symmetric adjacency, no self-loops, no parallel
/// edges. Vertices are 0..n-1. `order` is a strict total order on vertices
/// (order[v] = rank); it defaults to index order and is what the SAW-tree
/// construction ties its cycle-closing rule to.
class Graph {
  public:
    Graph() = default;
    Graph(int n, std::vector<std::pair<int, int>> edge_list,
          std::optional<Bipartition> bipartition = std::nullopt);

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    /// (neighbor, edge index) pairs, neighbor-sorted.
    const std::vector<std::pair<int, int>>& incident(int v) const { return inc_[v]; }

    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    int max_degree() const;
    /// Max degree restricted to one side of the bipartition.
    int max_degree_of(const std::vector<int>& side) const;

    bool has_edge(int u, int v) const;
    bool has_triangle() const;

    const std::optional<Bipartition>& bipartition() const { return parts_; }
    bool is_left(int v) const;

    const std::vector<int>& vertex_order() const { return order_; }
    void set_vertex_order(std::vector<int> order);

  private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;          // u < v, sorted
    std::vector<std::vector<int>> adj_;               // sorted neighbor lists
    std::vector<std::vector<std::pair<int, int>>> inc_;
    std::optional<Bipartition> parts_;
    std::vector<char> left_mask_;
    std::vector<int> order_;
};

Graph make_path(int n);
Graph make_cycle(int n);
Graph make_complete(int n);
Graph make_star(int leaves);
Graph make_complete_bipartite(int l, int r);

/// d-regular simple graph on n vertices via stub matching with swap repair.
Graph random_regular(int n, int d, RngStream& rng);

/// (dl, dr)-biregular simple bipartite graph; requires nl*dl == nr*dr.
Graph random_bipartite_biregular(int nl, int nr, int dl, int dr, RngStream& rng);

/// Text format: first line `n m` or `n m bipartite l r`, then m lines `u v`.
Graph load_graph(std::istream& in);
Graph load_graph_file(const std::string& path);
void save_graph(const Graph& g, std::ostream& out);

}  // namespace spinlab
