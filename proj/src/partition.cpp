#include "spinlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spinlab/errors.hpp"

namespace spinlab {

void Partition::validate() const {
    if (k != static_cast<int>(blocks.size())) throw DomainError("partition: k != #blocks");
    std::vector<int> all;
    for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw DomainError("partition: blocks are not disjoint");
    std::vector<int> cov = cover;
    std::sort(cov.begin(), cov.end());
    if (all != cov) throw DomainError("partition: blocks do not cover the declared vertex set");
}

std::vector<int> Partition::block_of() const {
    int n = 0;
    for (int v : cover) n = std::max(n, v + 1);
    std::vector<int> out(n, -1);
    for (int i = 0; i < k; ++i)
        for (int v : blocks[i]) out[v] = i;
    return out;
}

DegreeCheck verify_degree_partition(const Graph& g, const Partition& p, double xi) {
    DegreeCheck out;
    out.bound = (1.0 + xi) * g.max_degree() / p.k;
    std::vector<char> in_block(g.vertex_count());
    for (int i = 0; i < p.k; ++i) {
        std::fill(in_block.begin(), in_block.end(), 0);
        for (int v : p.blocks[i]) in_block[v] = 1;
        for (int v = 0; v < g.vertex_count(); ++v) {
            int cnt = 0;
            for (int u : g.neighbors(v)) cnt += in_block[u];
            if (cnt > out.worst_count) {
                out.worst_count = cnt;
                out.worst_vertex = v;
                out.worst_block = i;
            }
        }
    }
    out.ok = out.worst_count <= out.bound;
    return out;
}

bool verify_balanced(const Partition& p) {
    const double need = static_cast<double>(p.cover.size()) / (2.0 * p.k);
    for (const auto& b : p.blocks)
        if (static_cast<double>(b.size()) < need) return false;
    return true;
}

DegreeCheck verify_left_partition(const Graph& g, const Partition& p, int bound) {
    if (!g.bipartition()) throw DomainError("left partition: graph is not bipartite");
    DegreeCheck out;
    out.bound = bound;
    std::vector<char> in_block(g.vertex_count());
    for (int i = 0; i < p.k; ++i) {
        std::fill(in_block.begin(), in_block.end(), 0);
        for (int v : p.blocks[i]) {
            if (!g.is_left(v)) throw DomainError("left partition: block contains a right vertex");
            in_block[v] = 1;
        }
        for (int v : g.bipartition()->right) {
            int cnt = 0;
            for (int u : g.neighbors(v)) cnt += in_block[u];
            if (cnt > out.worst_count) {
                out.worst_count = cnt;
                out.worst_vertex = v;
                out.worst_block = i;
            }
        }
    }
    out.ok = out.worst_count <= bound;
    return out;
}

double lll_condition_lhs(int delta, int k, double xi) {
    double d = delta;
    return std::exp(1.0) * d * d * k * std::exp(-2.0 * xi * xi * d / (k * k));
}

PartitionParameters partition_parameters(double M, double eta) {
    if (!(M >= 1.0) || !(eta > 0.0) || eta > 1.0)
        throw DomainError("partition parameters: need M >= 1 and eta in (0,1]");
    PartitionParameters out;
    out.k = static_cast<int>(std::ceil(4.0 * std::ceil(M) / eta));
    out.xi = 1.0;
    // Smallest Delta past the LLL peak (at k^2) where the condition holds.
    int delta = std::max(3, out.k * out.k);
    while (lll_condition_lhs(delta, out.k, out.xi) >= 1.0) {
        ++delta;
        if (delta > (1 << 28)) throw DomainError("partition parameters: LLL scan diverged");
    }
    out.delta0 = delta;
    double logk = std::max(1.0, std::log(static_cast<double>(out.k)));
    out.c = delta / (static_cast<double>(out.k) * out.k * logk);
    return out;
}

Partition construct_partition(const Graph& g, int k, double xi, PartitionMode mode,
                              const PartitionBudget& budget, RngStream rng,
                              PartitionStats* stats, int left_bound) {
    if (k < 1) throw DomainError("construct_partition: k must be >= 1");
    std::vector<int> cover;
    if (mode == PartitionMode::BipartiteLeft) {
        if (!g.bipartition())
            throw DomainError("construct_partition: bipartite mode needs a bipartition");
        cover = g.bipartition()->left;
        if (left_bound < 0) left_bound = g.max_degree_of(cover);
    } else {
        cover.resize(g.vertex_count());
        std::iota(cover.begin(), cover.end(), 0);
    }

    PartitionStats local;
    local.lll_condition_holds = lll_condition_lhs(g.max_degree(), k, xi) < 1.0;
    int copies = budget.copies > 0
                     ? budget.copies
                     : static_cast<int>(std::ceil(std::log2(2.0 / budget.epsilon)));
    int rounds_per_copy =
        std::max(1, static_cast<int>(std::llround(budget.max_round_time_factor)));

    Partition p;
    p.k = k;
    p.cover = cover;

    for (int copy = 0; copy < copies; ++copy) {
        RngStream copy_rng = rng.child(static_cast<std::uint64_t>(copy));
        ++local.copies_used;
        for (int round = 0; round < rounds_per_copy; ++round) {
            ++local.rounds;
            p.blocks.assign(k, {});
            for (int v : cover) p.blocks[copy_rng.below(k)].push_back(v);
            bool ok = false;
            switch (mode) {
                case PartitionMode::General:
                    ok = verify_degree_partition(g, p, xi).ok;
                    break;
                case PartitionMode::Balanced:
                    ok = verify_degree_partition(g, p, xi).ok && verify_balanced(p);
                    break;
                case PartitionMode::BipartiteLeft:
                    ok = verify_left_partition(g, p, left_bound).ok;
                    break;
            }
            if (ok) {
                for (auto& b : p.blocks) std::sort(b.begin(), b.end());
                p.validate();
                if (stats) *stats = local;
                return p;
            }
        }
    }
    if (stats) *stats = local;
    throw ConstructionError("construct_partition: budget exhausted after " +
                                std::to_string(local.rounds) + " rounds across " +
                                std::to_string(local.copies_used) + " copies",
                            local.rounds, local.copies_used);
}

}  // namespace spinlab
