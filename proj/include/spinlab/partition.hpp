#pragma once

#include <string>
#include <vector>

#include "spinlab/graph.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

/// Ordered list of k disjoint vertex blocks covering `cover` (all of V, or
/// the left part in bipartite mode). Empty blocks are allowed.
struct Partition {
    int k = 0;
    std::vector<std::vector<int>> blocks;
    std::vector<int> cover;

    void validate() const;  // disjointness + coverage
    std::vector<int> block_of() const;  // vertex -> block index (-1 off cover)
};

struct DegreeCheck {
    bool ok = true;
    int worst_vertex = -1;
    int worst_block = -1;
    int worst_count = 0;
    double bound = 0.0;
};

/// Degree-partition verifier: every vertex v and block i must satisfy
/// |Gamma_v ∩ U_i| <= (1+xi) * Delta / k with Delta the max degree of g.
DegreeCheck verify_degree_partition(const Graph& g, const Partition& p, double xi);

/// Balance verifier: |U_i| >= |cover| / (2k) for every block.
bool verify_balanced(const Partition& p);

/// Bipartite left-partition verifier: blocks cover the left part only and
/// every right vertex sees at most `bound` neighbors per block.
DegreeCheck verify_left_partition(const Graph& g, const Partition& p, int bound);

enum class PartitionMode { General, Balanced, BipartiteLeft };

struct PartitionBudget {
    double max_round_time_factor = 2.0;
    int copies = 0;  // 0: derive from epsilon as ceil(log2(2/eps))
    double epsilon = 0.01;
};

struct PartitionStats {
    int rounds = 0;
    int copies_used = 0;
    bool lll_condition_holds = true;  // warning flag when Delta is too small
};

/// Las Vegas construction: each round assigns every cover vertex an
/// independent uniform block index and runs the verifier; failures resample
/// everything. Runs `copies` independent boosted attempts, each capped at
/// max_round_time_factor rounds; throws ConstructionError with statistics
/// when the budget is exhausted. Deterministic given (graph, params, seed).
Partition construct_partition(const Graph& g, int k, double xi, PartitionMode mode,
                              const PartitionBudget& budget, RngStream rng,
                              PartitionStats* stats = nullptr, int left_bound = -1);

struct PartitionParameters {
    int k = 0;
    double xi = 1.0;
    int delta0 = 0;   // smallest degree at which the LLL condition holds
    double c = 0.0;   // delta0 / (k^2 log k)
};

/// Pins k = ceil(4 ceil(M) / eta), xi = 1, and the smallest Delta0 with
/// e * Delta^2 * k * exp(-2 xi^2 Delta / k^2) < 1.
PartitionParameters partition_parameters(double M, double eta);

/// The left-hand side of the LLL condition above.
double lll_condition_lhs(int delta, int k, double xi);

}  // namespace spinlab
