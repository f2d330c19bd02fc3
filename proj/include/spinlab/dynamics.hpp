#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spinlab/config.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/partition.hpp"
#include "spinlab/rng.hpp"
#include "spinlab/spin_system.hpp"

namespace spinlab {

/// State of a running chain: a full configuration (pinned vertices frozen)
/// plus the step counter. Randomness lives in the caller's stream.
struct ChainState {
    Config config;
    std::int64_t step_count = 0;
};

/// Resample vertex v from its conditional given the rest of the state.
/// Pinned v is a no-op that keeps the pinned value. Throws FrozenStateError
/// when every conditional weight is zero.
void glauber_step(const SpinSystem& system, ChainState& state, int v, RngStream& rng);

/// T steps of (uniform vertex, glauber_step). When `sweep` is nonempty the
/// uniform choice is over that vertex set instead of all of V.
void run_glauber(const SpinSystem& system, ChainState& state, std::int64_t T, RngStream& rng,
                 const std::vector<int>& sweep = {});

/// One transition of the k<->l down-up walk on a partition: pick R in
/// C([k], l) uniformly; Complement mode resamples V \ U_R from the
/// conditional (the paper's walk), Block mode resamples U_R itself.
/// Resampling enumerates the resampled vertices' joint conditional.
void down_up_step(const SpinSystem& system, const Partition& p, int ell, ResampleMode mode,
                  ChainState& state, RngStream& rng);

/// Exact conditional resample of `targets` given the rest of `config`.
void resample_exact(const SpinSystem& system, const std::vector<int>& targets, Config& config,
                    RngStream& rng);

struct SimDownUpParams {
    std::int64_t T0 = 1;
    std::int64_t T1 = 1;
    int base_level = 0;  // recursion stops when |R| >= base_level (= k-2M)
    int M = 1;
    double eta = 0.5;
    double c_const = 4.0;

    void validate(int k) const;
};

/// Schedule from the mixing time of the easy regime:
/// C = c*M/eta, T0 = ceil(t_mix_eta * C * L), T1 = ceil(C * L) with
/// L = max(1, log(n/eps)).
SimDownUpParams set_simdownup_schedule(std::int64_t t_mix_eta, int n, double epsilon, int M,
                                       double eta, double c_const = 4.0);

/// Recursive simulated down-up sampler. R indexes the pinned blocks whose
/// configuration is frozen from X; returns the resampled values on the free
/// vertices V \ U_R (as a pinning-style partial config). Deterministic given
/// the stream: recursion at iteration t uses rng.child(t).
PartialConfig sim_down_up(const SpinSystem& system, const Partition& p, const Config& X,
                          const std::vector<int>& R, const SimDownUpParams& params,
                          RngStream rng);

/// Convenience: one full sample via sim_down_up(R = {}).
Config sim_down_up_sample(const SpinSystem& system, const Partition& p, const Config& start,
                          const SimDownUpParams& params, RngStream rng);

/// One step of the bipartite block dynamics B: pick S in C([k], 2M)
/// uniformly and resample X_{U_S ∪ V_R} given X_{V_L \ U_S}. The resample
/// first draws X_{U_S} from its conditional marginal (right part summed
/// out), then each right vertex from its conditional given the left side.
void bipartite_block_step(const SpinSystem& system, const Partition& left_partition, int M,
                          ChainState& state, RngStream& rng);

/// The joint update above as an explicit block list, for exact matrices.
std::vector<std::vector<int>> bipartite_block_sets(const SpinSystem& system,
                                                   const Partition& left_partition, int M);

struct UpdateRecord {
    int vertex = 0;
    std::uint64_t tag = 0;  // randomness tag, shared across censorings
    bool censored = false;
};

struct UpdateSchedule {
    std::vector<UpdateRecord> records;

    UpdateSchedule with_mask(std::uint64_t keep_mask) const;  // bit i clear => censor record i
    int active_count() const;
};

UpdateSchedule random_schedule(const SpinSystem& system, int length, RngStream& rng);

/// Per-vertex total orders on spins: rank[v][s] is the position of spin s
/// (larger rank = larger spin).
struct SpinOrders {
    std::vector<std::vector<int>> rank;

    static SpinOrders identity(int n, int q);
    /// Bipartite hardcore order: + above - on the left, - above + on the right.
    static SpinOrders bipartite_hardcore(const Graph& g);
    Spin max_spin(int v, const std::vector<Spin>& domain) const;
};

struct MonotoneCheck {
    bool monotone = true;
    Config witness_low, witness_high;
    int witness_vertex = -1;
};

/// Verifies that every single-site update preserves the partial order
/// induced by `orders` (stochastic dominance of the two conditionals), by
/// exhausting comparable pairs of domain-valid configurations.
MonotoneCheck check_monotone(const SpinSystem& system, const SpinOrders& orders);

/// The unique maximal configuration under `orders` (pinned vertices frozen).
Config maximal_config(const SpinSystem& system, const SpinOrders& orders);

/// Exact engine: pushes a point mass at `start` through the uncensored
/// update operators P_v in order and returns the resulting distribution
/// over the support of mu.
ExactDistribution censored_run_exact(const SpinSystem& system, const UpdateSchedule& schedule,
                                     const Config& start);

/// Monte Carlo engine: one trajectory; randomness for record i comes from
/// its tag, so censored variants share update randomness.
Config censored_run_mc(const SpinSystem& system, const UpdateSchedule& schedule,
                       const Config& start, std::uint64_t seed);

struct ChainSpec {
    enum Kind { Glauber, DownUp, BipartiteBlock } kind = Glauber;
    Partition partition;          // DownUp / BipartiteBlock
    int ell = 1;                  // DownUp
    ResampleMode mode = ResampleMode::Complement;
    int M = 1;                    // BipartiteBlock
};

TransitionMatrix chain_matrix(const SpinSystem& system, const ChainSpec& spec);
void chain_step(const SpinSystem& system, const ChainSpec& spec, ChainState& state,
                RngStream& rng);

struct MixingEstimate {
    std::int64_t t_mix = 0;
    std::vector<double> tv_curve;   // tv after each step (worst start / empirical)
    double bias_bound = 0.0;        // multinomial TV-estimation bias (MC mode)
    bool converged = true;
};

/// Worst-start mixing time straight from a transition matrix.
MixingEstimate mixing_time_of_matrix(const TransitionMatrix& tm, double eps,
                                     std::int64_t t_cap = 100000);

/// Exact mode: evolve all point-mass starts through the chain matrix and
/// return the first t where the worst-start TV drops to eps.
MixingEstimate estimate_mixing_exact(const SpinSystem& system, const ChainSpec& spec, double eps,
                                     std::int64_t t_cap = 100000);

/// MC mode: empirical TV against the exact distribution from `replicas`
/// i.i.d. trajectories, with the estimation bias bound reported. The start
/// is `start` (e.g. the maximal state for monotone systems).
MixingEstimate estimate_mixing_mc(const SpinSystem& system, const ChainSpec& spec, double eps,
                                  int replicas, const Config& start, RngStream rng,
                                  std::int64_t t_cap = 100000, int jobs = 1);

}  // namespace spinlab
