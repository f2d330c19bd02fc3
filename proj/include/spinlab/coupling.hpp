#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "spinlab/config.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/rng.hpp"
#include "spinlab/spin_system.hpp"

namespace spinlab {

/// One draw from a coupling of two conditional distributions.
struct CouplingSample {
    Config x;
    Config y;
    std::vector<int> discrepancy;  // vertices where x and y differ
    long long cost = 0;            // H_rho(x, y)
};

/// Maximal coupling of two distributions on [q] with deterministic
/// tie-breaking: shared mass matched in spin-index order, residual mass
/// matched by ascending spin index on both sides. Returns the q x q joint.
Eigen::MatrixXd maximal_coupling(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Recursive coupling engine shared by the 2-spin and list-coloring
/// constructions. The recursion simulates vertex splitting with accumulated
/// pinnings on the original graph and memoizes exact single-vertex
/// marginals, so repeated sampling is cheap.
///
/// Requires every edge to carry the same interaction matrix.
class RecursiveCouplingEngine {
  public:
    RecursiveCouplingEngine(const SpinSystem& system, HammingWeight rho);

    /// Couple X ~ mu^{pin ∧ v<-a} with Y ~ mu^{pin ∧ v<-b}. Both
    /// conditionals must be feasible.
    CouplingSample sample(const PartialConfig& pin, int v, Spin a, Spin b, RngStream& rng);

    /// Exact marginal of v under the given pinning (memoized).
    Eigen::VectorXd pinned_marginal(const PartialConfig& pin, int v);

    std::size_t cache_size() const { return marginal_cache_.size(); }

  private:
    enum : std::uint8_t { kFree = 0, kPinned = 1, kDetached = 2 };

    struct VertexState {
        std::uint8_t status = kFree;
        Spin pin = 0;
        // Spin-value counts of constraints folded from detached neighbors;
        // the field multiplier at c is prod_s A(s, c)^count[s].
        std::vector<std::uint8_t> constraint;
    };

    using State = std::vector<VertexState>;

    State initial_state(const PartialConfig& pin) const;
    const Eigen::VectorXd& marginal(const State& s, int u);
    Config sample_config(State s, RngStream& rng);
    /// Given X ~ mu_s^{v<-a} (with X[v] == a), returns Y from the coupling's
    /// conditional second marginal. `depth` guards the recursion.
    Config couple_given(const State& s, int v, Spin a, Spin b, Config x, RngStream& rng,
                        int depth);

    std::vector<int> free_component(const State& s, int u) const;
    std::uint64_t state_key(const State& s, const std::vector<int>& comp, int u) const;
    double multiplier(const VertexState& vs, Spin c) const;

    const SpinSystem system_;
    Eigen::MatrixXd A_;  // the shared interaction matrix
    HammingWeight rho_;
    std::unordered_map<std::uint64_t, Eigen::VectorXd> marginal_cache_;
};

/// Coupling of Lemma-style 2-spin conditionals: X ~ mu^{pin ∧ v<- -},
/// Y ~ mu^{pin ∧ v<- +}. q must be 2.
CouplingSample recursive_coupling_two_spin(const SpinSystem& system, const PartialConfig& pin,
                                           int v, RngStream& rng);

/// List-coloring analogue for triangle-free graphs; couples v <- a with
/// v <- b. Checks and enforces triangle-freeness.
CouplingSample recursive_coupling_coloring(const SpinSystem& system, const PartialConfig& pin,
                                           int v, Spin a, Spin b, RngStream& rng);

enum class CouplingKind { TwoSpin, Coloring };

struct CiPairReport {
    PartialConfig pin;
    int vertex = 0;
    Spin a = 0, b = 0;
    double mean = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // Bernstein confidence interval
    int samples = 0;
};

struct CiEstimate {
    double max_ratio = 0.0;  // max over tested pairs of E[H_rho] / rho(v0)
    int argmax_pair = -1;
    bool target_met = true;
    std::vector<CiPairReport> pairs;
};

struct CiOptions {
    int pairs = 0;             // 0: enumerate exhaustively (small instances)
    int samples_per_pair = 1000;
    double target = 0.0;       // 0: no target check
    double slack = 0.0;
    double pin_probability = 0.5;         // sampled-pinning mode
    std::vector<int> restrict_hamming;    // accounting subset; empty = all
    double confidence = 0.99;
};

/// Empirical coupling-independence estimate: max over tested
/// (pinning, v, value pair) triples of the Monte Carlo mean of H_rho,
/// normalized by rho(v0). The result is an empirical lower bound on the
/// true CI constant; worst-case certification by sampling is impossible.
CiEstimate estimate_ci(const SpinSystem& system, const HammingWeight& rho, CouplingKind kind,
                       const CiOptions& opts, RngStream rng);

struct GofResult {
    bool pass = true;
    double p_value = 1.0;
    double statistic = 0.0;
    int dof = 0;
};

/// Chi-square goodness-of-fit gate of sampled configurations against an
/// exact target distribution. Off-support samples fail outright.
GofResult marginal_validity_test(const std::function<Config(RngStream&)>& sampler,
                                 const ExactDistribution& target, int samples, RngStream rng,
                                 double p_threshold = 1e-4);

}  // namespace spinlab
