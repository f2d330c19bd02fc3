#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "spinlab/config.hpp"
#include "spinlab/rng.hpp"
#include "spinlab/spin_system.hpp"

namespace spinlab {

/// Enumeration cap: product of domain sizes must not exceed this.
/// Overridable through the SPINLAB_STATE_CAP environment variable.
std::int64_t state_cap();

struct ConfigHash {
    std::size_t operator()(const Config& c) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (Spin s : c) {
            h ^= static_cast<std::size_t>(static_cast<unsigned char>(s));
            h *= 1099511628211ull;
        }
        return h;
    }
};

/// Exhaustively enumerated distribution: ordered support with probabilities.
/// `vertices` names the variables each support entry assigns (all of V for
/// full distributions, a subset for marginals).
struct ExactDistribution {
    std::vector<int> vertices;
    std::vector<Config> support;
    Eigen::VectorXd prob;
    double total_weight = 0.0;      // +inf possible in log mode
    double log_total_weight = -std::numeric_limits<double>::infinity();

    int size() const { return static_cast<int>(support.size()); }
    /// Index of a configuration in the support, or -1.
    int index_of(const Config& c) const;
    double prob_of(const Config& c) const;
    void validate() const;

    std::unordered_map<Config, int, ConfigHash> index;
    void build_index();
};

enum class Divergence { TV, Chi2, KL };

/// phi-divergence D_phi(nu || mu). nu and mu must be over the same vertex
/// set; chi2/KL require nu absolutely continuous w.r.t. mu.
double divergence(Divergence kind, const ExactDistribution& nu, const ExactDistribution& mu);

/// Brute-force realization of mu: all configurations with positive weight.
/// Throws SizeError past the cap and InfeasibleError on zero total weight.
ExactDistribution enumerate(const SpinSystem& system);

/// Marginal of mu on the sorted vertex set S.
ExactDistribution exact_marginal(const SpinSystem& system, const std::vector<int>& S);
ExactDistribution exact_marginal(const ExactDistribution& full, const std::vector<int>& S);

/// Row-stochastic transition matrix over an explicit state list, together
/// with its stationary distribution.
struct TransitionMatrix {
    std::vector<Config> states;
    Eigen::MatrixXd P;
    ExactDistribution stationary;

    int size() const { return static_cast<int>(states.size()); }
    /// Checks row sums (1e-12) and stationarity (1e-10); throws on failure.
    void validate() const;
    /// Max |mu(x)P(x,y) - mu(y)P(y,x)| over all pairs.
    double detailed_balance_residual() const;
};

/// Single-site heat-bath chain P = (1/n) sum_v P_v over the support of mu.
/// Pinned vertices contribute deterministic self-updates.
TransitionMatrix glauber_matrix(const SpinSystem& system);

enum class ResampleMode { Block, Complement };

/// Heat-bath block dynamics: pick a block (uniformly, or by `weights`) and
/// resample either the block itself or its complement.
TransitionMatrix block_matrix(const SpinSystem& system, const std::vector<std::vector<int>>& blocks,
                              ResampleMode mode = ResampleMode::Block,
                              const std::vector<double>* weights = nullptr);

/// Same walk built directly over an enumerated distribution (used for
/// projected distributions such as the bipartite left marginal, which are
/// not spin systems).
TransitionMatrix distribution_block_matrix(const ExactDistribution& dist,
                                           const std::vector<std::vector<int>>& blocks,
                                           ResampleMode mode = ResampleMode::Block,
                                           const std::vector<double>* weights = nullptr);

struct SpectralGap {
    double lambda2 = 0.0;
    double gap = 1.0;
    double t_rel = 1.0;   // +inf when the chain is reducible
    Eigen::VectorXd eigenvalues;  // ascending
};

/// Spectral gap of a reversible chain via the symmetrized similarity
/// transform D^{1/2} P D^{-1/2}.
SpectralGap spectral_gap(const TransitionMatrix& M);

/// Pairwise influence matrix for q=2 systems:
/// psi(v,u) = mu^{v<-+}_u(+) - mu^{v<--}_u(+) over the free vertices.
/// Rows of vertices whose spin is deterministic (either conditioning event
/// has probability zero) are zeroed.
struct InfluenceMatrix {
    std::vector<int> vertices;
    Eigen::MatrixXd psi;
};

InfluenceMatrix influence_matrix(const SpinSystem& system);

/// Exact optimal-transport cost between nu and mu under the weighted
/// Hamming ground metric (successive shortest paths). Supports <= 4096.
double wasserstein_hamming(const ExactDistribution& nu, const ExactDistribution& mu,
                           const HammingWeight& rho);

struct BlockFactorizationReport {
    bool holds_for_all = true;
    double worst_ratio = 0.0;              // max Var/( (C/l) sum mu[Var_B] )
    int violating_trial = -1;               // -1: none; trials index or -2 for eigenprobe
    double eigenprobe_ratio = 0.0;          // ratio for the second-eigenvector probe
    double t_rel_block_walk = 0.0;
};

/// Tests Var_mu[f] <= (C/l) sum_B mu[Var_B[f]] for `trials` random Gaussian
/// test functions plus the second-eigenvector probe of the matching block
/// walk, and cross-checks C against that walk's relaxation time.
BlockFactorizationReport check_block_factorization(const SpinSystem& system,
                                                   const std::vector<std::vector<int>>& blocks,
                                                   double C, int trials, RngStream& rng);

/// mu[Var_B[f]]: expected conditional variance of f given the complement
/// of B. `f` is indexed like dist.support.
double average_conditional_variance(const ExactDistribution& dist, const std::vector<int>& block,
                                    const Eigen::VectorXd& f);

double variance(const ExactDistribution& dist, const Eigen::VectorXd& f);

}  // namespace spinlab
