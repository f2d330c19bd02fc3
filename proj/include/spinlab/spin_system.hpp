#pragma once

#include <vector>

#include <Eigen/Core>

#include "spinlab/config.hpp"
#include "spinlab/graph.hpp"

namespace spinlab {

/// A multi-spin system: graph + per-vertex spin domains + external fields
/// b_v + per-edge symmetric interaction matrices A_e, plus an optional
/// pinning. Immutable after construction; all operations are pure.
///
/// weight(sigma) is the full Gibbs weight of sigma times the indicator that
/// sigma agrees with the pinning. Conditioning therefore never changes the
/// weight of a consistent configuration, only zeroes the inconsistent ones;
/// a pinning whose own factors kill every configuration makes the system
/// infeasible (total weight 0), which enumeration reports loudly.
class SpinSystem {
  public:
    SpinSystem() = default;
    SpinSystem(Graph graph, int q, std::vector<std::vector<Spin>> domain,
               std::vector<Eigen::VectorXd> field, std::vector<Eigen::MatrixXd> interaction,
               PartialConfig pinning = {});

    const Graph& graph() const { return graph_; }
    int q() const { return q_; }
    int vertex_count() const { return graph_.vertex_count(); }

    const std::vector<Spin>& domain(int v) const { return domain_[v]; }
    const Eigen::VectorXd& field(int v) const { return field_[v]; }
    const Eigen::MatrixXd& interaction(int e) const { return interaction_[e]; }

    const PartialConfig& pinning() const { return pinning_; }
    bool is_pinned(int v) const { return pinning_.contains(v); }
    Spin pinned_value(int v) const { return pinning_.at(v); }
    std::vector<int> free_vertices() const;

    bool in_domain(int v, Spin s) const;

    /// w^tau(sigma): full Gibbs weight times agreement with the pinning.
    /// Throws DomainError if sigma assigns a value outside some domain.
    double weight(const Config& sigma) const;
    /// log w^tau(sigma); -inf when the weight is zero.
    double log_weight(const Config& sigma) const;
    /// True when products are computed in log space (overflow guard).
    bool uses_log_space() const { return use_log_; }

    /// Unnormalized conditional weights of vertex v given the values of all
    /// other vertices in ctx (length-q vector, zero outside the domain).
    /// Pinned v yields a point mass at its pinned value. O(deg(v) * q).
    Eigen::VectorXd conditional_at(int v, const Config& ctx) const;

    /// The system conditioned on tau merged into the existing pinning.
    SpinSystem conditioned(const PartialConfig& tau) const;

    /// Config agreeing with the pinning, all free vertices at their first
    /// domain value. Handy as a deterministic start.
    Config base_config() const;

  private:
    void validate() const;

    Graph graph_;
    int q_ = 0;
    std::vector<std::vector<Spin>> domain_;
    std::vector<Eigen::VectorXd> field_;
    std::vector<Eigen::MatrixXd> interaction_;
    PartialConfig pinning_;
    bool use_log_ = false;
};

/// condition() of the spec: returns a system whose weight function is
/// w^{tau ∪ old pinning}.
inline SpinSystem condition(const SpinSystem& s, const PartialConfig& tau) {
    return s.conditioned(tau);
}

/// Hardcore model: q=2, spins {0:-, 1:+}, b=(1,lambda), A(+,+)=0 else 1.
SpinSystem make_hardcore(const Graph& g, double lambda);

/// General 2-spin system: mu(sigma) ∝ lambda^{n_+} beta^{m_+} gamma^{m_-}.
SpinSystem make_two_spin(const Graph& g, double beta, double gamma, double lambda);

/// Uniform proper list coloring; lists are per-vertex subsets of [q].
SpinSystem make_list_coloring(const Graph& g, const std::vector<std::vector<Spin>>& lists);

/// Hardcore tree-uniqueness threshold (Delta-1)^(Delta-1) / (Delta-2)^Delta.
double lambda_critical(int delta_degree);

/// Unique positive solution of alpha = exp(1/alpha), approx 1.763.
double alpha_star();

}  // namespace spinlab
