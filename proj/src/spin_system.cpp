#include "spinlab/spin_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinlab/errors.hpp"

namespace spinlab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SpinSystem::SpinSystem(Graph graph, int q, std::vector<std::vector<Spin>> domain,
                       std::vector<Eigen::VectorXd> field,
                       std::vector<Eigen::MatrixXd> interaction, PartialConfig pinning)
    : graph_(std::move(graph)),
      q_(q),
      domain_(std::move(domain)),
      field_(std::move(field)),
      interaction_(std::move(interaction)),
      pinning_(std::move(pinning)) {
    validate();

    // Overflow guard: switch to log-space products when the largest possible
    // magnitude of a weight exceeds double range headroom.
    double budget = 0.0;
    for (const auto& b : field_) {
        double mx = 0.0;
        for (int s = 0; s < q_; ++s) mx = std::max(mx, b[s]);
        if (mx > 0.0) budget += std::abs(std::log(mx));
    }
    for (const auto& A : interaction_) {
        double mx = A.maxCoeff();
        if (mx > 0.0) budget += std::abs(std::log(mx));
    }
    use_log_ = budget > 600.0;
}

void SpinSystem::validate() const {
    const int n = graph_.vertex_count();
    if (q_ < 2) throw DomainError("spin system: q must be >= 2");
    if (static_cast<int>(domain_.size()) != n || static_cast<int>(field_.size()) != n)
        throw DomainError("spin system: per-vertex data has wrong size");
    if (static_cast<int>(interaction_.size()) != graph_.edge_count())
        throw DomainError("spin system: per-edge data has wrong size");
    for (int v = 0; v < n; ++v) {
        if (domain_[v].empty()) throw DomainError("spin system: empty domain");
        for (Spin s : domain_[v])
            if (s < 0 || s >= q_) throw DomainError("spin system: domain value outside [q]");
        if (!std::is_sorted(domain_[v].begin(), domain_[v].end()))
            throw DomainError("spin system: domain must be sorted");
        if (field_[v].size() != q_) throw DomainError("spin system: field has wrong length");
        if (field_[v].minCoeff() < 0.0) throw DomainError("spin system: negative field entry");
    }
    for (const auto& A : interaction_) {
        if (A.rows() != q_ || A.cols() != q_)
            throw DomainError("spin system: interaction has wrong shape");
        if (A.minCoeff() < 0.0) throw DomainError("spin system: negative interaction entry");
        if ((A.array() != A.transpose().array()).any())
            throw DomainError("spin system: interaction not symmetric");
    }
    for (auto [v, s] : pinning_.assign) {
        if (v < 0 || v >= n) throw DomainError("spin system: pinned vertex out of range");
        if (!std::binary_search(domain_[v].begin(), domain_[v].end(), s))
            throw DomainError("spin system: pinned value outside domain");
    }
}

std::vector<int> SpinSystem::free_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v)
        if (!is_pinned(v)) out.push_back(v);
    return out;
}

bool SpinSystem::in_domain(int v, Spin s) const {
    return std::binary_search(domain_[v].begin(), domain_[v].end(), s);
}

double SpinSystem::weight(const Config& sigma) const {
    if (use_log_) {
        double lw = log_weight(sigma);
        return lw == kNegInf ? 0.0 : std::exp(lw);
    }
    const int n = vertex_count();
    if (static_cast<int>(sigma.size()) != n) throw DomainError("weight: config has wrong size");
    double w = 1.0;
    for (int v = 0; v < n; ++v) {
        if (!in_domain(v, sigma[v])) throw DomainError("weight: value outside domain");
        w *= field_[v][sigma[v]];
    }
    for (auto [v, s] : pinning_.assign)
        if (sigma[v] != s) return 0.0;
    const auto& edges = graph_.edges();
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
        w *= interaction_[e](sigma[edges[e].first], sigma[edges[e].second]);
    return w;
}

double SpinSystem::log_weight(const Config& sigma) const {
    const int n = vertex_count();
    if (static_cast<int>(sigma.size()) != n)
        throw DomainError("log_weight: config has wrong size");
    double lw = 0.0;
    for (int v = 0; v < n; ++v) {
        if (!in_domain(v, sigma[v])) throw DomainError("log_weight: value outside domain");
        double b = field_[v][sigma[v]];
        if (b == 0.0) return kNegInf;
        lw += std::log(b);
    }
    for (auto [v, s] : pinning_.assign)
        if (sigma[v] != s) return kNegInf;
    const auto& edges = graph_.edges();
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        double a = interaction_[e](sigma[edges[e].first], sigma[edges[e].second]);
        if (a == 0.0) return kNegInf;
        lw += std::log(a);
    }
    return lw;
}

Eigen::VectorXd SpinSystem::conditional_at(int v, const Config& ctx) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(q_);
    if (is_pinned(v)) {
        w[pinned_value(v)] = 1.0;
        return w;
    }
    for (Spin c : domain_[v]) {
        double x = field_[v][c];
        for (auto [u, e] : graph_.incident(v)) {
            if (x == 0.0) break;
            x *= interaction_[e](c, ctx[u]);
        }
        w[c] = x;
    }
    return w;
}

SpinSystem SpinSystem::conditioned(const PartialConfig& tau) const {
    SpinSystem out = *this;
    out.pinning_ = pinning_.merged(tau);
    for (auto [v, s] : out.pinning_.assign)
        if (!in_domain(v, s)) throw DomainError("condition: pinned value outside domain");
    return out;
}

Config SpinSystem::base_config() const {
    Config c(vertex_count());
    for (int v = 0; v < vertex_count(); ++v)
        c[v] = is_pinned(v) ? pinned_value(v) : domain_[v].front();
    return c;
}

SpinSystem make_hardcore(const Graph& g, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("hardcore: lambda must be positive");
    return make_two_spin(g, 0.0, 1.0, lambda);
}

SpinSystem make_two_spin(const Graph& g, double beta, double gamma, double lambda) {
    if (beta < 0.0) throw DomainError("two-spin: beta must be nonnegative");
    if (!(gamma > 0.0)) throw DomainError("two-spin: gamma must be positive");
    if (!(lambda > 0.0)) throw DomainError("two-spin: lambda must be positive");
    const int n = g.vertex_count();
    Eigen::VectorXd b(2);
    b << 1.0, lambda;
    Eigen::MatrixXd A(2, 2);
    A << gamma, 1.0, 1.0, beta;
    return SpinSystem(g, 2, std::vector<std::vector<Spin>>(n, {0, 1}),
                      std::vector<Eigen::VectorXd>(n, b),
                      std::vector<Eigen::MatrixXd>(g.edge_count(), A));
}

SpinSystem make_list_coloring(const Graph& g, const std::vector<std::vector<Spin>>& lists) {
    const int n = g.vertex_count();
    if (static_cast<int>(lists.size()) != n)
        throw DomainError("list coloring: one list per vertex required");
    int q = 0;
    for (const auto& L : lists) {
        if (L.empty()) throw DomainError("list coloring: empty list");
        for (Spin c : L) q = std::max(q, static_cast<int>(c) + 1);
    }
    q = std::max(q, 2);
    std::vector<std::vector<Spin>> domain(n);
    std::vector<Eigen::VectorXd> field(n, Eigen::VectorXd::Zero(q));
    for (int v = 0; v < n; ++v) {
        domain[v] = lists[v];
        std::sort(domain[v].begin(), domain[v].end());
        domain[v].erase(std::unique(domain[v].begin(), domain[v].end()), domain[v].end());
        for (Spin c : domain[v]) field[v][c] = 1.0;
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Ones(q, q);
    A.diagonal().setZero();
    return SpinSystem(g, q, std::move(domain), std::move(field),
                      std::vector<Eigen::MatrixXd>(g.edge_count(), A));
}

double lambda_critical(int delta_degree) {
    if (delta_degree < 3) throw DomainError("lambda_critical: Delta must be >= 3");
    double d = delta_degree;
    return std::pow(d - 1.0, d - 1.0) / std::pow(d - 2.0, d);
}

double alpha_star() {
    // Bisection for alpha = exp(1/alpha) on [1, 2], then Newton polish.
    double lo = 1.0, hi = 2.0;
    auto f = [](double a) { return a - std::exp(1.0 / a); };
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double a = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        double e = std::exp(1.0 / a);
        a -= (a - e) / (1.0 + e / (a * a));
    }
    return a;
}

}  // namespace spinlab
