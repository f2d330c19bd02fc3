#include "spinlab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <queue>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "spinlab/errors.hpp"

namespace spinlab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::int64_t state_cap() {
    if (const char* env = std::getenv("SPINLAB_STATE_CAP")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return std::int64_t{1} << 24;
}

int ExactDistribution::index_of(const Config& c) const {
    auto it = index.find(c);
    return it == index.end() ? -1 : it->second;
}

double ExactDistribution::prob_of(const Config& c) const {
    int i = index_of(c);
    return i < 0 ? 0.0 : prob[i];
}

void ExactDistribution::build_index() {
    index.clear();
    index.reserve(support.size());
    for (int i = 0; i < size(); ++i) index.emplace(support[i], i);
}

void ExactDistribution::validate() const {
    if (static_cast<int>(support.size()) != prob.size())
        throw DomainError("distribution: support/prob size mismatch");
    if (prob.size() > 0 && prob.minCoeff() < 0.0)
        throw DomainError("distribution: negative probability");
    if (std::abs(prob.sum() - 1.0) > 1e-12)
        throw DomainError("distribution: probabilities do not sum to 1");
    if (index.size() != support.size()) throw DomainError("distribution: duplicate support entry");
}

double divergence(Divergence kind, const ExactDistribution& nu, const ExactDistribution& mu) {
    if (nu.vertices != mu.vertices)
        throw DomainError("divergence: distributions over different vertex sets");
    switch (kind) {
        case Divergence::TV: {
            double acc = 0.0;
            for (int i = 0; i < nu.size(); ++i)
                acc += std::abs(nu.prob[i] - mu.prob_of(nu.support[i]));
            for (int j = 0; j < mu.size(); ++j)
                if (nu.index_of(mu.support[j]) < 0) acc += mu.prob[j];
            return 0.5 * acc;
        }
        case Divergence::Chi2: {
            double acc = 0.0;
            for (int i = 0; i < nu.size(); ++i) {
                if (nu.prob[i] == 0.0) continue;
                double m = mu.prob_of(nu.support[i]);
                if (m == 0.0)
                    throw DomainError("chi2: nu not absolutely continuous w.r.t. mu");
                acc += nu.prob[i] * nu.prob[i] / m;
            }
            return acc - 1.0;
        }
        case Divergence::KL: {
            double acc = 0.0;
            for (int i = 0; i < nu.size(); ++i) {
                if (nu.prob[i] == 0.0) continue;
                double m = mu.prob_of(nu.support[i]);
                if (m == 0.0) throw DomainError("KL: nu not absolutely continuous w.r.t. mu");
                acc += nu.prob[i] * std::log(nu.prob[i] / m);
            }
            return std::max(acc, 0.0);
        }
    }
    throw DomainError("divergence: unknown kind");
}

namespace {

// Odometer over per-vertex choice lists; visit(config) for each assignment.
template <typename F>
void for_each_assignment(const std::vector<std::vector<Spin>>& choices, Config& scratch, F&& visit) {
    const int n = static_cast<int>(choices.size());
    std::vector<int> pos(n, 0);
    for (int v = 0; v < n; ++v) scratch[v] = choices[v][0];
    while (true) {
        visit(scratch);
        int v = n - 1;
        while (v >= 0) {
            if (++pos[v] < static_cast<int>(choices[v].size())) {
                scratch[v] = choices[v][pos[v]];
                break;
            }
            pos[v] = 0;
            scratch[v] = choices[v][0];
            --v;
        }
        if (v < 0) break;
    }
}

std::vector<std::vector<Spin>> effective_domains(const SpinSystem& s) {
    std::vector<std::vector<Spin>> choices(s.vertex_count());
    for (int v = 0; v < s.vertex_count(); ++v)
        choices[v] = s.is_pinned(v) ? std::vector<Spin>{s.pinned_value(v)} : s.domain(v);
    return choices;
}

void check_cap(const std::vector<std::vector<Spin>>& choices) {
    std::int64_t cap = state_cap();
    std::int64_t total = 1;
    for (const auto& c : choices) {
        total *= static_cast<std::int64_t>(c.size());
        if (total > cap)
            throw SizeError("enumeration would exceed the state cap (" + std::to_string(cap) +
                            " states)");
    }
}

}  // namespace

ExactDistribution enumerate(const SpinSystem& system) {
    auto choices = effective_domains(system);
    check_cap(choices);

    ExactDistribution out;
    out.vertices.resize(system.vertex_count());
    for (int v = 0; v < system.vertex_count(); ++v) out.vertices[v] = v;

    Config scratch(system.vertex_count());
    std::vector<double> vals;
    if (!system.uses_log_space()) {
        double total = 0.0;
        for_each_assignment(choices, scratch, [&](const Config& c) {
            double w = system.weight(c);
            if (w > 0.0) {
                out.support.push_back(c);
                vals.push_back(w);
                total += w;
            }
        });
        if (!(total > 0.0)) throw InfeasibleError("enumerate: total weight is zero");
        out.total_weight = total;
        out.log_total_weight = std::log(total);
        out.prob.resize(static_cast<int>(vals.size()));
        for (int i = 0; i < out.prob.size(); ++i) out.prob[i] = vals[i] / total;
    } else {
        double mx = kNegInf;
        for_each_assignment(choices, scratch, [&](const Config& c) {
            double lw = system.log_weight(c);
            if (lw != kNegInf) {
                out.support.push_back(c);
                vals.push_back(lw);
                mx = std::max(mx, lw);
            }
        });
        if (vals.empty()) throw InfeasibleError("enumerate: total weight is zero");
        double z = 0.0;
        out.prob.resize(static_cast<int>(vals.size()));
        for (int i = 0; i < out.prob.size(); ++i) {
            out.prob[i] = std::exp(vals[i] - mx);
            z += out.prob[i];
        }
        out.prob /= z;
        out.log_total_weight = mx + std::log(z);
        out.total_weight = std::exp(out.log_total_weight);  // may overflow to +inf
    }
    out.build_index();
    return out;
}

ExactDistribution exact_marginal(const ExactDistribution& full, const std::vector<int>& S) {
    std::vector<int> pos;  // positions of S inside full.vertices
    for (int v : S) {
        auto it = std::find(full.vertices.begin(), full.vertices.end(), v);
        if (it == full.vertices.end())
            throw DomainError("marginal: vertex not covered by the distribution");
        pos.push_back(static_cast<int>(it - full.vertices.begin()));
    }
    ExactDistribution out;
    out.vertices = S;
    std::map<Config, double> acc;
    for (int i = 0; i < full.size(); ++i) {
        Config key(pos.size());
        for (std::size_t j = 0; j < pos.size(); ++j) key[j] = full.support[i][pos[j]];
        acc[key] += full.prob[i];
    }
    out.prob.resize(static_cast<int>(acc.size()));
    int i = 0;
    for (auto& [cfg, p] : acc) {
        out.support.push_back(cfg);
        out.prob[i++] = p;
    }
    out.total_weight = full.total_weight;
    out.log_total_weight = full.log_total_weight;
    out.build_index();
    return out;
}

ExactDistribution exact_marginal(const SpinSystem& system, const std::vector<int>& S) {
    return exact_marginal(enumerate(system), S);
}

void TransitionMatrix::validate() const {
    const int m = size();
    if (P.rows() != m || P.cols() != m || stationary.size() != m)
        throw DomainError("transition matrix: shape mismatch");
    for (int i = 0; i < m; ++i)
        if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
            throw DomainError("transition matrix: row " + std::to_string(i) +
                              " does not sum to 1");
    Eigen::VectorXd pi = stationary.prob;
    if ((pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("transition matrix: stationary distribution is not fixed");
}

double TransitionMatrix::detailed_balance_residual() const {
    const int m = size();
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            worst = std::max(worst, std::abs(stationary.prob[i] * P(i, j) -
                                             stationary.prob[j] * P(j, i)));
    return worst;
}

TransitionMatrix glauber_matrix(const SpinSystem& system) {
    TransitionMatrix out;
    out.stationary = enumerate(system);
    out.states = out.stationary.support;
    const int m = out.stationary.size();
    const int n = system.vertex_count();
    out.P = Eigen::MatrixXd::Zero(m, m);

    Config scratch;
    for (int i = 0; i < m; ++i) {
        const Config& x = out.states[i];
        for (int v = 0; v < n; ++v) {
            if (system.is_pinned(v)) {
                out.P(i, i) += 1.0 / n;  // deterministic self-update
                continue;
            }
            Eigen::VectorXd w = system.conditional_at(v, x);
            double total = w.sum();
            if (!(total > 0.0))
                throw InfeasibleError("glauber matrix: frozen conditional inside the support");
            scratch = x;
            for (Spin c : system.domain(v)) {
                if (w[c] == 0.0) continue;
                scratch[v] = c;
                int j = out.stationary.index_of(scratch);
                if (j < 0)
                    throw InfeasibleError("glauber matrix: positive-weight state missing");
                out.P(i, j) += w[c] / (total * n);
            }
        }
    }
    return out;
}

TransitionMatrix distribution_block_matrix(const ExactDistribution& dist,
                                           const std::vector<std::vector<int>>& blocks,
                                           ResampleMode mode, const std::vector<double>* weights) {
    const int m = dist.size();
    const int nb = static_cast<int>(blocks.size());
    if (nb == 0) throw DomainError("block matrix: empty block list");
    std::vector<double> wts(nb, 1.0 / nb);
    if (weights) {
        if (static_cast<int>(weights->size()) != nb)
            throw DomainError("block matrix: weight list has wrong size");
        double s = 0.0;
        for (double w : *weights) {
            if (w < 0.0) throw DomainError("block matrix: negative block weight");
            s += w;
        }
        if (!(s > 0.0)) throw DomainError("block matrix: zero block weights");
        for (int b = 0; b < nb; ++b) wts[b] = (*weights)[b] / s;
    }

    TransitionMatrix out;
    out.stationary = dist;
    out.states = dist.support;
    out.P = Eigen::MatrixXd::Zero(m, m);

    std::vector<char> in_set(dist.vertices.size());
    for (int b = 0; b < nb; ++b) {
        // The set of coordinates kept fixed by this update.
        std::fill(in_set.begin(), in_set.end(), 0);
        for (int v : blocks[b]) {
            auto it = std::find(dist.vertices.begin(), dist.vertices.end(), v);
            if (it == dist.vertices.end())
                throw DomainError("block matrix: block vertex not covered by the distribution");
            in_set[it - dist.vertices.begin()] = 1;
        }
        const bool keep_in_set = (mode == ResampleMode::Complement);

        // Group states by their kept coordinates; heat-bath within groups.
        std::map<Config, std::vector<int>> groups;
        for (int i = 0; i < m; ++i) {
            Config key;
            for (std::size_t t = 0; t < in_set.size(); ++t)
                if ((in_set[t] != 0) == keep_in_set) key.push_back(dist.support[i][t]);
            groups[key].push_back(i);
        }
        for (auto& [key, members] : groups) {
            double z = 0.0;
            for (int i : members) z += dist.prob[i];
            if (!(z > 0.0)) continue;
            for (int i : members)
                for (int j : members) out.P(i, j) += wts[b] * dist.prob[j] / z;
        }
    }
    return out;
}

TransitionMatrix block_matrix(const SpinSystem& system, const std::vector<std::vector<int>>& blocks,
                              ResampleMode mode, const std::vector<double>* weights) {
    return distribution_block_matrix(enumerate(system), blocks, mode, weights);
}

SpectralGap spectral_gap(const TransitionMatrix& M) {
    const int m = M.size();
    SpectralGap out;
    if (m == 1) {
        out.lambda2 = 0.0;
        out.gap = 1.0;
        out.t_rel = 1.0;
        out.eigenvalues = Eigen::VectorXd::Ones(1);
        return out;
    }
    Eigen::VectorXd pi = M.stationary.prob;
    Eigen::VectorXd sq = pi.cwiseSqrt();
    Eigen::MatrixXd S(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) S(i, j) = sq[i] * M.P(i, j) / sq[j];
    // Symmetrize away round-off before the self-adjoint solve.
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues();
    out.lambda2 = out.eigenvalues[m - 2];
    out.gap = 1.0 - out.lambda2;
    out.t_rel = out.gap > 1e-12 ? 1.0 / out.gap : kInf;
    return out;
}

InfluenceMatrix influence_matrix(const SpinSystem& system) {
    if (system.q() != 2) throw DomainError("influence matrix: q must be 2");
    InfluenceMatrix out;
    out.vertices = system.free_vertices();
    const int k = static_cast<int>(out.vertices.size());
    out.psi = Eigen::MatrixXd::Zero(k, k);

    ExactDistribution base = enumerate(system);
    for (int a = 0; a < k; ++a) {
        int v = out.vertices[a];
        // Marginal of v decides whether both conditioning events are possible.
        double pv = 0.0;
        for (int i = 0; i < base.size(); ++i)
            if (base.support[i][v] == 1) pv += base.prob[i];
        if (pv <= 0.0 || pv >= 1.0) continue;  // deterministic spin: row stays zero

        ExactDistribution plus = enumerate(system.conditioned(PartialConfig{{v, Spin{1}}}));
        ExactDistribution minus = enumerate(system.conditioned(PartialConfig{{v, Spin{0}}}));
        for (int b = 0; b < k; ++b) {
            int u = out.vertices[b];
            double pp = 0.0, pm = 0.0;
            for (int i = 0; i < plus.size(); ++i)
                if (plus.support[i][u] == 1) pp += plus.prob[i];
            for (int i = 0; i < minus.size(); ++i)
                if (minus.support[i][u] == 1) pm += minus.prob[i];
            out.psi(a, b) = pp - pm;
        }
    }
    return out;
}

// --- Wasserstein distance under the weighted Hamming metric ---------------
//
// Successive shortest augmenting paths with Dijkstra potentials on the
// complete bipartite transport graph. Masses are reals; each augmentation
// exhausts a source or a sink, so at most n+m rounds run. Identical
// configurations are matched in place first, which is optimal because the
// ground cost is a metric.

double wasserstein_hamming(const ExactDistribution& nu, const ExactDistribution& mu,
                           const HammingWeight& rho) {
    if (nu.vertices != mu.vertices)
        throw DomainError("wasserstein: distributions over different vertex sets");
    if (nu.size() > 4096 || mu.size() > 4096)
        throw SizeError("wasserstein: support too large (limit 4096)");

    HammingWeight local{std::vector<int>()};
    for (int v : nu.vertices) {
        if (v < 0 || v >= static_cast<int>(rho.weight.size()))
            throw DomainError("wasserstein: vertex outside weight function");
        local.weight.push_back(rho.weight[v]);
    }

    std::vector<double> supply, demand;
    std::vector<const Config*> src, dst;
    constexpr double kTol = 1e-15;
    for (int i = 0; i < nu.size(); ++i) {
        double rest = nu.prob[i] - mu.prob_of(nu.support[i]);
        if (rest > kTol) {
            supply.push_back(rest);
            src.push_back(&nu.support[i]);
        }
    }
    for (int j = 0; j < mu.size(); ++j) {
        double rest = mu.prob[j] - nu.prob_of(mu.support[j]);
        if (rest > kTol) {
            demand.push_back(rest);
            dst.push_back(&mu.support[j]);
        }
    }
    const int ns = static_cast<int>(supply.size());
    const int nd = static_cast<int>(demand.size());
    if (ns == 0 || nd == 0) return 0.0;

    Eigen::MatrixXd cost(ns, nd);
    for (int i = 0; i < ns; ++i) {
        Config a(src[i]->begin(), src[i]->end());
        for (int j = 0; j < nd; ++j) {
            Config b(dst[j]->begin(), dst[j]->end());
            cost(i, j) = static_cast<double>(hamming_distance(local, a, b));
        }
    }

    // Potentials keep reduced costs nonnegative; plain Dijkstra suffices on
    // the two-layer graph (source row -> sink column).
    std::vector<double> pot_s(ns, 0.0), pot_d(nd, 0.0);
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(ns, nd);
    double total_cost = 0.0;

    const int round_cap = ns * nd + ns + nd + 16;
    for (int round = 0; round < round_cap; ++round) {
        int source = -1;
        double remaining = 0.0;
        for (int i = 0; i < ns; ++i) {
            remaining += supply[i];
            if (source < 0 && supply[i] > kTol) source = i;
        }
        if (source < 0 || remaining < 1e-12) break;

        // Shortest reduced-cost path from `source` in the residual graph.
        // Nodes: sources 0..ns-1, sinks ns..ns+nd-1.
        const int N = ns + nd;
        std::vector<double> dist(N, kInf);
        std::vector<int> prev(N, -1);
        std::vector<char> done(N, 0);
        dist[source] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.emplace(0.0, source);
        while (!pq.empty()) {
            auto [d, x] = pq.top();
            pq.pop();
            if (done[x]) continue;
            done[x] = 1;
            if (x < ns) {
                for (int j = 0; j < nd; ++j) {
                    double rc = cost(x, j) - pot_s[x] - pot_d[j];
                    if (dist[x] + rc < dist[ns + j] - 1e-18) {
                        dist[ns + j] = dist[x] + rc;
                        prev[ns + j] = x;
                        pq.emplace(dist[ns + j], ns + j);
                    }
                }
            } else {
                int j = x - ns;
                for (int i = 0; i < ns; ++i) {
                    if (flow(i, j) <= kTol) continue;  // residual back edge
                    double rc = -(cost(i, j) - pot_s[i] - pot_d[j]);
                    if (dist[x] + rc < dist[i] - 1e-18) {
                        dist[i] = dist[x] + rc;
                        prev[i] = x;
                        pq.emplace(dist[i], i);
                    }
                }
            }
        }

        int sink = -1;
        double best = kInf;
        for (int j = 0; j < nd; ++j)
            if (demand[j] > kTol && dist[ns + j] < best) {
                best = dist[ns + j];
                sink = ns + j;
            }
        if (sink < 0) throw DomainError("wasserstein: no augmenting path (unbalanced masses)");

        // Bottleneck along the path.
        double push = std::min(supply[source], demand[sink - ns]);
        for (int x = sink; prev[x] != -1; x = prev[x])
            if (x < ns) push = std::min(push, flow(x, prev[x] - ns));
        // Apply.
        for (int x = sink; prev[x] != -1; x = prev[x]) {
            if (x >= ns)
                flow(prev[x], x - ns) += push;
            else
                flow(x, prev[x] - ns) -= push;
        }
        supply[source] -= push;
        demand[sink - ns] -= push;
        // Potential update, distances capped at the sink distance so arcs
        // into unreached nodes keep nonnegative reduced costs.
        const double cap = best;
        for (int i = 0; i < ns; ++i) pot_s[i] -= std::min(dist[i], cap);
        for (int j = 0; j < nd; ++j) pot_d[j] += std::min(dist[ns + j], cap);
    }

    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nd; ++j) total_cost += flow(i, j) * cost(i, j);
    return total_cost;
}

double variance(const ExactDistribution& dist, const Eigen::VectorXd& f) {
    double mean = dist.prob.dot(f);
    double second = dist.prob.dot(f.cwiseProduct(f));
    return std::max(0.0, second - mean * mean);
}

double average_conditional_variance(const ExactDistribution& dist, const std::vector<int>& block,
                                    const Eigen::VectorXd& f) {
    std::vector<char> in_block(dist.vertices.size(), 0);
    for (int v : block) {
        auto it = std::find(dist.vertices.begin(), dist.vertices.end(), v);
        if (it == dist.vertices.end())
            throw DomainError("conditional variance: vertex not covered");
        in_block[it - dist.vertices.begin()] = 1;
    }
    std::map<Config, std::vector<int>> groups;
    for (int i = 0; i < dist.size(); ++i) {
        Config key;
        for (std::size_t t = 0; t < in_block.size(); ++t)
            if (!in_block[t]) key.push_back(dist.support[i][t]);
        groups[key].push_back(i);
    }
    double acc = 0.0;
    for (auto& [key, members] : groups) {
        double z = 0.0, mean = 0.0, second = 0.0;
        for (int i : members) z += dist.prob[i];
        if (!(z > 0.0)) continue;
        for (int i : members) {
            mean += dist.prob[i] / z * f[i];
            second += dist.prob[i] / z * f[i] * f[i];
        }
        acc += z * std::max(0.0, second - mean * mean);
    }
    return acc;
}

BlockFactorizationReport check_block_factorization(const SpinSystem& system,
                                                   const std::vector<std::vector<int>>& blocks,
                                                   double C, int trials, RngStream& rng) {
    BlockFactorizationReport rep;
    ExactDistribution dist = enumerate(system);
    const int m = dist.size();
    const int nb = static_cast<int>(blocks.size());

    TransitionMatrix walk = distribution_block_matrix(dist, blocks, ResampleMode::Block);
    rep.t_rel_block_walk = spectral_gap(walk).t_rel;

    auto ratio_for = [&](const Eigen::VectorXd& f) {
        double lhs = variance(dist, f);
        double rhs = 0.0;
        for (const auto& B : blocks) rhs += average_conditional_variance(dist, B, f);
        rhs *= C / nb;
        if (rhs <= 0.0) return lhs <= 1e-14 ? 0.0 : kInf;
        return lhs / rhs;
    };

    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd f(m);
        for (int i = 0; i < m; ++i) f[i] = rng.gaussian();
        double r = ratio_for(f);
        if (r > rep.worst_ratio) {
            rep.worst_ratio = r;
            if (r > 1.0 + 1e-10) {
                rep.holds_for_all = false;
                if (rep.violating_trial < 0) rep.violating_trial = t;
            }
        }
    }

    // The second eigenvector of the block walk realizes the extremal ratio
    // Var / Dirichlet form, so it witnesses any C below the relaxation time.
    if (m > 1) {
        Eigen::VectorXd sq = dist.prob.cwiseSqrt();
        Eigen::MatrixXd S(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) S(i, j) = sq[i] * walk.P(i, j) / sq[j];
        S = 0.5 * (S + S.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        Eigen::VectorXd u = es.eigenvectors().col(m - 2);
        Eigen::VectorXd f = u.cwiseQuotient(sq);
        rep.eigenprobe_ratio = ratio_for(f);
        if (rep.eigenprobe_ratio > rep.worst_ratio) rep.worst_ratio = rep.eigenprobe_ratio;
        if (rep.eigenprobe_ratio > 1.0 + 1e-10) {
            rep.holds_for_all = false;
            if (rep.violating_trial < 0) rep.violating_trial = -2;
        }
    }
    return rep;
}

}  // namespace spinlab
