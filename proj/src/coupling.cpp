#include "spinlab/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "spinlab/errors.hpp"
#include "spinlab/stats.hpp"

namespace spinlab {

Eigen::MatrixXd maximal_coupling(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    const int n = static_cast<int>(p.size());
    if (q.size() != n) throw DomainError("maximal coupling: length mismatch");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rp(n), rq(n);
    for (int i = 0; i < n; ++i) {
        double shared = std::min(p[i], q[i]);
        J(i, i) = shared;
        rp[i] = p[i] - shared;
        rq[i] = q[i] - shared;
    }
    // Residual mass matched by ascending spin index on both sides.
    int a = 0, b = 0;
    while (a < n && b < n) {
        while (a < n && rp[a] <= 1e-15) ++a;
        while (b < n && rq[b] <= 1e-15) ++b;
        if (a >= n || b >= n) break;
        double m = std::min(rp[a], rq[b]);
        J(a, b) += m;
        rp[a] -= m;
        rq[b] -= m;
    }
    return J;
}

RecursiveCouplingEngine::RecursiveCouplingEngine(const SpinSystem& system, HammingWeight rho)
    : system_(system), rho_(std::move(rho)) {
    rho_.validate();
    if (static_cast<int>(rho_.weight.size()) != system.vertex_count())
        throw DomainError("coupling engine: rho has wrong size");
    if (system.graph().edge_count() == 0) {
        A_ = Eigen::MatrixXd::Ones(system.q(), system.q());
    } else {
        A_ = system.interaction(0);
        for (int e = 1; e < system.graph().edge_count(); ++e)
            if ((system.interaction(e).array() != A_.array()).any())
                throw DomainError(
                    "coupling engine: all edges must share one interaction matrix");
    }
}

RecursiveCouplingEngine::State RecursiveCouplingEngine::initial_state(
    const PartialConfig& pin) const {
    State s(system_.vertex_count());
    PartialConfig all = system_.pinning().merged(pin);
    for (auto [v, c] : all.assign) {
        if (!system_.in_domain(v, c)) throw DomainError("coupling engine: pin outside domain");
        s[v].status = kPinned;
        s[v].pin = c;
    }
    return s;
}

double RecursiveCouplingEngine::multiplier(const VertexState& vs, Spin c) const {
    if (vs.constraint.empty()) return 1.0;
    double m = 1.0;
    for (int s = 0; s < static_cast<int>(vs.constraint.size()); ++s)
        for (int t = 0; t < vs.constraint[s]; ++t) m *= A_(s, c);
    return m;
}

std::vector<int> RecursiveCouplingEngine::free_component(const State& s, int u) const {
    std::vector<int> comp{u};
    std::vector<char> seen(s.size(), 0);
    seen[u] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
        for (int w : system_.graph().neighbors(comp[head]))
            if (!seen[w] && s[w].status == kFree) {
                seen[w] = 1;
                comp.push_back(w);
            }
    return comp;
}

std::uint64_t RecursiveCouplingEngine::state_key(const State& s, const std::vector<int>& comp,
                                                 int u) const {
    // FNV-1a over the component-restricted state plus the pinned boundary.
    std::uint64_t h = 1469598103934665603ull;
    auto eat = [&h](std::uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= (x >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    eat(static_cast<std::uint64_t>(u));
    for (int v : comp) {
        eat(static_cast<std::uint64_t>(v) << 2);
        for (std::uint8_t c : s[v].constraint) eat(c + 1);
        for (int w : system_.graph().neighbors(v))
            if (s[w].status == kPinned)
                eat((static_cast<std::uint64_t>(w) << 9) ^
                    static_cast<std::uint64_t>(s[w].pin + 1));
    }
    return h;
}

const Eigen::VectorXd& RecursiveCouplingEngine::marginal(const State& s, int u) {
    if (s[u].status != kFree) throw DomainError("coupling engine: marginal of a non-free vertex");
    std::vector<int> comp = free_component(s, u);
    std::sort(comp.begin(), comp.end());
    std::uint64_t key = state_key(s, comp, u);
    auto it = marginal_cache_.find(key);
    if (it != marginal_cache_.end()) return it->second;

    // Enumerate the free component; everything outside contributes a
    // constant that cancels in the marginal.
    const int q = system_.q();
    const int m = static_cast<int>(comp.size());
    std::vector<int> pos(system_.vertex_count(), -1);
    for (int i = 0; i < m; ++i) pos[comp[i]] = i;
    int upos = pos[u];

    std::int64_t total = 1;
    for (int i = 0; i < m; ++i) {
        total *= static_cast<std::int64_t>(system_.domain(comp[i]).size());
        if (total > state_cap())
            throw SizeError("coupling engine: free component exceeds the state cap");
    }

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(q);
    std::vector<int> idx(m, 0);
    Config val(m);
    for (int i = 0; i < m; ++i) val[i] = system_.domain(comp[i])[0];
    while (true) {
        double w = 1.0;
        for (int i = 0; i < m && w != 0.0; ++i) {
            int v = comp[i];
            Spin c = val[i];
            w *= system_.field(v)[c] * multiplier(s[v], c);
            for (auto [nb, e] : system_.graph().incident(v)) {
                if (s[nb].status == kPinned)
                    w *= A_(c, s[nb].pin);
                else if (s[nb].status == kFree && pos[nb] > i)  // count each edge once
                    w *= A_(c, val[pos[nb]]);
            }
        }
        if (w > 0.0) acc[val[upos]] += w;
        int i = m - 1;
        while (i >= 0) {
            if (++idx[i] < static_cast<int>(system_.domain(comp[i]).size())) {
                val[i] = system_.domain(comp[i])[idx[i]];
                break;
            }
            idx[i] = 0;
            val[i] = system_.domain(comp[i])[0];
            --i;
        }
        if (i < 0) break;
    }
    double z = acc.sum();
    if (!(z > 0.0)) throw InfeasibleError("coupling engine: infeasible conditional encountered");
    acc /= z;
    return marginal_cache_.emplace(key, std::move(acc)).first->second;
}

Eigen::VectorXd RecursiveCouplingEngine::pinned_marginal(const PartialConfig& pin, int v) {
    State s = initial_state(pin);
    return marginal(s, v);
}

Config RecursiveCouplingEngine::sample_config(State s, RngStream& rng) {
    Config out(system_.vertex_count());
    for (int v = 0; v < system_.vertex_count(); ++v)
        if (s[v].status == kPinned) out[v] = s[v].pin;
    for (int v = 0; v < system_.vertex_count(); ++v) {
        if (s[v].status != kFree) continue;
        const Eigen::VectorXd& m = marginal(s, v);
        int c = rng.categorical(m);
        if (c < 0) throw InfeasibleError("coupling engine: infeasible conditional encountered");
        out[v] = static_cast<Spin>(c);
        s[v].status = kPinned;
        s[v].pin = static_cast<Spin>(c);
    }
    return out;
}

Config RecursiveCouplingEngine::couple_given(const State& s, int v, Spin a, Spin b, Config x,
                                             RngStream& rng, int depth) {
    if (depth > system_.vertex_count() + 2)
        throw Error("coupling engine: recursion exceeded the vertex count");
    // Free neighbors of v, ascending vertex order.
    std::vector<int> nbrs;
    for (int u : system_.graph().neighbors(v))
        if (s[u].status == kFree) nbrs.push_back(u);
    std::sort(nbrs.begin(), nbrs.end(), [&](int p, int r) {
        return system_.graph().vertex_order()[p] < system_.graph().vertex_order()[r];
    });

    State detached = s;
    detached[v].status = kDetached;
    detached[v].constraint.clear();

    // Walk the interpolation chain sigma_0 .. sigma_d; x plays X_{i-1}.
    const int d = static_cast<int>(nbrs.size());
    for (int i = 1; i <= d; ++i) {
        int u = nbrs[i - 1];
        // nu_{i-1}: copies before u forced to b, u and later still a.
        State prev = detached;
        State next = detached;
        for (int j = 0; j < d; ++j) {
            Spin prev_c = j < i - 1 ? b : a;
            Spin next_c = j < i ? b : a;
            auto& pc = prev[nbrs[j]].constraint;
            auto& nc = next[nbrs[j]].constraint;
            if (pc.empty()) pc.assign(system_.q(), 0);
            if (nc.empty()) nc.assign(system_.q(), 0);
            ++pc[prev_c];
            ++nc[next_c];
        }
        const Eigen::VectorXd p = marginal(prev, u);
        const Eigen::VectorXd q = marginal(next, u);
        const Spin c = x[u];
        if (!(p[c] > 0.0))
            throw InfeasibleError("coupling engine: conditional support mismatch");
        Eigen::MatrixXd J = maximal_coupling(p, q);
        Eigen::VectorXd row = J.row(c);
        int cprime = rng.categorical(row);
        if (cprime < 0) throw InfeasibleError("coupling engine: empty coupling row");
        if (static_cast<Spin>(cprime) != c) {
            // Disagreement at u: recurse with u's own constraint dropped.
            State sub = detached;
            for (int j = 0; j < d; ++j) {
                if (j == i - 1) continue;
                auto& sc = sub[nbrs[j]].constraint;
                if (sc.empty()) sc.assign(system_.q(), 0);
                ++sc[j < i ? b : a];
            }
            x = couple_given(sub, u, c, static_cast<Spin>(cprime), std::move(x), rng, depth + 1);
            x[u] = static_cast<Spin>(cprime);
        }
        // Agreement: X_i = X_{i-1}, nothing to do.
    }
    x[v] = b;
    return x;
}

CouplingSample RecursiveCouplingEngine::sample(const PartialConfig& pin, int v, Spin a, Spin b,
                                               RngStream& rng) {
    State s0 = initial_state(pin);
    if (s0[v].status != kFree) throw DomainError("coupling: v is pinned");
    if (!system_.in_domain(v, a) || !system_.in_domain(v, b))
        throw DomainError("coupling: spin outside the domain of v");
    const Eigen::VectorXd mv = marginal(s0, v);
    if (!(mv[a] > 0.0) || !(mv[b] > 0.0))
        throw InfeasibleError("coupling: a conditional is infeasible");

    State sa = s0;
    sa[v].status = kPinned;
    sa[v].pin = a;
    CouplingSample out;
    out.x = sample_config(sa, rng);
    out.x[v] = a;
    out.y = couple_given(s0, v, a, b, out.x, rng, 0);
    for (int u = 0; u < system_.vertex_count(); ++u)
        if (out.x[u] != out.y[u]) {
            out.discrepancy.push_back(u);
            out.cost += rho_.weight[u];
        }
    return out;
}

CouplingSample recursive_coupling_two_spin(const SpinSystem& system, const PartialConfig& pin,
                                           int v, RngStream& rng) {
    if (system.q() != 2) throw DomainError("two-spin coupling: q must be 2");
    RecursiveCouplingEngine engine(system, HammingWeight::unit(system.vertex_count()));
    return engine.sample(pin, v, Spin{0}, Spin{1}, rng);
}

CouplingSample recursive_coupling_coloring(const SpinSystem& system, const PartialConfig& pin,
                                           int v, Spin a, Spin b, RngStream& rng) {
    if (system.graph().has_triangle())
        throw DomainError("coloring coupling: the graph must be triangle-free");
    RecursiveCouplingEngine engine(system, HammingWeight::unit(system.vertex_count()));
    return engine.sample(pin, v, a, b, rng);
}

namespace {

// All feasible (pinning, vertex, value pair) triples for exhaustive mode.
std::vector<std::tuple<PartialConfig, int, Spin, Spin>> enumerate_pairs(
    const SpinSystem& system, RecursiveCouplingEngine& engine) {
    std::vector<std::tuple<PartialConfig, int, Spin, Spin>> out;
    const int n = system.vertex_count();
    // Pinning status per vertex: -1 free, otherwise a domain position.
    std::vector<int> status(n, -1);
    std::vector<int> limit(n);
    for (int v = 0; v < n; ++v) limit[v] = static_cast<int>(system.domain(v).size());

    while (true) {
        PartialConfig pin;
        for (int v = 0; v < n; ++v)
            if (status[v] >= 0 && !system.is_pinned(v))
                pin.set(v, system.domain(v)[status[v]]);
        for (int v = 0; v < n; ++v) {
            if (status[v] >= 0 || system.is_pinned(v)) continue;
            Eigen::VectorXd m;
            try {
                m = engine.pinned_marginal(pin, v);
            } catch (const InfeasibleError&) {
                continue;
            }
            const auto& dom = system.domain(v);
            for (std::size_t i = 0; i < dom.size(); ++i)
                for (std::size_t j = i + 1; j < dom.size(); ++j)
                    if (m[dom[i]] > 0.0 && m[dom[j]] > 0.0)
                        out.emplace_back(pin, v, dom[i], dom[j]);
        }
        int v = n - 1;
        while (v >= 0) {
            if (system.is_pinned(v)) {
                --v;
                continue;
            }
            if (++status[v] < limit[v]) break;
            status[v] = -1;
            --v;
        }
        if (v < 0) break;
    }
    return out;
}

}  // namespace

CiEstimate estimate_ci(const SpinSystem& system, const HammingWeight& rho, CouplingKind kind,
                       const CiOptions& opts, RngStream rng) {
    if (kind == CouplingKind::TwoSpin && system.q() != 2)
        throw DomainError("estimate_ci: two-spin coupling needs q = 2");
    if (kind == CouplingKind::Coloring && system.graph().has_triangle())
        throw DomainError("estimate_ci: coloring coupling needs a triangle-free graph");
    if (opts.samples_per_pair <= 0) throw DomainError("estimate_ci: samples must be positive");

    RecursiveCouplingEngine engine(system, rho);
    std::vector<std::tuple<PartialConfig, int, Spin, Spin>> triples;
    if (opts.pairs <= 0) {
        triples = enumerate_pairs(system, engine);
    } else {
        // Sampled pinnings: each vertex pinned independently, resampling
        // infeasible draws.
        const int n = system.vertex_count();
        for (int t = 0; t < opts.pairs; ++t) {
            RngStream trng = rng.child(0x9000 + t);
            for (int attempt = 0; attempt < 200; ++attempt) {
                PartialConfig pin;
                for (int v = 0; v < n; ++v)
                    if (!system.is_pinned(v) && trng.bernoulli(opts.pin_probability)) {
                        const auto& dom = system.domain(v);
                        pin.set(v, dom[trng.below(static_cast<int>(dom.size()))]);
                    }
                std::vector<int> free;
                for (int v = 0; v < n; ++v)
                    if (!system.is_pinned(v) && !pin.contains(v)) free.push_back(v);
                if (free.empty()) continue;
                int v = free[trng.below(static_cast<int>(free.size()))];
                Eigen::VectorXd m;
                try {
                    m = engine.pinned_marginal(pin, v);
                } catch (const InfeasibleError&) {
                    continue;
                }
                std::vector<Spin> viable;
                for (Spin c : system.domain(v))
                    if (m[c] > 0.0) viable.push_back(c);
                if (viable.size() < 2) continue;
                int i = trng.below(static_cast<int>(viable.size()));
                int j = trng.below(static_cast<int>(viable.size()) - 1);
                if (j >= i) ++j;
                triples.emplace_back(pin, v, viable[std::min(i, j)], viable[std::max(i, j)]);
                break;
            }
        }
    }

    CiEstimate est;
    const double delta = 1.0 - opts.confidence;
    double rho_total = 0.0;
    for (int v = 0; v < system.vertex_count(); ++v) rho_total += rho.weight[v];

    std::vector<char> count_vertex(system.vertex_count(), 1);
    if (!opts.restrict_hamming.empty()) {
        std::fill(count_vertex.begin(), count_vertex.end(), 0);
        for (int v : opts.restrict_hamming) count_vertex[v] = 1;
    }

    int pair_id = 0;
    for (auto& [pin, v, a, b] : triples) {
        RngStream prng = rng.child(0xC0 + pair_id);
        RunningStats stats;
        for (int t = 0; t < opts.samples_per_pair; ++t) {
            CouplingSample cs = engine.sample(pin, v, a, b, prng);
            long long h = 0;
            for (int u : cs.discrepancy)
                if (count_vertex[u]) h += rho.weight[u];
            stats.add(static_cast<double>(h));
        }
        CiPairReport rep;
        rep.pin = pin;
        rep.vertex = v;
        rep.a = a;
        rep.b = b;
        rep.samples = opts.samples_per_pair;
        rep.mean = stats.mean / rho.weight[v];
        double hw = bernstein_halfwidth(stats.variance(), rho_total, opts.samples_per_pair,
                                        delta) /
                    rho.weight[v];
        rep.ci_low = std::max(0.0, rep.mean - hw);
        rep.ci_high = rep.mean + hw;
        if (rep.mean > est.max_ratio) {
            est.max_ratio = rep.mean;
            est.argmax_pair = pair_id;
        }
        est.pairs.push_back(std::move(rep));
        ++pair_id;
    }
    if (opts.target > 0.0)
        est.target_met = est.max_ratio <= opts.target + opts.slack;
    return est;
}

GofResult marginal_validity_test(const std::function<Config(RngStream&)>& sampler,
                                 const ExactDistribution& target, int samples, RngStream rng,
                                 double p_threshold) {
    if (samples <= 0) throw DomainError("marginal validity test: samples must be positive");
    GofResult out;
    std::vector<long long> counts(target.size(), 0);
    long long off_support = 0;
    for (int t = 0; t < samples; ++t) {
        Config c = sampler(rng);
        int i = target.index_of(c);
        if (i < 0)
            ++off_support;
        else
            ++counts[i];
    }
    if (off_support > 0) {
        out.pass = false;
        out.p_value = 0.0;
        out.statistic = std::numeric_limits<double>::infinity();
        out.dof = target.size() - 1;
        return out;
    }
    // Pool cells with tiny expectation into their neighbors to keep the
    // chi-square approximation honest.
    double stat = 0.0;
    int cells = 0;
    double pooled_exp = 0.0;
    long long pooled_obs = 0;
    for (int i = 0; i < target.size(); ++i) {
        double expct = target.prob[i] * samples;
        if (expct < 5.0) {
            pooled_exp += expct;
            pooled_obs += counts[i];
            if (pooled_exp >= 5.0) {
                double d = pooled_obs - pooled_exp;
                stat += d * d / pooled_exp;
                ++cells;
                pooled_exp = 0.0;
                pooled_obs = 0;
            }
            continue;
        }
        double d = counts[i] - expct;
        stat += d * d / expct;
        ++cells;
    }
    if (pooled_exp > 0.0) {
        double d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        ++cells;
    }
    out.statistic = stat;
    out.dof = std::max(1, cells - 1);
    out.p_value = chi2_sf(stat, out.dof);
    out.pass = out.p_value >= p_threshold;
    return out;
}

}  // namespace spinlab
