#include "spinlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include "spinlab/errors.hpp"
#include "spinlab/stats.hpp"

namespace spinlab {

void glauber_step(const SpinSystem& system, ChainState& state, int v, RngStream& rng) {
    ++state.step_count;
    if (system.is_pinned(v)) {
        state.config[v] = system.pinned_value(v);
        return;
    }
    Eigen::VectorXd w = system.conditional_at(v, state.config);
    int c = rng.categorical(w);
    if (c < 0)
        throw FrozenStateError("glauber step: all-zero conditional at vertex " +
                               std::to_string(v));
    state.config[v] = static_cast<Spin>(c);
}

void run_glauber(const SpinSystem& system, ChainState& state, std::int64_t T, RngStream& rng,
                 const std::vector<int>& sweep) {
    const int n = system.vertex_count();
    for (std::int64_t t = 0; t < T; ++t) {
        int v = sweep.empty() ? rng.below(n) : sweep[rng.below(static_cast<int>(sweep.size()))];
        glauber_step(system, state, v, rng);
    }
}

void resample_exact(const SpinSystem& system, const std::vector<int>& targets, Config& config,
                    RngStream& rng) {
    std::vector<int> free;
    for (int v : targets)
        if (!system.is_pinned(v)) free.push_back(v);
    if (free.empty()) return;

    std::int64_t total = 1;
    for (int v : free) {
        total *= static_cast<std::int64_t>(system.domain(v).size());
        if (total > state_cap())
            throw SizeError("resample: conditional support exceeds the state cap");
    }

    // Joint conditional weights of the free targets given everything else.
    // Only factors touching the resampled set matter; edges inside it are
    // counted once.
    const int m = static_cast<int>(free.size());
    std::vector<int> pos(system.vertex_count(), -1);
    for (int i = 0; i < m; ++i) pos[free[i]] = i;

    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(total));
    std::vector<int> idx(m, 0);
    Config val = config;
    for (int i = 0; i < m; ++i) val[free[i]] = system.domain(free[i])[0];
    while (true) {
        double w = 1.0;
        for (int i = 0; i < m && w != 0.0; ++i) {
            int v = free[i];
            Spin c = val[v];
            w *= system.field(v)[c];
            for (auto [nb, e] : system.graph().incident(v)) {
                if (pos[nb] >= 0 && pos[nb] <= i) continue;  // counted from the other side
                w *= system.interaction(e)(c, val[nb]);
            }
        }
        weights.push_back(w);
        int i = m - 1;
        while (i >= 0) {
            if (++idx[i] < static_cast<int>(system.domain(free[i]).size())) {
                val[free[i]] = system.domain(free[i])[idx[i]];
                break;
            }
            idx[i] = 0;
            val[free[i]] = system.domain(free[i])[0];
            --i;
        }
        if (i < 0) break;
    }

    int pick = rng.categorical(weights);
    if (pick < 0) throw FrozenStateError("resample: conditional support is empty");
    // Decode the picked assignment.
    for (int i = m - 1; i >= 0; --i) {
        int ds = static_cast<int>(system.domain(free[i]).size());
        config[free[i]] = system.domain(free[i])[pick % ds];
        pick /= ds;
    }
}

void down_up_step(const SpinSystem& system, const Partition& p, int ell, ResampleMode mode,
                  ChainState& state, RngStream& rng) {
    if (ell < 0 || ell > p.k) throw DomainError("down-up step: ell out of range");
    ++state.step_count;
    // Uniform subset R of [k] with |R| = ell (Fisher-Yates prefix).
    std::vector<int> ids(p.k);
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < ell; ++i) std::swap(ids[i], ids[i + rng.below(p.k - i)]);
    std::vector<char> in_R(p.k, 0);
    for (int i = 0; i < ell; ++i) in_R[ids[i]] = 1;

    std::vector<int> targets;
    if (mode == ResampleMode::Complement) {
        std::vector<char> keep(system.vertex_count(), 0);
        for (int b = 0; b < p.k; ++b)
            if (in_R[b])
                for (int v : p.blocks[b]) keep[v] = 1;
        for (int v = 0; v < system.vertex_count(); ++v)
            if (!keep[v]) targets.push_back(v);
    } else {
        for (int b = 0; b < p.k; ++b)
            if (in_R[b]) targets.insert(targets.end(), p.blocks[b].begin(), p.blocks[b].end());
    }
    resample_exact(system, targets, state.config, rng);
}

void SimDownUpParams::validate(int k) const {
    if (T0 < 1 || T1 < 1) throw DomainError("sim-down-up: T0 and T1 must be >= 1");
    if (base_level < 0 || base_level >= k)
        throw DomainError("sim-down-up: base level must lie in [0, k)");
}

SimDownUpParams set_simdownup_schedule(std::int64_t t_mix_eta, int n, double epsilon, int M,
                                       double eta, double c_const) {
    if (t_mix_eta < 1 || n < 1 || M < 1) throw DomainError("schedule: bad parameters");
    if (!(epsilon > 0.0) || !(eta > 0.0)) throw DomainError("schedule: bad parameters");
    double C = c_const * M / eta;
    double L = std::max(1.0, std::log(static_cast<double>(n) / epsilon));
    SimDownUpParams out;
    out.T0 = static_cast<std::int64_t>(std::ceil(static_cast<double>(t_mix_eta) * C * L));
    out.T1 = static_cast<std::int64_t>(std::ceil(C * L));
    out.M = M;
    out.eta = eta;
    out.c_const = c_const;
    out.base_level = 0;  // caller fixes this from the actual partition k
    return out;
}

namespace {

PartialConfig sim_down_up_impl(const SpinSystem& system, const Partition& p, const Config& X,
                               std::vector<char>& in_R, int r, const SimDownUpParams& params,
                               RngStream rng) {
    // Free vertices: everything outside U_R.
    std::vector<char> in_UR(system.vertex_count(), 0);
    for (int b = 0; b < p.k; ++b)
        if (in_R[b])
            for (int v : p.blocks[b]) in_UR[v] = 1;

    Config Y = X;
    if (r >= params.base_level) {
        // Base case: Glauber on the conditional system, sweeping free vertices.
        PartialConfig tau;
        for (int v = 0; v < system.vertex_count(); ++v)
            if (in_UR[v] && !system.is_pinned(v)) tau.set(v, X[v]);
        SpinSystem cond = system.conditioned(tau);
        std::vector<int> sweep;
        for (int v = 0; v < system.vertex_count(); ++v)
            if (!cond.is_pinned(v)) sweep.push_back(v);
        ChainState cs{Y, 0};
        if (!sweep.empty()) run_glauber(cond, cs, params.T0, rng, sweep);
        Y = cs.config;
    } else {
        for (std::int64_t t = 1; t <= params.T1; ++t) {
            // Pick i in [k] \ R uniformly.
            std::vector<int> avail;
            for (int b = 0; b < p.k; ++b)
                if (!in_R[b]) avail.push_back(b);
            int i = avail[rng.below(static_cast<int>(avail.size()))];
            in_R[i] = 1;
            PartialConfig sub =
                sim_down_up_impl(system, p, Y, in_R, r + 1, params,
                                 rng.child(static_cast<std::uint64_t>(t)));
            in_R[i] = 0;
            for (auto [v, c] : sub.assign) Y[v] = c;
        }
    }
    PartialConfig out;
    for (int v = 0; v < system.vertex_count(); ++v)
        if (!in_UR[v]) out.set(v, Y[v]);
    return out;
}

}  // namespace

PartialConfig sim_down_up(const SpinSystem& system, const Partition& p, const Config& X,
                          const std::vector<int>& R, const SimDownUpParams& params,
                          RngStream rng) {
    params.validate(p.k);
    std::vector<char> in_R(p.k, 0);
    for (int b : R) {
        if (b < 0 || b >= p.k) throw DomainError("sim-down-up: block index out of range");
        in_R[b] = 1;
    }
    return sim_down_up_impl(system, p, X, in_R, static_cast<int>(R.size()), params, rng);
}

Config sim_down_up_sample(const SpinSystem& system, const Partition& p, const Config& start,
                          const SimDownUpParams& params, RngStream rng) {
    PartialConfig res = sim_down_up(system, p, start, {}, params, std::move(rng));
    Config out = start;
    for (auto [v, c] : res.assign) out[v] = c;
    return out;
}

std::vector<std::vector<int>> bipartite_block_sets(const SpinSystem& system,
                                                   const Partition& left_partition, int M) {
    if (!system.graph().bipartition())
        throw DomainError("bipartite block: graph is not bipartite");
    const auto& right = system.graph().bipartition()->right;
    const int k = left_partition.k;
    const int ss = std::min(2 * M, k);
    std::vector<std::vector<int>> out;
    std::vector<int> pick(ss);
    std::function<void(int, int)> rec = [&](int start, int got) {
        if (got == ss) {
            std::vector<int> block;
            for (int b : pick) {
                const auto& bl = left_partition.blocks[b];
                block.insert(block.end(), bl.begin(), bl.end());
            }
            block.insert(block.end(), right.begin(), right.end());
            std::sort(block.begin(), block.end());
            out.push_back(std::move(block));
            return;
        }
        for (int b = start; b < k; ++b) {
            pick[got] = b;
            rec(b + 1, got + 1);
        }
    };
    rec(0, 0);
    return out;
}

void bipartite_block_step(const SpinSystem& system, const Partition& left_partition, int M,
                          ChainState& state, RngStream& rng) {
    if (!system.graph().bipartition())
        throw DomainError("bipartite block: graph is not bipartite");
    ++state.step_count;
    const int k = left_partition.k;
    const int ss = std::min(2 * M, k);

    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < ss; ++i) std::swap(ids[i], ids[i + rng.below(k - i)]);

    std::vector<int> us;  // free vertices of U_S
    for (int i = 0; i < ss; ++i)
        for (int v : left_partition.blocks[ids[i]])
            if (!system.is_pinned(v)) us.push_back(v);
    std::sort(us.begin(), us.end());

    // (i) Sample X_{U_S} from its conditional marginal with the right part
    // summed out: the right vertices are conditionally independent given the
    // left configuration, so each contributes a per-vertex sum.
    if (!us.empty()) {
        std::int64_t total = 1;
        for (int v : us) {
            total *= static_cast<std::int64_t>(system.domain(v).size());
            if (total > state_cap())
                throw SizeError("bipartite block: marginal enumeration exceeds the cap");
        }
        std::vector<char> in_us(system.vertex_count(), 0);
        for (int v : us) in_us[v] = 1;
        // Right vertices adjacent to U_S; the rest contribute constants.
        std::vector<int> touched;
        for (int v : us)
            for (int u : system.graph().neighbors(v))
                if (!in_us[u]) touched.push_back(u);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

        Config val = state.config;
        const int m = static_cast<int>(us.size());
        std::vector<int> idx(m, 0);
        for (int i = 0; i < m; ++i) val[us[i]] = system.domain(us[i])[0];
        std::vector<double> weights;
        weights.reserve(static_cast<std::size_t>(total));
        while (true) {
            double w = 1.0;
            for (int v : us) w *= system.field(v)[val[v]];
            for (int u : touched) {
                if (w == 0.0) break;
                if (system.is_pinned(u)) {
                    // Pinned right vertex contributes its interactions only.
                    Spin c = system.pinned_value(u);
                    double f = 1.0;
                    for (auto [nb, e] : system.graph().incident(u))
                        if (in_us[nb]) f *= system.interaction(e)(c, val[nb]);
                    w *= f;
                    continue;
                }
                double sum = 0.0;
                for (Spin c : system.domain(u)) {
                    double f = system.field(u)[c];
                    for (auto [nb, e] : system.graph().incident(u)) {
                        if (f == 0.0) break;
                        f *= system.interaction(e)(c, val[nb]);
                    }
                    sum += f;
                }
                w *= sum;
            }
            weights.push_back(w);
            int i = m - 1;
            while (i >= 0) {
                if (++idx[i] < static_cast<int>(system.domain(us[i]).size())) {
                    val[us[i]] = system.domain(us[i])[idx[i]];
                    break;
                }
                idx[i] = 0;
                val[us[i]] = system.domain(us[i])[0];
                --i;
            }
            if (i < 0) break;
        }
        int pick = rng.categorical(weights);
        if (pick < 0) throw FrozenStateError("bipartite block: left marginal has no support");
        for (int i = m - 1; i >= 0; --i) {
            int ds = static_cast<int>(system.domain(us[i]).size());
            state.config[us[i]] = system.domain(us[i])[pick % ds];
            pick /= ds;
        }
    }

    // (ii) Resample every right vertex from its conditional given the left.
    for (int u : system.graph().bipartition()->right) {
        if (system.is_pinned(u)) {
            state.config[u] = system.pinned_value(u);
            continue;
        }
        Eigen::VectorXd w = system.conditional_at(u, state.config);
        int c = rng.categorical(w);
        if (c < 0) throw FrozenStateError("bipartite block: frozen right vertex");
        state.config[u] = static_cast<Spin>(c);
    }
}

UpdateSchedule UpdateSchedule::with_mask(std::uint64_t keep_mask) const {
    UpdateSchedule out = *this;
    for (std::size_t i = 0; i < out.records.size(); ++i)
        out.records[i].censored = ((keep_mask >> i) & 1ull) == 0;
    return out;
}

int UpdateSchedule::active_count() const {
    int c = 0;
    for (const auto& r : records) c += r.censored ? 0 : 1;
    return c;
}

UpdateSchedule random_schedule(const SpinSystem& system, int length, RngStream& rng) {
    UpdateSchedule out;
    for (int i = 0; i < length; ++i) {
        UpdateRecord r;
        r.vertex = rng.below(system.vertex_count());
        r.tag = rng.next_u64();
        out.records.push_back(r);
    }
    return out;
}

SpinOrders SpinOrders::identity(int n, int q) {
    SpinOrders out;
    out.rank.assign(n, std::vector<int>(q));
    for (auto& r : out.rank) std::iota(r.begin(), r.end(), 0);
    return out;
}

SpinOrders SpinOrders::bipartite_hardcore(const Graph& g) {
    if (!g.bipartition()) throw DomainError("orders: graph is not bipartite");
    SpinOrders out = identity(g.vertex_count(), 2);
    for (int v : g.bipartition()->right) out.rank[v] = {1, 0};  // - above +
    return out;
}

Spin SpinOrders::max_spin(int v, const std::vector<Spin>& domain) const {
    Spin best = domain.front();
    for (Spin s : domain)
        if (rank[v][s] > rank[v][best]) best = s;
    return best;
}

Config maximal_config(const SpinSystem& system, const SpinOrders& orders) {
    Config c(system.vertex_count());
    for (int v = 0; v < system.vertex_count(); ++v)
        c[v] = system.is_pinned(v) ? system.pinned_value(v)
                                   : orders.max_spin(v, system.domain(v));
    return c;
}

namespace {

// All domain-valid configurations (pinned vertices frozen).
std::vector<Config> all_valid_configs(const SpinSystem& system) {
    std::int64_t total = 1;
    for (int v = 0; v < system.vertex_count(); ++v) {
        total *= system.is_pinned(v) ? 1 : static_cast<std::int64_t>(system.domain(v).size());
        if (total > state_cap()) throw SizeError("monotone check: state space exceeds the cap");
    }
    std::vector<Config> out;
    Config c(system.vertex_count());
    std::vector<int> idx(system.vertex_count(), 0);
    for (int v = 0; v < system.vertex_count(); ++v)
        c[v] = system.is_pinned(v) ? system.pinned_value(v) : system.domain(v)[0];
    while (true) {
        out.push_back(c);
        int v = system.vertex_count() - 1;
        while (v >= 0) {
            if (!system.is_pinned(v) &&
                ++idx[v] < static_cast<int>(system.domain(v).size())) {
                c[v] = system.domain(v)[idx[v]];
                break;
            }
            idx[v] = 0;
            c[v] = system.is_pinned(v) ? system.pinned_value(v) : system.domain(v)[0];
            --v;
        }
        if (v < 0) break;
    }
    return out;
}

}  // namespace

MonotoneCheck check_monotone(const SpinSystem& system, const SpinOrders& orders) {
    MonotoneCheck out;
    auto configs = all_valid_configs(system);
    const int n = system.vertex_count();

    auto leq = [&](const Config& x, const Config& y) {
        for (int v = 0; v < n; ++v)
            if (orders.rank[v][x[v]] > orders.rank[v][y[v]]) return false;
        return true;
    };

    for (const Config& x : configs) {
        for (const Config& y : configs) {
            if (!leq(x, y)) continue;
            for (int v = 0; v < n; ++v) {
                if (system.is_pinned(v)) continue;
                Eigen::VectorXd wx = system.conditional_at(v, x);
                Eigen::VectorXd wy = system.conditional_at(v, y);
                double zx = wx.sum(), zy = wy.sum();
                if (!(zx > 0.0) || !(zy > 0.0)) continue;  // undefined update, skip
                // Stochastic dominance under <=_v: the cumulative mass of the
                // lower state must dominate at every prefix.
                std::vector<Spin> dom = system.domain(v);
                std::sort(dom.begin(), dom.end(), [&](Spin a, Spin b) {
                    return orders.rank[v][a] < orders.rank[v][b];
                });
                double cx = 0.0, cy = 0.0;
                for (std::size_t i = 0; i + 1 < dom.size(); ++i) {
                    cx += wx[dom[i]] / zx;
                    cy += wy[dom[i]] / zy;
                    if (cy > cx + 1e-12) {
                        out.monotone = false;
                        out.witness_low = x;
                        out.witness_high = y;
                        out.witness_vertex = v;
                        return out;
                    }
                }
            }
        }
    }
    return out;
}

ExactDistribution censored_run_exact(const SpinSystem& system, const UpdateSchedule& schedule,
                                     const Config& start) {
    ExactDistribution mu = enumerate(system);
    const int m = mu.size();
    int s0 = mu.index_of(start);
    if (s0 < 0) throw DomainError("censored run: start state is outside the support");

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(m);
    pi[s0] = 1.0;

    // Per-vertex single-site update operators, built lazily as move lists.
    std::vector<std::vector<std::vector<std::pair<int, double>>>> moves(
        system.vertex_count());
    auto build_moves = [&](int v) {
        auto& mv = moves[v];
        if (!mv.empty()) return;
        mv.resize(m);
        Config scratch;
        for (int i = 0; i < m; ++i) {
            if (system.is_pinned(v)) {
                mv[i] = {{i, 1.0}};
                continue;
            }
            Eigen::VectorXd w = system.conditional_at(v, mu.support[i]);
            double z = w.sum();
            if (!(z > 0.0))
                throw FrozenStateError("censored run: frozen conditional inside the support");
            scratch = mu.support[i];
            for (Spin c : system.domain(v)) {
                if (w[c] == 0.0) continue;
                scratch[v] = c;
                int j = mu.index_of(scratch);
                if (j < 0) throw InfeasibleError("censored run: positive state missing");
                mv[i].emplace_back(j, w[c] / z);
            }
        }
    };

    for (const auto& rec : schedule.records) {
        if (rec.censored) continue;
        build_moves(rec.vertex);
        Eigen::VectorXd next = Eigen::VectorXd::Zero(m);
        const auto& mv = moves[rec.vertex];
        for (int i = 0; i < m; ++i) {
            if (pi[i] == 0.0) continue;
            for (auto [j, p] : mv[i]) next[j] += pi[i] * p;
        }
        pi = std::move(next);
    }

    ExactDistribution out = mu;
    out.prob = pi;
    return out;
}

Config censored_run_mc(const SpinSystem& system, const UpdateSchedule& schedule,
                       const Config& start, std::uint64_t seed) {
    ChainState st{start, 0};
    for (const auto& rec : schedule.records) {
        if (rec.censored) continue;
        RngStream r = RngStream(seed).child(rec.tag);
        glauber_step(system, st, rec.vertex, r);
    }
    return st.config;
}

TransitionMatrix chain_matrix(const SpinSystem& system, const ChainSpec& spec) {
    switch (spec.kind) {
        case ChainSpec::Glauber:
            return glauber_matrix(system);
        case ChainSpec::DownUp: {
            // One entry per subset R of size ell; uniform choice.
            std::vector<std::vector<int>> blocks;
            std::vector<int> pick(spec.ell);
            std::function<void(int, int)> rec = [&](int startb, int got) {
                if (got == spec.ell) {
                    std::vector<int> blk;
                    for (int b : pick) {
                        const auto& bl = spec.partition.blocks[b];
                        blk.insert(blk.end(), bl.begin(), bl.end());
                    }
                    std::sort(blk.begin(), blk.end());
                    blocks.push_back(std::move(blk));
                    return;
                }
                for (int b = startb; b < spec.partition.k; ++b) {
                    pick[got] = b;
                    rec(b + 1, got + 1);
                }
            };
            rec(0, 0);
            return block_matrix(system, blocks, spec.mode);
        }
        case ChainSpec::BipartiteBlock:
            return block_matrix(system, bipartite_block_sets(system, spec.partition, spec.M),
                                ResampleMode::Block);
    }
    throw DomainError("chain matrix: unknown chain kind");
}

void chain_step(const SpinSystem& system, const ChainSpec& spec, ChainState& state,
                RngStream& rng) {
    switch (spec.kind) {
        case ChainSpec::Glauber: {
            int v = rng.below(system.vertex_count());
            glauber_step(system, state, v, rng);
            return;
        }
        case ChainSpec::DownUp:
            down_up_step(system, spec.partition, spec.ell, spec.mode, state, rng);
            return;
        case ChainSpec::BipartiteBlock:
            bipartite_block_step(system, spec.partition, spec.M, state, rng);
            return;
    }
    throw DomainError("chain step: unknown chain kind");
}

MixingEstimate mixing_time_of_matrix(const TransitionMatrix& tm, double eps, std::int64_t t_cap) {
    const int m = tm.size();
    Eigen::MatrixXd Pt = Eigen::MatrixXd::Identity(m, m);
    MixingEstimate out;
    for (std::int64_t t = 1; t <= t_cap; ++t) {
        Pt = (Pt * tm.P).eval();
        double worst = 0.0;
        for (int i = 0; i < m; ++i)
            worst = std::max(worst, 0.5 * (Pt.row(i).transpose() - tm.stationary.prob)
                                              .cwiseAbs()
                                              .sum());
        out.tv_curve.push_back(worst);
        if (worst <= eps) {
            out.t_mix = t;
            return out;
        }
    }
    out.converged = false;
    out.t_mix = t_cap;
    return out;
}

MixingEstimate estimate_mixing_exact(const SpinSystem& system, const ChainSpec& spec, double eps,
                                     std::int64_t t_cap) {
    return mixing_time_of_matrix(chain_matrix(system, spec), eps, t_cap);
}

MixingEstimate estimate_mixing_mc(const SpinSystem& system, const ChainSpec& spec, double eps,
                                  int replicas, const Config& start, RngStream rng,
                                  std::int64_t t_cap, int jobs) {
    ExactDistribution mu = enumerate(system);
    MixingEstimate out;
    out.bias_bound = tv_bias_bound(mu.size(), replicas);

    std::vector<ChainState> states(replicas);
    std::vector<RngStream> streams;
    streams.reserve(replicas);
    for (int r = 0; r < replicas; ++r) {
        states[r] = ChainState{start, 0};
        streams.push_back(rng.child(static_cast<std::uint64_t>(r)));
    }

    jobs = std::max(1, jobs);
    for (std::int64_t t = 1; t <= t_cap; ++t) {
        auto advance = [&](int lo, int hi) {
            for (int r = lo; r < hi; ++r) chain_step(system, spec, states[r], streams[r]);
        };
        if (jobs == 1) {
            advance(0, replicas);
        } else {
            std::vector<std::thread> pool;
            int chunk = (replicas + jobs - 1) / jobs;
            for (int j = 0; j < jobs; ++j) {
                int lo = j * chunk, hi = std::min(replicas, lo + chunk);
                if (lo < hi) pool.emplace_back(advance, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
        Eigen::VectorXd emp = Eigen::VectorXd::Zero(mu.size());
        for (int r = 0; r < replicas; ++r) {
            int i = mu.index_of(states[r].config);
            if (i >= 0) emp[i] += 1.0 / replicas;
        }
        double tv = 0.5 * (emp - mu.prob).cwiseAbs().sum();
        out.tv_curve.push_back(tv);
        if (tv <= eps + out.bias_bound) {
            out.t_mix = t;
            return out;
        }
    }
    out.converged = false;
    out.t_mix = t_cap;
    return out;
}

}  // namespace spinlab
