// spinlab: experiment driver for spin-system sampling chains.
//
// Subcommands: gap, sample, mix, partition, ci, censor-check, saw-dot,
// acceptance. Standard output carries one machine-readable JSON manifest
// (plus CSV when requested); progress goes to standard error.
//
// Exit codes: 0 success, 1 criterion failure, 2 usage error, 3 infeasible
// model.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinlab/acceptance.hpp"
#include "spinlab/coupling.hpp"
#include "spinlab/dynamics.hpp"
#include "spinlab/errors.hpp"
#include "spinlab/io.hpp"
#include "spinlab/saw.hpp"
#include "spinlab/stats.hpp"

using nlohmann::json;
using namespace spinlab;

namespace {

struct CommonArgs {
    std::string graph_path;
    std::string model_path;
    std::string pinning_path;
    std::uint64_t seed = 0;
};

SpinSystem load_system(const CommonArgs& a, Graph* graph_out = nullptr) {
    Graph g = load_graph_file(a.graph_path);
    SpinSystem sys = load_model_file(g, a.model_path);
    if (!a.pinning_path.empty()) {
        std::ifstream in(a.pinning_path);
        if (!in) throw DomainError("cannot open pinning file: " + a.pinning_path);
        json j;
        in >> j;
        sys = sys.conditioned(pinning_from_json(j));
    }
    if (graph_out) *graph_out = sys.graph();
    return sys;
}

struct ChainArgs {
    std::string chain = "glauber";
    std::string partition_path;
    int ell = 1;
    std::string resample = "complement";
    int M = 1;
};

ChainSpec make_chain_spec(const ChainArgs& c) {
    ChainSpec spec;
    if (c.chain == "glauber") {
        spec.kind = ChainSpec::Glauber;
        return spec;
    }
    if (c.partition_path.empty())
        throw DomainError("chain '" + c.chain + "' needs --partition");
    spec.partition = load_partition_file(c.partition_path);
    if (c.chain == "downup") {
        spec.kind = ChainSpec::DownUp;
        spec.ell = c.ell;
        spec.mode = c.resample == "block" ? ResampleMode::Block : ResampleMode::Complement;
        return spec;
    }
    if (c.chain == "bipartite-block") {
        spec.kind = ChainSpec::BipartiteBlock;
        spec.M = c.M;
        return spec;
    }
    throw DomainError("unknown chain '" + c.chain + "'");
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file: " + path);
    return out;
}

void emit_manifest(const std::string& command, const json& params, std::uint64_t seed,
                   double wall, const json& outcome) {
    RunManifest m;
    m.command = command;
    m.params = params;
    m.seed = seed;
    m.wall_seconds = wall;
    m.outcome = outcome;
    std::cout << m.to_json().dump(2) << std::endl;
}

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int run(int argc, char** argv) {
    CLI::App app{"spinlab: samplers, partitions and exact oracles for spin systems"};
    app.require_subcommand(1);

    CommonArgs common;
    ChainArgs chain;
    std::string csv_path;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool model = true) {
        cmd->add_option("--graph", common.graph_path, "graph file")->required();
        if (model) cmd->add_option("--model", common.model_path, "model JSON file")->required();
        cmd->add_option("--pinning", common.pinning_path, "pinning JSON file");
        cmd->add_option("--seed", common.seed, "root random seed");
    };
    auto add_chain = [&](CLI::App* cmd, bool with_sim = false) {
        cmd->add_option("--chain", chain.chain,
                        with_sim ? "glauber|downup|simdownup|bipartite-block"
                                 : "glauber|downup|bipartite-block");
        cmd->add_option("--partition", chain.partition_path, "partition JSON file");
        cmd->add_option("--ell", chain.ell, "number of kept blocks (downup)");
        cmd->add_option("--resample", chain.resample, "block|complement (downup)");
        cmd->add_option("--bigm", chain.M, "M parameter (bipartite block / simdownup)");
    };

    // gap ------------------------------------------------------------------
    auto* gap = app.add_subcommand("gap", "spectral gap and relaxation time of a chain");
    add_common(gap);
    add_chain(gap);
    gap->callback([&] {
        Timer timer;
        SpinSystem sys = load_system(common);
        ChainSpec spec = make_chain_spec(chain);
        TransitionMatrix tm = chain_matrix(sys, spec);
        SpectralGap sg = spectral_gap(tm);
        json outcome;
        outcome["states"] = tm.size();
        outcome["lambda2"] = sg.lambda2;
        outcome["gap"] = sg.gap;
        outcome["t_rel"] = std::isinf(sg.t_rel) ? json("inf") : json(sg.t_rel);
        outcome["detailed_balance_residual"] = tm.detailed_balance_residual();
        json params{{"graph", common.graph_path}, {"model", common.model_path},
                    {"chain", chain.chain}};
        emit_manifest("gap", params, common.seed, timer.seconds(), outcome);
    });

    // sample -----------------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "draw samples from a chain");
    std::int64_t steps = 1000;
    int replicas = 1;
    double eps = 0.05;
    std::int64_t t0_opt = 0, t1_opt = 0;
    double c_const = 4.0, eta = 0.5;
    add_common(sample);
    add_chain(sample, true);
    sample->add_option("--steps", steps, "chain steps per replica");
    sample->add_option("--replicas", replicas, "number of independent samples");
    sample->add_option("--eps", eps, "accuracy target (simdownup schedule)");
    sample->add_option("--t0", t0_opt, "override simdownup T0");
    sample->add_option("--t1", t1_opt, "override simdownup T1");
    sample->add_option("--c-const", c_const, "schedule constant c in C = c*M/eta");
    sample->add_option("--eta", eta, "easy-regime degree fraction eta");
    sample->add_option("--csv", csv_path, "write replica,state rows here");
    sample->add_option("--jobs", jobs, "parallel replicas");
    sample->callback([&] {
        Timer timer;
        SpinSystem sys = load_system(common);
        std::vector<Config> results(replicas);
        RngStream root(common.seed);

        auto worker = [&](int lo, int hi) {
            for (int r = lo; r < hi; ++r) {
                RngStream rep = root.child(static_cast<std::uint64_t>(r));
                if (chain.chain == "simdownup") {
                    Partition p = load_partition_file(chain.partition_path);
                    std::int64_t tme = std::max<std::int64_t>(1, steps);
                    SimDownUpParams params =
                        set_simdownup_schedule(tme, sys.vertex_count(), eps, chain.M, eta,
                                               c_const);
                    if (t0_opt > 0) params.T0 = t0_opt;
                    if (t1_opt > 0) params.T1 = t1_opt;
                    params.base_level = std::max(0, p.k - 2 * chain.M);
                    results[r] = sim_down_up_sample(sys, p, sys.base_config(), params, rep);
                } else {
                    ChainSpec spec = make_chain_spec(chain);
                    ChainState st{sys.base_config(), 0};
                    for (std::int64_t t = 0; t < steps; ++t) chain_step(sys, spec, st, rep);
                    results[r] = st.config;
                }
            }
        };
        if (jobs <= 1) {
            worker(0, replicas);
        } else {
            std::vector<std::thread> pool;
            int chunk = (replicas + jobs - 1) / jobs;
            for (int j = 0; j < jobs; ++j) {
                int lo = j * chunk, hi = std::min(replicas, lo + chunk);
                if (lo < hi) pool.emplace_back(worker, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        if (!csv_path.empty()) {
            auto out = open_csv(csv_path);
            out << "replica,state\n";
            for (int r = 0; r < replicas; ++r)
                out << r << ',' << config_to_string(results[r], sys.q()) << '\n';
        }
        json outcome;
        outcome["replicas"] = replicas;
        outcome["first_state"] = config_to_string(results.front(), sys.q());
        json params{{"graph", common.graph_path}, {"model", common.model_path},
                    {"chain", chain.chain}, {"steps", steps}, {"replicas", replicas}};
        emit_manifest("sample", params, common.seed, timer.seconds(), outcome);
    });

    // mix ---------------------------------------------------------------------
    auto* mix = app.add_subcommand("mix", "estimate the mixing time of a chain");
    std::string mix_mode = "exact";
    add_common(mix);
    add_chain(mix);
    mix->add_option("--eps", eps, "TV threshold");
    mix->add_option("--mode", mix_mode, "exact|mc");
    mix->add_option("--replicas", replicas, "replicas (mc mode)");
    mix->add_option("--csv", csv_path, "write step,tv rows here");
    mix->add_option("--jobs", jobs, "parallel replicas (mc mode)");
    mix->callback([&] {
        Timer timer;
        SpinSystem sys = load_system(common);
        ChainSpec spec = make_chain_spec(chain);
        MixingEstimate me;
        if (mix_mode == "exact") {
            me = estimate_mixing_exact(sys, spec, eps);
        } else if (mix_mode == "mc") {
            me = estimate_mixing_mc(sys, spec, eps, replicas, sys.base_config(),
                                    RngStream(common.seed), 100000, jobs);
        } else {
            throw DomainError("mix: unknown mode '" + mix_mode + "'");
        }
        if (!csv_path.empty()) {
            auto out = open_csv(csv_path);
            out << "step,tv\n";
            for (std::size_t t = 0; t < me.tv_curve.size(); ++t)
                out << (t + 1) << ',' << format_double(me.tv_curve[t]) << '\n';
        }
        json outcome;
        outcome["t_mix"] = me.t_mix;
        outcome["converged"] = me.converged;
        outcome["bias_bound"] = me.bias_bound;
        json params{{"graph", common.graph_path}, {"model", common.model_path},
                    {"chain", chain.chain}, {"eps", eps}, {"mode", mix_mode}};
        emit_manifest("mix", params, common.seed, timer.seconds(), outcome);
    });

    // partition -----------------------------------------------------------------
    auto* part = app.add_subcommand("partition", "construct a degree partition");
    int k = 2;
    double xi = 1.0;
    std::string pmode = "general";
    double round_factor = 2.0;
    int copies = 0;
    double peps = 0.01;
    int left_bound = -1;
    part->add_option("--graph", common.graph_path, "graph file")->required();
    part->add_option("--k", k, "number of blocks")->required();
    part->add_option("--xi", xi, "degree slack xi");
    part->add_option("--mode", pmode, "general|balanced|bipartite_left");
    part->add_option("--seed", common.seed, "root random seed");
    part->add_option("--round-factor", round_factor, "rounds per boosted copy");
    part->add_option("--copies", copies, "boosted copies (0: from --eps)");
    part->add_option("--eps", peps, "failure budget for boosting");
    part->add_option("--left-bound", left_bound, "per-block bound for bipartite mode");
    part->callback([&] {
        Timer timer;
        Graph g = load_graph_file(common.graph_path);
        PartitionMode mode = pmode == "balanced"        ? PartitionMode::Balanced
                             : pmode == "bipartite_left" ? PartitionMode::BipartiteLeft
                                                         : PartitionMode::General;
        if (pmode != "general" && pmode != "balanced" && pmode != "bipartite_left")
            throw DomainError("partition: unknown mode '" + pmode + "'");
        if (lll_condition_lhs(g.max_degree(), k, xi) >= 1.0)
            std::cerr << "warning: LLL condition fails at Delta=" << g.max_degree()
                      << "; existence is not guaranteed in this regime\n";
        PartitionStats stats;
        Partition p = construct_partition(g, k, xi, mode, PartitionBudget{round_factor, copies,
                                                                          peps},
                                          RngStream(common.seed), &stats, left_bound);
        json outcome;
        outcome["partition"] = partition_to_json(p);
        outcome["rounds"] = stats.rounds;
        outcome["copies_used"] = stats.copies_used;
        outcome["lll_condition_holds"] = stats.lll_condition_holds;
        json params{{"graph", common.graph_path}, {"k", k}, {"xi", xi}, {"mode", pmode}};
        emit_manifest("partition", params, common.seed, timer.seconds(), outcome);
    });

    // ci ---------------------------------------------------------------------
    auto* ci = app.add_subcommand("ci", "empirical coupling-independence estimate");
    std::string coupling = "two-spin";
    int pairs = 0;
    int samples = 1000;
    double target = 0.0;
    double pin_prob = 0.5;
    add_common(ci);
    ci->add_option("--coupling", coupling, "two-spin|coloring");
    ci->add_option("--pairs", pairs, "sampled pinning triples (0: exhaustive)");
    ci->add_option("--samples", samples, "samples per pair");
    ci->add_option("--target", target, "target CI constant C");
    ci->add_option("--pin-prob", pin_prob, "per-vertex pinning probability");
    ci->callback([&] {
        Timer timer;
        SpinSystem sys = load_system(common);
        CiOptions opts;
        opts.pairs = pairs;
        opts.samples_per_pair = samples;
        opts.target = target;
        opts.pin_probability = pin_prob;
        CouplingKind kind =
            coupling == "coloring" ? CouplingKind::Coloring : CouplingKind::TwoSpin;
        if (coupling != "coloring" && coupling != "two-spin")
            throw DomainError("ci: unknown coupling '" + coupling + "'");
        CiEstimate est = estimate_ci(sys, HammingWeight::unit(sys.vertex_count()), kind, opts,
                                     RngStream(common.seed));
        json outcome;
        outcome["max_ratio"] = est.max_ratio;
        outcome["pairs_tested"] = est.pairs.size();
        outcome["target_met"] = est.target_met;
        outcome["note"] = "empirical lower bound on the CI constant";
        if (est.argmax_pair >= 0) {
            const auto& p = est.pairs[est.argmax_pair];
            outcome["worst_pair"] = {{"vertex", p.vertex},
                                     {"a", static_cast<int>(p.a)},
                                     {"b", static_cast<int>(p.b)},
                                     {"mean", p.mean},
                                     {"ci", {p.ci_low, p.ci_high}},
                                     {"pinning", pinning_to_json(p.pin)}};
        }
        json params{{"graph", common.graph_path}, {"model", common.model_path},
                    {"coupling", coupling}, {"pairs", pairs}, {"samples", samples},
                    {"target", target}};
        emit_manifest("ci", params, common.seed, timer.seconds(), outcome);
        if (target > 0.0 && !est.target_met) std::exit(1);
    });

    // censor-check ---------------------------------------------------------------
    auto* censor = app.add_subcommand("censor-check",
                                      "censoring inequality sweep on a monotone system");
    int updates = 10;
    std::int64_t masks = 0;
    add_common(censor);
    censor->add_option("--updates", updates, "schedule length");
    censor->add_option("--masks", masks, "random masks to test (0: exhaustive)");
    censor->add_option("--csv", csv_path, "write mask,kept,tv rows here");
    censor->callback([&] {
        Timer timer;
        SpinSystem sys = load_system(common);
        SpinOrders orders = SpinOrders::bipartite_hardcore(sys.graph());
        MonotoneCheck mc = check_monotone(sys, orders);
        if (!mc.monotone) throw DomainError("censor-check: the system is not monotone");
        Config xplus = maximal_config(sys, orders);
        RngStream rng(common.seed);
        UpdateSchedule sched = random_schedule(sys, updates, rng);
        ExactDistribution mu = enumerate(sys);
        double tv_full = divergence(Divergence::TV, censored_run_exact(sys, sched, xplus), mu);

        std::ofstream csv;
        if (!csv_path.empty()) {
            csv = open_csv(csv_path);
            csv << "mask,kept,tv\n";
        }
        double max_violation = 0.0;
        std::int64_t tested = 0;
        auto test_mask = [&](std::uint64_t mask) {
            UpdateSchedule cs = sched.with_mask(mask);
            double tv = divergence(Divergence::TV, censored_run_exact(sys, cs, xplus), mu);
            max_violation = std::max(max_violation, tv_full - tv);
            if (csv.is_open())
                csv << mask << ',' << cs.active_count() << ',' << format_double(tv) << '\n';
            ++tested;
        };
        if (masks <= 0) {
            if (updates > 20) throw DomainError("censor-check: exhaustive sweep needs <= 20 updates");
            for (std::uint64_t mask = 0; mask < (1ull << updates); ++mask) test_mask(mask);
        } else {
            for (std::int64_t i = 0; i < masks; ++i)
                test_mask(rng.next_u64() & ((1ull << updates) - 1));
        }
        json outcome;
        outcome["tv_full"] = tv_full;
        outcome["masks_tested"] = tested;
        outcome["max_violation"] = max_violation;
        outcome["holds"] = max_violation <= 1e-12;
        json params{{"graph", common.graph_path}, {"model", common.model_path},
                    {"updates", updates}, {"masks", masks}};
        emit_manifest("censor-check", params, common.seed, timer.seconds(), outcome);
        if (max_violation > 1e-12) std::exit(1);
    });

    // saw-dot -------------------------------------------------------------------
    auto* sawdot = app.add_subcommand("saw-dot", "emit a SAW tree as DOT");
    int root = 0;
    int depth_cap = 64;
    add_common(sawdot);
    sawdot->add_option("--root", root, "root vertex");
    sawdot->add_option("--depth-cap", depth_cap, "walk depth cap");
    sawdot->callback([&] {
        SpinSystem sys = load_system(common);
        SAWTreeResult t = build_saw_tree(sys, root, depth_cap);
        std::cout << t.tree.to_dot();
    });

    // acceptance -----------------------------------------------------------------
    auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
    std::string suite;
    std::string inject;
    acc->add_option("--suite", suite, "criterion name or 'all'")->required();
    acc->add_option("--inject-fault", inject,
                    "perturb the named criterion (harness self-test)");
    acc->callback([&] {
        auto results = run_acceptance(suite, inject, std::cout);
        for (const auto& res : results)
            if (!res.pass) std::exit(1);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible model: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
