// damcmc command-line front end: run / benchmark / verify / diagnose.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 run or model
// failure, 4 verification failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "damcmc/config.hpp"
#include "damcmc/diagnostics.hpp"
#include "damcmc/errors.hpp"
#include "damcmc/kernel.hpp"
#include "damcmc/models.hpp"
#include "damcmc/oracle.hpp"
#include "damcmc/trace_io.hpp"
#include "damcmc/version.hpp"

namespace {

using namespace damcmc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitVerify = 4;

std::string chain_path(const std::string& out, int chain, const char* suffix) {
    return out + ".chain" + std::to_string(chain) + suffix;
}

// Fresh-start initialization shared by run and benchmark: optional coarse
// warm start from the prior center, then the fine init evaluation.
void start_sampler(Sampler& sampler, const RunConfig& cfg,
                   const ProblemSetup& setup) {
    Vector x0 = setup.x0;
    if (cfg.warmstart_iters > 0) {
        const double scale =
            cfg.warmstart_scale > 0.0 ? cfg.warmstart_scale : cfg.rw_scale;
        x0 = coarse_warmstart(*setup.posterior, x0, cfg.warmstart_iters, scale,
                              sampler.rng());
    }
    sampler.init(x0);
}

void write_report_file(const std::string& path, const RunSummary& sum,
                       const std::string& hash, int chain) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw Error("cannot open report file " + path);
    write_run_report(os, sum, hash, chain);
}

// ------------------------------------------------------------------- run

struct RunFlags {
    std::string config_path;
    std::string out = "damcmc_out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int chains = 0;
    bool resume = false;
};

RunConfig load_with_overrides(const RunFlags& fl) {
    RunConfig cfg = load_config_file(fl.config_path);
    if (fl.seed_set) cfg.seed = fl.seed;
    if (fl.chains > 0) cfg.chains = fl.chains;
    cfg.validate();
    return cfg;
}

int run_toy(const RunConfig& cfg, const RunFlags& fl) {
    if (fl.resume)
        throw ConfigError("the discrete toy is too cheap to checkpoint; rerun it");
    const std::string hash = cfg.hash();
    for (int k = 0; k < cfg.chains; ++k) {
        DiscreteRunOptions dopt;
        dopt.kernel = cfg.kernel;
        dopt.length = cfg.length;
        dopt.burnin = cfg.burnin;
        dopt.start_state = cfg.toy_start;

        const std::string trace = chain_path(fl.out, k, ".csv");
        std::ofstream os(trace, std::ios::trunc);
        if (!os) throw Error("cannot open trace file " + trace);
        TraceHeader th;
        th.config_hash = hash;
        th.chain = k;
        th.burnin = cfg.burnin;
        th.dim = 1;
        th.n_sigma = 1;
        TraceWriter writer(os, th);

        std::vector<std::uint64_t> visits;
        const RunSummary sum = run_discrete_toy(
            dopt, Rng(cfg.seed, 2 + static_cast<std::uint64_t>(k)),
            [&](const ChainRecord& r) { writer.write(r); }, &visits);

        write_report_file(chain_path(fl.out, k, ".report.txt"), sum, hash, k);
        const std::uint64_t post = cfg.length - cfg.burnin;
        std::cout << "chain " << k << ": " << cfg.length
                  << " iterations, stage1 rate "
                  << static_cast<double>(sum.acc1) / cfg.length
                  << ", visit frequencies";
        for (std::uint64_t v : visits)
            std::cout << ' ' << static_cast<double>(v) / post;
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_run(const RunFlags& fl) {
    const RunConfig cfg = load_with_overrides(fl);
    if (cfg.problem == "discrete-toy") return run_toy(cfg, fl);

    const std::string hash = cfg.hash();
    for (int k = 0; k < cfg.chains; ++k) {
        const ProblemSetup setup = build_problem(cfg);
        Sampler sampler = make_sampler(cfg, setup, k);
        const std::string trace = chain_path(fl.out, k, ".csv");
        const std::string ckpt = chain_path(fl.out, k, ".ckpt");

        RunSummary base;
        std::vector<ChainRecord> head;  // rows kept from an interrupted run
        if (fl.resume) {
            if (!std::filesystem::exists(ckpt))
                throw ConfigError("no checkpoint to resume from: " + ckpt);
            const CheckpointInfo info = read_checkpoint(ckpt, sampler);
            if (info.config_hash != hash)
                throw ConfigError(
                    "checkpoint " + ckpt + " belongs to config " +
                    info.config_hash + ", not " + hash +
                    "; refusing to resume a different configuration");
            base = info.partial;
            if (std::filesystem::exists(trace)) {
                TraceFile tf = read_trace(trace);
                for (ChainRecord& r : tf.records)
                    if (r.iter <= sampler.iteration())
                        head.push_back(std::move(r));
            }
            if (sampler.iteration() >= cfg.length) {
                std::cout << "chain " << k << ": already complete at iteration "
                          << sampler.iteration() << ", nothing to resume\n";
                continue;
            }
            std::cout << "chain " << k << ": resuming at iteration "
                      << sampler.iteration() << '\n';
        } else {
            start_sampler(sampler, cfg, setup);
        }

        std::ofstream os(trace, std::ios::trunc);
        if (!os) throw Error("cannot open trace file " + trace);
        TraceHeader th;
        th.config_hash = hash;
        th.chain = k;
        th.burnin = cfg.burnin;
        th.dim = setup.posterior->dim();
        th.n_sigma = static_cast<int>(sampler.proposal().sigma().size());
        TraceWriter writer(os, th);
        for (const ChainRecord& r : head) writer.write(r);

        RunOptions ro;
        ro.length = cfg.length;
        ro.burnin = cfg.burnin;
        ro.checkpoint_every = cfg.checkpoint_every;
        ro.checkpoint_path = cfg.checkpoint_every > 0 ? ckpt : std::string();
        ro.config_hash = hash;
        const RunSummary sum = run_chain(
            sampler, ro, [&](const ChainRecord& r) { writer.write(r); }, base);
        os.flush();
        if (cfg.checkpoint_every > 0)
            write_checkpoint(ckpt, sampler, sum, hash);

        write_report_file(chain_path(fl.out, k, ".report.txt"), sum, hash, k);
        if (sampler.aem()) {
            std::ofstream as(chain_path(fl.out, k, ".aem.txt"), std::ios::trunc);
            sampler.aem()->save(as);
        }
        std::cout << "chain " << k << ": " << cfg.length
                  << " iterations, stage1 rate "
                  << static_cast<double>(sum.acc1) / cfg.length;
        if (sum.has_stage2 && sum.promoted)
            std::cout << ", stage2 rate "
                      << static_cast<double>(sum.acc2) / sum.promoted;
        std::cout << ", fine evals " << sum.evals.n_fine << " -> " << trace
                  << '\n';
    }
    return kExitOk;
}

// --------------------------------------------------------------- benchmark

struct BenchCell {
    std::string label;
    KernelKind kernel;
    Scheme scheme;
};

int cmd_benchmark(const std::string& config_path, const std::string& out,
                  std::vector<std::uint64_t> seeds) {
    RunConfig base_cfg = load_config_file(config_path);
    if (base_cfg.problem == "discrete-toy")
        throw ConfigError("benchmark needs a continuous problem (analytic or fv)");
    if (seeds.empty()) seeds = {base_cfg.seed};

    const std::vector<BenchCell> cells = {
        {"mh", KernelKind::Mh, Scheme::Exact},
        {"approx1", KernelKind::Da, Scheme::Approx1},
        {"approx2", KernelKind::Da, Scheme::Approx2},
        {"approx3", KernelKind::Ada, Scheme::Approx3},
        {"approx4", KernelKind::Da, Scheme::Approx4},
        {"approx5", KernelKind::Ada, Scheme::Approx5},
    };

    std::ofstream csv(out + ".benchmark.csv", std::ios::trunc);
    if (!csv) throw Error("cannot open " + out + ".benchmark.csv");
    csv << "scheme,seed,rate1,beta_bar,tau_max,ess_min,fine_evals,"
           "coarse_evals,cost_ratio,speedup\n";

    std::printf("%-9s %6s %8s %9s %9s %10s %10s %9s\n", "scheme", "seed",
                "rate1", "beta_bar", "tau_max", "fine", "coarse", "speedup");

    for (const std::uint64_t seed : seeds) {
        double tau_ref = 0.0;
        for (const BenchCell& cell : cells) {
            RunConfig cfg = base_cfg;
            cfg.seed = seed;
            cfg.kernel = cell.kernel;
            cfg.scheme = cell.scheme;
            // The reference chain keeps the adaptive proposal; the two-stage
            // cells run the fixed random walk so every scheme sees the same
            // proposal path.
            cfg.proposal = cell.kernel == KernelKind::Mh ? "am" : "rw";
            cfg.validate();

            const ProblemSetup setup = build_problem(cfg);
            Sampler sampler = make_sampler(cfg, setup, 0);
            start_sampler(sampler, cfg, setup);
            std::vector<ChainRecord> recs;
            recs.reserve(cfg.length);
            RunOptions ro;
            ro.length = cfg.length;
            ro.burnin = cfg.burnin;
            const RunSummary sum = run_chain(
                sampler, ro, [&](const ChainRecord& r) { recs.push_back(r); });

            const AcceptanceSummary acc = acceptance_summary(recs, cfg.burnin);
            double tau_max = 0.0, ess_min = 0.0;
            bool tau_ok = true;
            for (int j = 0; j < setup.posterior->dim(); ++j) {
                try {
                    const ComponentStats st =
                        component_stats(component_series(recs, j, cfg.burnin));
                    if (st.tau > tau_max) {
                        tau_max = st.tau;
                        ess_min = st.ess;
                    }
                } catch (const DiagnosticsError&) {
                    // A frozen component has no autocorrelation time; the
                    // row still reports rates and costs.
                    tau_ok = false;
                }
            }
            if (!tau_ok) tau_max = ess_min = 0.0;
            if (cell.kernel == KernelKind::Mh) tau_ref = tau_ok ? tau_max : 0.0;

            const double cost_ratio =
                sum.evals.mean_fine_seconds() > 0.0
                    ? sum.evals.mean_coarse_seconds() /
                          sum.evals.mean_fine_seconds()
                    : 0.0;
            double speedup = 0.0;
            if (cell.kernel != KernelKind::Mh && tau_ref > 0.0 && tau_max > 0.0)
                speedup =
                    speedup_factor(tau_ref, tau_max, acc.rate1, cost_ratio);

            csv << cell.label << ',' << seed << ',' << acc.rate1 << ','
                << acc.beta_bar << ',' << tau_max << ',' << ess_min << ','
                << sum.evals.n_fine << ',' << sum.evals.n_coarse << ','
                << cost_ratio << ',' << speedup << '\n';
            std::printf("%-9s %6llu %8.4f %9.4f %9.2f %10llu %10llu %9.3f\n",
                        cell.label.c_str(),
                        static_cast<unsigned long long>(seed), acc.rate1,
                        acc.beta_bar, tau_max,
                        static_cast<unsigned long long>(sum.evals.n_fine),
                        static_cast<unsigned long long>(sum.evals.n_coarse),
                        speedup);
        }
    }
    std::cout << "wrote " << out << ".benchmark.csv\n";
    return kExitOk;
}

// ------------------------------------------------------------------ verify

int cmd_verify(std::uint64_t seed, bool quiet) {
    int failures = 0;
    auto check = [&](const char* name, bool ok, double value) {
        if (!ok) ++failures;
        if (!quiet || !ok)
            std::printf("%-52s %s   (%.3e)\n", name, ok ? "pass" : "FAIL",
                        value);
    };

    const auto& toy_t = DiscreteToy::target();
    const auto& toy_s = DiscreteToy::surrogate();
    DiscreteDaSpec spec;
    spec.target.assign(toy_t.begin(), toy_t.end());
    spec.surrogate.assign(toy_s.begin(), toy_s.end());

    const Matrix kda = enumerate_da_kernel(spec);
    const double st = stationarity_residual(kda, spec.target);
    const double db = detailed_balance_residual(kda, spec.target);
    check("two-stage kernel leaves the target invariant", st < 1e-12, st);
    check("two-stage kernel satisfies detailed balance", db < 1e-12, db);

    const Matrix k1 = enumerate_stage1_only_kernel(spec);
    const double neg = stationarity_residual(k1, spec.target);
    check("surrogate-only chain breaks stationarity (control)", neg > 1e-3,
          neg);

    // Random surrogate stress: multiply the target by log-uniform factors in
    // [0.1, 10]; the corrected kernel must stay exact for every table.
    Rng rng(seed, 99);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        DiscreteDaSpec s2;
        s2.target = spec.target;
        s2.surrogate.resize(s2.target.size());
        for (size_t i = 0; i < s2.target.size(); ++i) {
            const double f = std::pow(10.0, -1.0 + 2.0 * rng.uniform());
            s2.surrogate[i] = s2.target[i] * f;
        }
        const Matrix k = enumerate_da_kernel(s2);
        worst = std::max(worst, stationarity_residual(k, s2.target));
        worst = std::max(worst, detailed_balance_residual(k, s2.target));
    }
    check("100 random surrogate tables stay exact", worst < 1e-12, worst);

    // Empirical frequencies of a long simulated toy chain against the
    // normalized target.
    DiscreteRunOptions dopt;
    dopt.kernel = KernelKind::Da;
    dopt.length = 1000000;
    dopt.burnin = 10000;
    std::vector<std::uint64_t> visits;
    run_discrete_toy(dopt, Rng(seed, 2), nullptr, &visits);
    double total_mass = 0.0, n_post = 0.0;
    for (double v : spec.target) total_mass += v;
    for (std::uint64_t v : visits) n_post += static_cast<double>(v);
    double worst_freq = 0.0;
    for (size_t i = 0; i < visits.size(); ++i)
        worst_freq = std::max(
            worst_freq, std::abs(static_cast<double>(visits[i]) / n_post -
                                 spec.target[i] / total_mass));
    check("simulated toy chain matches the target frequencies",
          worst_freq < 0.01, worst_freq);

    if (failures) {
        std::printf("%d verification check(s) FAILED\n", failures);
        return kExitVerify;
    }
    std::printf("all verification checks passed\n");
    return kExitOk;
}

// ---------------------------------------------------------------- diagnose

int cmd_diagnose(const std::string& trace_path, std::int64_t burnin_override,
                 double tau_ref, double cost_ratio) {
    const TraceFile tf = read_trace(trace_path);
    if (tf.records.empty()) throw Error("trace has no rows");
    const std::uint64_t burnin = burnin_override >= 0
                                     ? static_cast<std::uint64_t>(burnin_override)
                                     : tf.header.burnin;

    const AcceptanceSummary acc = acceptance_summary(tf.records, burnin);
    std::printf("trace: %s\n", trace_path.c_str());
    std::printf("rows: %zu  (post burn-in %llu)\n", tf.records.size(),
                static_cast<unsigned long long>(acc.n));
    std::printf("stage1 acceptance rate: %.4f\n", acc.rate1);
    if (acc.promoted)
        std::printf("stage2 acceptance rate given promotion: %.4f\n",
                    acc.beta_bar);

    double tau_max = 0.0;
    std::printf("%-6s %12s %12s %10s %12s %8s\n", "comp", "mean", "sd", "tau",
                "ess", "window");
    for (int j = 0; j < tf.header.dim; ++j) {
        try {
            const ComponentStats st =
                component_stats(component_series(tf.records, j, burnin));
            tau_max = std::max(tau_max, st.tau);
            std::printf("x_%-4d %12.6g %12.6g %10.3f %12.1f %8s\n", j + 1,
                        st.mean, st.sd, st.tau, st.ess,
                        st.window_closed ? "closed" : "OPEN");
        } catch (const DiagnosticsError& e) {
            std::printf("x_%-4d %s\n", j + 1, e.what());
        }
    }
    if (tau_ref > 0.0 && cost_ratio >= 0.0) {
        const double sp = speedup_factor(tau_ref, tau_max, acc.rate1, cost_ratio);
        std::printf("speedup vs reference (tau_ref %.3f, cost ratio %.4f): %.3f\n",
                    tau_ref, cost_ratio, sp);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayed-acceptance MCMC toolkit"};
    app.set_version_flag("--version", std::string(damcmc::kVersion));
    app.require_subcommand(1);

    RunFlags rf;
    CLI::App* run = app.add_subcommand("run", "run chains from a config file");
    run->add_option("--config", rf.config_path, "config file")->required();
    run->add_option("--out", rf.out, "output path prefix");
    run->add_option("--seed", rf.seed, "override the config seed")
        ->each([&](const std::string&) { rf.seed_set = true; });
    run->add_option("--chains", rf.chains, "override the config chain count");
    run->add_flag("--resume", rf.resume, "resume from the chain checkpoints");

    std::string bench_config, bench_out = "damcmc_out";
    std::vector<std::uint64_t> bench_seeds;
    CLI::App* bench = app.add_subcommand(
        "benchmark", "reference MH plus every reduced scheme, one run each");
    bench->add_option("--config", bench_config, "config file")->required();
    bench->add_option("--out", bench_out, "output path prefix");
    bench->add_option("--seeds", bench_seeds, "seeds to repeat over");

    std::uint64_t verify_seed = 1;
    bool verify_quiet = false;
    CLI::App* verify = app.add_subcommand(
        "verify", "brute-force kernel checks on the discrete toy");
    verify->add_option("--seed", verify_seed, "seed for the randomized tables");
    verify->add_flag("--quiet", verify_quiet, "print failures only");

    std::string diag_trace;
    std::int64_t diag_burnin = -1;
    double diag_tau_ref = 0.0, diag_cost_ratio = -1.0;
    CLI::App* diag =
        app.add_subcommand("diagnose", "acceptance and mixing diagnostics");
    diag->add_option("--trace", diag_trace, "chain trace csv")->required();
    diag->add_option("--burnin", diag_burnin,
                     "override the burn-in recorded in the trace");
    diag->add_option("--tau-ref", diag_tau_ref,
                     "reference autocorrelation time for the speedup");
    diag->add_option("--cost-ratio", diag_cost_ratio,
                     "coarse/fine cost ratio for the speedup");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(rf);
        if (bench->parsed()) return cmd_benchmark(bench_config, bench_out, bench_seeds);
        if (verify->parsed()) return cmd_verify(verify_seed, verify_quiet);
        if (diag->parsed())
            return cmd_diagnose(diag_trace, diag_burnin, diag_tau_ref,
                                diag_cost_ratio);
    } catch (const damcmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const damcmc::RunAbort& e) {
        std::cerr << "run aborted: " << e.what() << '\n';
        return kExitRun;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRun;
    }
    return kExitConfig;
}
