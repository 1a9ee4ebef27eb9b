// Config parsing and validation, canonical-text hashing, trace round-trips,
// problem assembly, and the command-line front end run end to end.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "damcmc/config.hpp"
#include "damcmc/errors.hpp"
#include "damcmc/trace_io.hpp"
#include "damcmc/version.hpp"

using namespace damcmc;
namespace fs = std::filesystem;

namespace {

bool same_bits(double a, double b) {
    std::uint64_t ua, ub;
    std::memcpy(&ua, &a, sizeof ua);
    std::memcpy(&ub, &b, sizeof ub);
    return ua == ub;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::trunc);
    REQUIRE(os.good());
    os << text;
}

fs::path fresh_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Runs the built CLI binary, captures stdout+stderr into `log`, returns the
// exit code.
int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + DAMCMC_CLI_PATH + "\" " +
                            args + " > \"" + log.string() + "\" 2>&1";
    const int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    REQUIRE(WIFEXITED(st));
    return WEXITSTATUS(st);
}

}  // namespace

TEST_CASE("config text parses into every field") {
    const RunConfig cfg = parse_config_text(
        "# full configuration\n"
        "problem = fv\n"
        "kernel = da\n"
        "scheme = approx2   # inline comment\n"
        "\n"
        "chains = 3\n"
        "length = 5000\n"
        "burnin = 500\n"
        "seed = 42\n"
        "retry_budget = 7\n"
        "checkpoint.every = 250\n"
        "warmstart.iters = 100\n"
        "warmstart.scale = 0.03\n"
        "aem.approx3_input = increment\n"
        "aem.approx5_input = error\n"
        "aem.prior_samples = 64\n"
        "proposal.type = rw\n"
        "proposal.rw_scale = 0.07\n"
        "fv.zones = 4\n"
        "fv.fine_cells = 64\n"
        "fv.fine_steps = 50\n"
        "fv.coarse_cells = 8\n"
        "fv.coarse_steps = 10\n"
        "fv.obs_count = 5\n"
        "fv.noise_frac = 0.02\n"
        "fv.x_true = 0.3, -0.25, 0.5, 0.125\n"
        "fv.prior_sd = 0.6\n");
    CHECK(cfg.problem == "fv");
    CHECK(cfg.kernel == KernelKind::Da);
    CHECK(cfg.scheme == Scheme::Approx2);
    CHECK(cfg.chains == 3);
    CHECK(cfg.length == 5000);
    CHECK(cfg.burnin == 500);
    CHECK(cfg.seed == 42);
    CHECK(cfg.retry_budget == 7);
    CHECK(cfg.checkpoint_every == 250);
    CHECK(cfg.warmstart_iters == 100);
    CHECK(cfg.warmstart_scale == 0.03);
    CHECK(cfg.approx3_input == AemInput::Increment);
    CHECK(cfg.approx5_input == AemInput::Error);
    CHECK(cfg.aem_prior_samples == 64);
    CHECK(cfg.resolved_proposal() == "rw");
    CHECK(cfg.rw_scale == 0.07);
    CHECK(cfg.fv_zones == 4);
    CHECK(cfg.fv_fine_cells == 64);
    CHECK(cfg.fv_fine_steps == 50);
    CHECK(cfg.fv_coarse_cells == 8);
    CHECK(cfg.fv_coarse_steps == 10);
    CHECK(cfg.fv_obs_count == 5);
    CHECK(cfg.fv_noise_frac == 0.02);
    REQUIRE(cfg.fv_x_true.size() == 4);
    CHECK(cfg.fv_x_true[1] == -0.25);
    CHECK(cfg.fv_prior_sd == 0.6);

    // Empty text is the default configuration, which is valid.
    const RunConfig def = parse_config_text("");
    CHECK(def.problem == "analytic");
    CHECK(def.kernel == KernelKind::Ada);
    CHECK(def.scheme == Scheme::Approx5);
    CHECK(def.resolved_proposal() == "am");
    CHECK(def.approx3_input == AemInput::Error);
    CHECK(def.approx5_input == AemInput::Increment);
}

TEST_CASE("parse errors name the offending line") {
    CHECK_THROWS_WITH_AS(parse_config_text("seed = 4\n\nfrobnicate = 1\n"),
                         "config line 3: unknown key 'frobnicate'",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("seed = 1\nseed = 2\n"),
                         "config line 2: key 'seed' already set on line 1",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("length\n"),
                         "config line 1: expected 'key = value'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("seed =\n"),
                         "config line 1: key 'seed': empty value", ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("length = twelve\n"),
        "config line 1: key 'length': 'twelve' is not a nonnegative integer",
        ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("length = -5\n"),
        "config line 1: key 'length': '-5' is not a nonnegative integer",
        ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("proposal.rw_scale = 1..2\n"),
        "config line 1: key 'proposal.rw_scale': '1..2' is not a finite number",
        ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("scheme = approx9\n"),
                         "config line 1: unknown scheme 'approx9'",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("kernel = foo\n"),
                         "config line 1: unknown kernel 'foo' (mh, da, ada)",
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("analytic.x_true = ,\n"),
                         "config line 1: key 'analytic.x_true': empty list",
                         ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("inner_target = maybe\n"),
        "config line 1: key 'inner_target': expected 'approx' or 'exact'",
        ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("aem.approx3_input = both\n"),
        "config line 1: key 'aem.approx3_input': expected 'error' or "
        "'increment'",
        ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("format = damcmc-config-v2\n"),
                         "config line 1: unsupported config format "
                         "'damcmc-config-v2'",
                         ConfigError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/damcmc.conf"), ConfigError);
}

TEST_CASE("cross-field validation rejects inconsistent configurations") {
    auto bad = [](const std::string& text, const char* msg) {
        CHECK_THROWS_WITH_AS(parse_config_text(text), msg, ConfigError);
    };
    bad("kernel = da\nscheme = exact\n",
        "config: scheme exact pairs with kernel mh; reduced schemes with "
        "da/ada");
    bad("kernel = mh\nscheme = approx1\n",
        "config: scheme exact pairs with kernel mh; reduced schemes with "
        "da/ada");
    bad("kernel = da\nscheme = approx3\n",
        "config: scheme approx3 requires kernel ada");
    bad("kernel = da\nscheme = approx1\nproposal.type = am\n",
        "config: kernel da is non-adaptive and requires proposal.type rw");
    bad("inner_target = exact\n",
        "config: inner_target exact only applies to gcam under da/ada");
    bad("length = 100\nburnin = 100\n",
        "config: burnin must be smaller than length");
    bad("chains = 0\n", "config: chains must be in 1..4096");
    bad("proposal.rw_scale = 0\n", "config: proposal.rw_scale must be positive");
    bad("proposal.beta_mix = 1.5\n",
        "config: proposal.beta_mix must lie in [0,1]");
    bad("proposal.gcam_batch = 0\n",
        "config: proposal.gcam_batch must be positive");
    bad("proposal.gcam_target_rate = 1\n",
        "config: proposal.gcam_target_rate must lie in (0,1)");
    bad("kernel = da\nscheme = approx2\naem.prior_samples = 1\n",
        "config: aem.prior_samples must be at least 2 for approx2");
    bad("proposal.gcam_groups = 2\n",
        "config: proposal.gcam_groups is set but proposal.type is not gcam");
    // Groups must cover the problem dimension exactly (analytic is 2-d).
    CHECK_THROWS_AS(parse_config_text(
                        "proposal.type = gcam\nproposal.gcam_groups = 1 2\n"),
                    ConfigError);
    CHECK_NOTHROW(parse_config_text(
        "proposal.type = gcam\nproposal.gcam_groups = 1 1\n"));

    bad("problem = discrete-toy\n", "config: discrete-toy runs under mh or da");
    bad("problem = discrete-toy\nkernel = da\nscheme = approx2\n",
        "config: discrete-toy with kernel da uses scheme approx1 (the "
        "surrogate table)");
    bad("problem = discrete-toy\nkernel = mh\nscheme = exact\n"
        "proposal.type = am\n",
        "config: discrete-toy has a fixed nearest-neighbour proposal "
        "(proposal.type rw/auto)");
    bad("problem = discrete-toy\nkernel = mh\nscheme = exact\ntoy.start = 7\n",
        "config: toy.start must lie in 0..6");

    bad("analytic.x_true = 1\nkernel = mh\nscheme = exact\n",
        "config: analytic.x_true needs 2 entries");
    bad("problem = fv\nfv.fine_cells = 250\n",
        "config: fv.fine_cells must be a positive multiple of fv.zones");
    bad("problem = fv\nfv.coarse_steps = 15\n",
        "config: fv.coarse_steps must be a positive multiple of fv.obs_count");
    bad("problem = fv\nfv.x_true = 0 0 0\n",
        "config: fv.x_true needs one entry per zone");
    bad("problem = fv\nfv.x_true = 3 0 0 0 0 0 0 0\n",
        "config: fv.x_true entries must lie in the log10 bounds [-2,2]");
    bad("problem = fv\nfv.noise_sd = 0\nfv.noise_frac = 0\n",
        "config: fv.noise_frac must be positive when fv.noise_sd is 0");
}

TEST_CASE("canonical text re-parses to the identical configuration") {
    SUBCASE("defaults") {
        const RunConfig def;
        const std::string ct = def.canonical_text();
        const RunConfig back = parse_config_text(ct);
        CHECK(back.canonical_text() == ct);
        CHECK(back.hash() == def.hash());
    }
    SUBCASE("fv with explicit truth") {
        RunConfig cfg;
        cfg.problem = "fv";
        cfg.kernel = KernelKind::Da;
        cfg.scheme = Scheme::Approx2;
        cfg.proposal = "rw";
        cfg.length = 20000;
        cfg.burnin = 2500;
        cfg.seed = 42;
        cfg.checkpoint_every = 500;
        cfg.warmstart_iters = 100;
        cfg.warmstart_scale = 0.03;
        cfg.aem_prior_samples = 64;
        cfg.rw_scale = 0.07;
        cfg.fv_zones = 4;
        cfg.fv_fine_cells = 64;
        cfg.fv_fine_steps = 50;
        cfg.fv_coarse_cells = 8;
        cfg.fv_coarse_steps = 10;
        cfg.fv_obs_count = 5;
        cfg.fv_noise_frac = 0.02;
        cfg.fv_x_true = {0.3, -0.25, 0.5, 0.125};
        cfg.fv_prior_sd = 0.6;
        cfg.validate();
        const std::string ct = cfg.canonical_text();
        const RunConfig back = parse_config_text(ct);
        CHECK(back.canonical_text() == ct);
        CHECK(back.hash() == cfg.hash());
        REQUIRE(back.fv_x_true.size() == 4);
        CHECK(same_bits(back.fv_x_true[3], 0.125));
    }
    SUBCASE("gcam groups") {
        RunConfig cfg;
        cfg.proposal = "gcam";
        cfg.gcam_groups = {1, 1};
        cfg.gcam_batch = 25;
        cfg.gcam_target_rate = 0.3;
        cfg.validate();
        const RunConfig back = parse_config_text(cfg.canonical_text());
        CHECK(back.gcam_groups == cfg.gcam_groups);
        CHECK(back.hash() == cfg.hash());
    }
}

TEST_CASE("the config hash separates configurations but not spellings") {
    const RunConfig def;
    CHECK(def.hash().size() == 16);
    CHECK(def.hash().find_first_not_of("0123456789abcdef") ==
          std::string::npos);

    RunConfig seeded = def;
    seeded.seed = 2;
    CHECK(seeded.hash() != def.hash());

    // "auto" resolves before hashing, so spelling the resolved proposal out
    // cannot change the identity of the run.
    RunConfig spelled = def;
    spelled.proposal = "am";
    CHECK(spelled.hash() == def.hash());

    CHECK(parse_config_text("seed = 1\n").hash() == def.hash());
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("trace files round-trip every double bit for bit") {
    TraceHeader th;
    th.config_hash = "00ff00ff00ff00ff";
    th.chain = 2;
    th.burnin = 7;
    th.dim = 2;
    th.n_sigma = 1;

    std::vector<ChainRecord> recs(3);
    recs[0].iter = 1;
    recs[0].x = Vector(2);
    recs[0].x << 0.1, 1.0 / 3.0;
    recs[0].log_post = -123.4567890123456789;
    recs[0].acc1 = 1;
    recs[0].acc2 = -1;
    recs[0].n_fine = 1;
    recs[0].n_coarse = 0;
    recs[0].sigma = {2.38 / std::sqrt(2.0)};
    recs[1] = recs[0];
    recs[1].iter = 2;
    recs[1].x << 5e-324, -0.0;  // denormal and signed zero
    recs[1].log_post = -1e300;
    recs[1].acc1 = 0;
    recs[1].n_fine = 123456789012345ULL;
    recs[2] = recs[0];
    recs[2].iter = 3;
    recs[2].x << 3.141592653589793, -2.718281828459045;
    recs[2].sigma = {1e-17};

    std::ostringstream os;
    TraceWriter w(os, th);
    for (const auto& r : recs) w.write(r);

    std::istringstream is(os.str());
    const TraceFile tf = read_trace_stream(is);
    CHECK(tf.header.version == std::string(kVersion));
    CHECK(tf.header.config_hash == th.config_hash);
    CHECK(tf.header.chain == 2);
    CHECK(tf.header.burnin == 7);
    CHECK(tf.header.dim == 2);
    CHECK(tf.header.n_sigma == 1);
    REQUIRE(tf.records.size() == recs.size());
    for (size_t i = 0; i < recs.size(); ++i) {
        const ChainRecord& a = recs[i];
        const ChainRecord& b = tf.records[i];
        CHECK(b.iter == a.iter);
        for (int j = 0; j < 2; ++j) REQUIRE(same_bits(b.x[j], a.x[j]));
        REQUIRE(same_bits(b.log_post, a.log_post));
        CHECK(b.acc1 == a.acc1);
        CHECK(b.acc2 == a.acc2);
        CHECK(b.n_fine == a.n_fine);
        CHECK(b.n_coarse == a.n_coarse);
        REQUIRE(same_bits(b.sigma[0], a.sigma[0]));
    }

    SUBCASE("shape mismatches and malformed streams are rejected") {
        ChainRecord badrec = recs[0];
        badrec.x = Vector::Zero(3);
        std::ostringstream sink;
        TraceWriter w2(sink, th);
        CHECK_THROWS_AS(w2.write(badrec), DimensionError);

        std::istringstream garbage("hello\nworld\n");
        CHECK_THROWS_AS(read_trace_stream(garbage), Error);

        std::string clipped = os.str();
        clipped.erase(clipped.rfind(','));  // drop the last row's sigma field
        std::istringstream short_row(clipped);
        CHECK_THROWS_AS(read_trace_stream(short_row), Error);

        CHECK_THROWS_AS(read_trace("/nonexistent/trace.csv"), Error);
    }
}

TEST_CASE("build_problem is deterministic and never touches the chain pair") {
    SUBCASE("analytic") {
        RunConfig cfg;
        const ProblemSetup a = build_problem(cfg);
        const ProblemSetup b = build_problem(cfg);
        CHECK(a.x_true.size() == 2);
        CHECK(a.x_true[0] == 1.0);
        CHECK(a.x_true[1] == 0.8);
        CHECK((a.x0.array() == 0.0).all());
        REQUIRE(a.data.data.size() == 3);
        CHECK((a.data.data.array() == b.data.data.array()).all());
        CHECK(a.data.sigma == cfg.an_noise_sd);
        // Synthetic data is generated on a throwaway pair; the chain's pair
        // must not have been evaluated yet.
        CHECK(a.posterior->pair().counts().n_fine == 0);
        CHECK(a.posterior->pair().counts().n_coarse == 0);
        CHECK(a.posterior->dim() == 2);
    }
    SUBCASE("fv with the built-in truth profile") {
        RunConfig cfg;
        cfg.problem = "fv";
        cfg.fv_fine_cells = 16;
        cfg.fv_fine_steps = 10;
        cfg.fv_coarse_cells = 8;
        cfg.fv_coarse_steps = 10;
        cfg.fv_obs_count = 10;
        cfg.validate();
        const ProblemSetup a = build_problem(cfg);
        const ProblemSetup b = build_problem(cfg);
        REQUIRE(a.x_true.size() == 8);
        for (int j = 0; j < 8; ++j)
            CHECK(a.x_true[j] ==
                  doctest::Approx(0.5 * std::sin(2.0 * 3.14159265358979312 *
                                                 (j + 0.5) / 8.0))
                      .epsilon(1e-12));
        CHECK(a.data.sigma > 0.0);
        CHECK((a.data.data.array() == b.data.data.array()).all());
        CHECK(a.posterior->pair().counts().n_fine == 0);
        CHECK(a.x0.size() == 8);
    }
    SUBCASE("the discrete toy has no continuous setup") {
        RunConfig cfg;
        cfg.problem = "discrete-toy";
        cfg.kernel = KernelKind::Mh;
        cfg.scheme = Scheme::Exact;
        CHECK_THROWS_AS(build_problem(cfg), ConfigError);
    }
}

TEST_CASE("make_sampler wires proposal, error model and rng stream") {
    RunConfig cfg;  // ada + approx5, proposal auto -> am
    const ProblemSetup setup = build_problem(cfg);

    Sampler s0 = make_sampler(cfg, setup, 0);
    CHECK(s0.proposal().kind() == ProposalKind::Am);
    REQUIRE(s0.aem() != nullptr);
    CHECK(s0.aem()->mode() == MeanMode::PinnedZero);
    CHECK(s0.aem()->count() == 0);
    CHECK(s0.rng() == Rng(cfg.seed, 2));
    Sampler s3 = make_sampler(cfg, setup, 3);
    CHECK(s3.rng() == Rng(cfg.seed, 5));

    SUBCASE("approx3 uses a free-mean model") {
        cfg.scheme = Scheme::Approx3;
        Sampler s = make_sampler(cfg, setup, 0);
        REQUIRE(s.aem() != nullptr);
        CHECK(s.aem()->mode() == MeanMode::Free);
        CHECK(s.aem()->count() == 0);
    }
    SUBCASE("approx2 arrives with the prior-sample model prebuilt") {
        cfg.kernel = KernelKind::Da;
        cfg.scheme = Scheme::Approx2;
        cfg.aem_prior_samples = 37;
        cfg.validate();
        Sampler a = make_sampler(cfg, setup, 0);
        Sampler b = make_sampler(cfg, setup, 0);
        REQUIRE(a.aem() != nullptr);
        CHECK(a.aem()->count() == 37);  // analytic draws never fail
        CHECK(a.aem()->state_equals(*b.aem()));
        // The prior build ran on its own pair.
        CHECK(setup.posterior->pair().counts().n_fine == 0);
    }
    SUBCASE("approx1 needs no error model") {
        cfg.kernel = KernelKind::Da;
        cfg.scheme = Scheme::Approx1;
        cfg.validate();
        Sampler s = make_sampler(cfg, setup, 0);
        CHECK(s.aem() == nullptr);
        CHECK(s.proposal().kind() == ProposalKind::Rw);
    }
    SUBCASE("gcam partition from config") {
        cfg.proposal = "gcam";
        cfg.gcam_groups = {1, 1};
        cfg.gcam_batch = 10;
        cfg.validate();
        Sampler s = make_sampler(cfg, setup, 0);
        CHECK(s.proposal().kind() == ProposalKind::Gcam);
        CHECK(s.proposal().partition().size() == 2);
        CHECK(s.proposal().batch() == 10);
    }
}

TEST_CASE("cli rejects usage and configuration errors") {
    const fs::path work = fresh_dir("damcmc_cli_errors");
    const fs::path log = work / "log.txt";
    CHECK(run_cli("", log) == 2);                       // missing subcommand
    CHECK(run_cli("run", log) == 2);                    // missing --config
    CHECK(run_cli("run --config " + (work / "none.conf").string(), log) == 2);
    write_file(work / "bad.conf", "frobnicate = 1\n");
    CHECK(run_cli("run --config " + (work / "bad.conf").string(), log) == 2);
    CHECK(read_file(log).find("config error") != std::string::npos);
    CHECK(run_cli("diagnose --trace " + (work / "none.csv").string(), log) ==
          3);
}

TEST_CASE("cli run is reproducible, resumable and diagnosable") {
    const fs::path work = fresh_dir("damcmc_cli_run");
    const fs::path log = work / "log.txt";
    const fs::path conf = work / "run.conf";
    write_file(conf,
               "length = 400\n"
               "burnin = 100\n"
               "seed = 5\n"
               "checkpoint.every = 150\n");
    const std::string base = "run --config " + conf.string() + " --out ";
    const fs::path out_a = work / "a";
    const fs::path out_b = work / "b";

    REQUIRE(run_cli(base + out_a.string(), log) == 0);
    const fs::path trace_a = out_a.string() + ".chain0.csv";
    REQUIRE(fs::exists(trace_a));
    CHECK(fs::exists(fs::path(out_a.string() + ".chain0.report.txt")));
    CHECK(fs::exists(fs::path(out_a.string() + ".chain0.ckpt")));
    CHECK(fs::exists(fs::path(out_a.string() + ".chain0.aem.txt")));
    const std::string bytes_a = read_file(trace_a);
    CHECK(bytes_a.rfind("# damcmc-trace v1\n", 0) == 0);

    // Same config, same seed: byte-identical trace.
    REQUIRE(run_cli(base + out_b.string(), log) == 0);
    CHECK(read_file(fs::path(out_b.string() + ".chain0.csv")) == bytes_a);

    // A completed run resumes to a no-op and leaves the trace alone.
    REQUIRE(run_cli(base + out_a.string() + " --resume", log) == 0);
    CHECK(read_file(log).find("already complete") != std::string::npos);
    CHECK(read_file(trace_a) == bytes_a);

    // Resuming an output prefix that never ran has no checkpoint.
    CHECK(run_cli(base + (work / "fresh").string() + " --resume", log) == 2);

    // A seed override changes the run identity (hash and draws).
    REQUIRE(run_cli(base + (work / "c").string() + " --seed 6", log) == 0);
    CHECK(read_file(work / "c.chain0.csv") != bytes_a);

    CHECK(run_cli("diagnose --trace " + trace_a.string(), log) == 0);
    CHECK(read_file(log).find("stage1 acceptance rate") != std::string::npos);
    CHECK(run_cli("diagnose --trace " + trace_a.string() +
                      " --burnin 0 --tau-ref 10 --cost-ratio 0.05",
                  log) == 0);
    CHECK(read_file(log).find("speedup vs reference") != std::string::npos);
}

TEST_CASE("cli verify, toy runs and the benchmark table") {
    const fs::path work = fresh_dir("damcmc_cli_misc");
    const fs::path log = work / "log.txt";

    REQUIRE(run_cli("verify --quiet", log) == 0);
    CHECK(read_file(log).find("all verification checks passed") !=
          std::string::npos);

    const fs::path toy_conf = work / "toy.conf";
    write_file(toy_conf,
               "problem = discrete-toy\n"
               "kernel = da\n"
               "scheme = approx1\n"
               "length = 2000\n"
               "burnin = 100\n");
    const std::string toy_base =
        "run --config " + toy_conf.string() + " --out " +
        (work / "toy").string();
    REQUIRE(run_cli(toy_base, log) == 0);
    CHECK(fs::exists(work / "toy.chain0.csv"));
    CHECK(run_cli(toy_base + " --resume", log) == 2);  // nothing to resume

    const fs::path bench_conf = work / "bench.conf";
    write_file(bench_conf,
               "length = 500\n"
               "burnin = 100\n"
               "aem.prior_samples = 50\n");
    REQUIRE(run_cli("benchmark --config " + bench_conf.string() + " --out " +
                        (work / "bench").string(),
                    log) == 0);
    const std::string csv = read_file(work / "bench.benchmark.csv");
    size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 7);  // header plus six scheme rows
    CHECK(csv.rfind("scheme,seed,rate1", 0) == 0);
}
