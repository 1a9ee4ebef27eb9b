#include "damcmc/config.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "damcmc/errors.hpp"

namespace damcmc {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        if (!std::isfinite(x)) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        bad(line, "key '" + key + "': '" + v + "' is not a finite number");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    try {
        size_t used = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("");
        const std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        bad(line, "key '" + key + "': '" + v + "' is not a nonnegative integer");
    }
}

int parse_int(const std::string& v, const std::string& key, int line) {
    try {
        size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        if (x < INT_MIN || x > INT_MAX) throw std::out_of_range("");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        bad(line, "key '" + key + "': '" + v + "' is not an integer");
    }
}

std::vector<double> parse_double_list(const std::string& v,
                                      const std::string& key, int line) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_double(tok, key, line));
    if (out.empty()) bad(line, "key '" + key + "': empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key,
                                int line) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<int> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_int(tok, key, line));
    if (out.empty()) bad(line, "key '" + key + "': empty list");
    return out;
}

AemInput aem_input_from_name(const std::string& v, const std::string& key,
                             int line) {
    if (v == "error") return AemInput::Error;
    if (v == "increment") return AemInput::Increment;
    bad(line, "key '" + key + "': expected 'error' or 'increment'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        if constexpr (std::is_same_v<T, double>)
            out += fmt_double(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

std::string RunConfig::resolved_proposal() const {
    if (proposal != "auto") return proposal;
    return kernel == KernelKind::Ada ? "am" : "rw";
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> seen;  // key -> first line
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash_pos = raw.find('#');
        if (hash_pos != std::string::npos) raw.erase(hash_pos);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) bad(line, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key.empty()) bad(line, "empty key");
        if (val.empty()) bad(line, "key '" + key + "': empty value");
        if (const auto it = seen.find(key); it != seen.end())
            bad(line, "key '" + key + "' already set on line " +
                          std::to_string(it->second));
        seen[key] = line;

        if (key == "format") {
            // Stamped into canonical_text(); accepted so a canonical dump
            // parses back as-is.
            if (val != "damcmc-config-v1")
                bad(line, "unsupported config format '" + val + "'");
        }
        else if (key == "problem") cfg.problem = val;
        else if (key == "kernel") {
            try { cfg.kernel = kernel_from_name(val); }
            catch (const ConfigError& e) { bad(line, e.what()); }
        }
        else if (key == "scheme") {
            try { cfg.scheme = scheme_from_name(val); }
            catch (const ConfigError& e) { bad(line, e.what()); }
        }
        else if (key == "chains") cfg.chains = parse_int(val, key, line);
        else if (key == "length") cfg.length = parse_u64(val, key, line);
        else if (key == "burnin") cfg.burnin = parse_u64(val, key, line);
        else if (key == "seed") cfg.seed = parse_u64(val, key, line);
        else if (key == "retry_budget") cfg.retry_budget = parse_int(val, key, line);
        else if (key == "checkpoint.every")
            cfg.checkpoint_every = parse_u64(val, key, line);
        else if (key == "warmstart.iters")
            cfg.warmstart_iters = parse_u64(val, key, line);
        else if (key == "warmstart.scale")
            cfg.warmstart_scale = parse_double(val, key, line);
        else if (key == "inner_target") {
            if (val == "approx") cfg.inner_target = InnerTarget::Approx;
            else if (val == "exact") cfg.inner_target = InnerTarget::Exact;
            else bad(line, "key 'inner_target': expected 'approx' or 'exact'");
        }
        else if (key == "aem.approx3_input")
            cfg.approx3_input = aem_input_from_name(val, key, line);
        else if (key == "aem.approx5_input")
            cfg.approx5_input = aem_input_from_name(val, key, line);
        else if (key == "aem.prior_samples")
            cfg.aem_prior_samples = parse_int(val, key, line);
        else if (key == "proposal.type") cfg.proposal = val;
        else if (key == "proposal.rw_scale")
            cfg.rw_scale = parse_double(val, key, line);
        else if (key == "proposal.beta_mix")
            cfg.beta_mix = parse_double(val, key, line);
        else if (key == "proposal.gcam_groups") {
            if (val == "none") cfg.gcam_groups.clear();
            else cfg.gcam_groups = parse_int_list(val, key, line);
        }
        else if (key == "proposal.gcam_batch")
            cfg.gcam_batch = parse_int(val, key, line);
        else if (key == "proposal.gcam_target_rate")
            cfg.gcam_target_rate = parse_double(val, key, line);
        else if (key == "analytic.epsilon")
            cfg.an_epsilon = parse_double(val, key, line);
        else if (key == "analytic.x_true")
            cfg.an_x_true = parse_double_list(val, key, line);
        else if (key == "analytic.noise_sd")
            cfg.an_noise_sd = parse_double(val, key, line);
        else if (key == "analytic.prior") cfg.an_prior = val;
        else if (key == "analytic.prior_sd")
            cfg.an_prior_sd = parse_double(val, key, line);
        else if (key == "analytic.box") cfg.an_box = parse_double(val, key, line);
        else if (key == "fv.zones") cfg.fv_zones = parse_int(val, key, line);
        else if (key == "fv.fine_cells")
            cfg.fv_fine_cells = parse_int(val, key, line);
        else if (key == "fv.fine_steps")
            cfg.fv_fine_steps = parse_int(val, key, line);
        else if (key == "fv.coarse_cells")
            cfg.fv_coarse_cells = parse_int(val, key, line);
        else if (key == "fv.coarse_steps")
            cfg.fv_coarse_steps = parse_int(val, key, line);
        else if (key == "fv.obs_count")
            cfg.fv_obs_count = parse_int(val, key, line);
        else if (key == "fv.noise_sd")
            cfg.fv_noise_sd = parse_double(val, key, line);
        else if (key == "fv.noise_frac")
            cfg.fv_noise_frac = parse_double(val, key, line);
        else if (key == "fv.x_true") {
            if (val == "default") cfg.fv_x_true.clear();
            else cfg.fv_x_true = parse_double_list(val, key, line);
        }
        else if (key == "fv.prior_sd")
            cfg.fv_prior_sd = parse_double(val, key, line);
        else if (key == "toy.start") cfg.toy_start = parse_int(val, key, line);
        else bad(line, "unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };

    if (problem != "analytic" && problem != "fv" && problem != "discrete-toy")
        fail("problem must be analytic, fv or discrete-toy");
    if (chains < 1 || chains > 4096) fail("chains must be in 1..4096");
    if (length < 1) fail("length must be positive");
    if (burnin >= length) fail("burnin must be smaller than length");
    if (retry_budget < 0) fail("retry_budget must be nonnegative");

    const std::string prop = resolved_proposal();
    if (prop != "rw" && prop != "am" && prop != "gcam")
        fail("proposal.type must be rw, am, gcam or auto");

    const bool two_stage = kernel != KernelKind::Mh;
    if ((scheme == Scheme::Exact) == two_stage)
        fail("scheme exact pairs with kernel mh; reduced schemes with da/ada");
    if (scheme_adaptive(scheme) && kernel != KernelKind::Ada)
        fail("scheme " + scheme_name(scheme) + " requires kernel ada");
    if (kernel == KernelKind::Da && prop != "rw")
        fail("kernel da is non-adaptive and requires proposal.type rw");
    if (inner_target == InnerTarget::Exact &&
        (prop != "gcam" || kernel == KernelKind::Mh))
        fail("inner_target exact only applies to gcam under da/ada");

    if (!(rw_scale > 0.0)) fail("proposal.rw_scale must be positive");
    if (!(beta_mix >= 0.0 && beta_mix <= 1.0))
        fail("proposal.beta_mix must lie in [0,1]");
    if (gcam_batch < 1) fail("proposal.gcam_batch must be positive");
    if (!(gcam_target_rate > 0.0 && gcam_target_rate < 1.0))
        fail("proposal.gcam_target_rate must lie in (0,1)");
    if (!(warmstart_scale >= 0.0)) fail("warmstart.scale must be nonnegative");
    if (scheme == Scheme::Approx2 && aem_prior_samples < 2)
        fail("aem.prior_samples must be at least 2 for approx2");

    int dim = 0;
    if (problem == "analytic") {
        dim = 2;
        if (an_x_true.size() != 2) fail("analytic.x_true needs 2 entries");
        if (!(an_noise_sd > 0.0)) fail("analytic.noise_sd must be positive");
        if (an_prior != "gaussian" && an_prior != "box")
            fail("analytic.prior must be gaussian or box");
        if (!(an_prior_sd > 0.0)) fail("analytic.prior_sd must be positive");
        if (!(an_box > 0.0)) fail("analytic.box must be positive");
    } else if (problem == "fv") {
        dim = fv_zones;
        if (fv_zones < 1) fail("fv.zones must be positive");
        if (fv_fine_cells < fv_zones || fv_fine_cells % fv_zones != 0)
            fail("fv.fine_cells must be a positive multiple of fv.zones");
        if (fv_coarse_cells < fv_zones || fv_coarse_cells % fv_zones != 0)
            fail("fv.coarse_cells must be a positive multiple of fv.zones");
        if (fv_obs_count < 1) fail("fv.obs_count must be positive");
        if (fv_fine_steps < fv_obs_count || fv_fine_steps % fv_obs_count != 0)
            fail("fv.fine_steps must be a positive multiple of fv.obs_count");
        if (fv_coarse_steps < fv_obs_count || fv_coarse_steps % fv_obs_count != 0)
            fail("fv.coarse_steps must be a positive multiple of fv.obs_count");
        if (!(fv_noise_sd >= 0.0)) fail("fv.noise_sd must be nonnegative");
        if (fv_noise_sd == 0.0 && !(fv_noise_frac > 0.0))
            fail("fv.noise_frac must be positive when fv.noise_sd is 0");
        if (!fv_x_true.empty() &&
            static_cast<int>(fv_x_true.size()) != fv_zones)
            fail("fv.x_true needs one entry per zone");
        for (double v : fv_x_true)
            if (v < -2.0 || v > 2.0)
                fail("fv.x_true entries must lie in the log10 bounds [-2,2]");
        if (!(fv_prior_sd > 0.0)) fail("fv.prior_sd must be positive");
    } else {  // discrete-toy
        if (kernel == KernelKind::Ada) fail("discrete-toy runs under mh or da");
        if (kernel == KernelKind::Mh && scheme != Scheme::Exact)
            fail("discrete-toy with kernel mh uses scheme exact");
        if (kernel == KernelKind::Da && scheme != Scheme::Approx1)
            fail("discrete-toy with kernel da uses scheme approx1 (the surrogate table)");
        if (prop != "rw")
            fail("discrete-toy has a fixed nearest-neighbour proposal (proposal.type rw/auto)");
        if (toy_start < 0 || toy_start >= DiscreteToy::kStates)
            fail("toy.start must lie in 0..6");
    }

    if (prop == "gcam") {
        if (problem == "discrete-toy") fail("gcam does not apply to the discrete toy");
        GroupPartition part = gcam_groups.empty()
                                  ? GroupPartition::single(dim)
                                  : GroupPartition::contiguous(gcam_groups);
        part.validate(dim);  // throws on a bad cover
    } else if (!gcam_groups.empty()) {
        fail("proposal.gcam_groups is set but proposal.type is not gcam");
    }
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << "format = damcmc-config-v1\n";
    os << "problem = " << problem << '\n';
    os << "kernel = " << kernel_name(kernel) << '\n';
    os << "scheme = " << scheme_name(scheme) << '\n';
    os << "chains = " << chains << '\n';
    os << "length = " << length << '\n';
    os << "burnin = " << burnin << '\n';
    os << "seed = " << seed << '\n';
    os << "retry_budget = " << retry_budget << '\n';
    os << "checkpoint.every = " << checkpoint_every << '\n';
    os << "warmstart.iters = " << warmstart_iters << '\n';
    os << "warmstart.scale = " << fmt_double(warmstart_scale) << '\n';
    os << "inner_target = "
       << (inner_target == InnerTarget::Exact ? "exact" : "approx") << '\n';
    os << "aem.approx3_input = "
       << (approx3_input == AemInput::Error ? "error" : "increment") << '\n';
    os << "aem.approx5_input = "
       << (approx5_input == AemInput::Error ? "error" : "increment") << '\n';
    os << "aem.prior_samples = " << aem_prior_samples << '\n';
    os << "proposal.type = " << resolved_proposal() << '\n';
    os << "proposal.rw_scale = " << fmt_double(rw_scale) << '\n';
    os << "proposal.beta_mix = " << fmt_double(beta_mix) << '\n';
    os << "proposal.gcam_groups = "
       << (gcam_groups.empty() ? std::string("none") : fmt_list(gcam_groups))
       << '\n';
    os << "proposal.gcam_batch = " << gcam_batch << '\n';
    os << "proposal.gcam_target_rate = " << fmt_double(gcam_target_rate) << '\n';
    os << "analytic.epsilon = " << fmt_double(an_epsilon) << '\n';
    os << "analytic.x_true = " << fmt_list(an_x_true) << '\n';
    os << "analytic.noise_sd = " << fmt_double(an_noise_sd) << '\n';
    os << "analytic.prior = " << an_prior << '\n';
    os << "analytic.prior_sd = " << fmt_double(an_prior_sd) << '\n';
    os << "analytic.box = " << fmt_double(an_box) << '\n';
    os << "fv.zones = " << fv_zones << '\n';
    os << "fv.fine_cells = " << fv_fine_cells << '\n';
    os << "fv.fine_steps = " << fv_fine_steps << '\n';
    os << "fv.coarse_cells = " << fv_coarse_cells << '\n';
    os << "fv.coarse_steps = " << fv_coarse_steps << '\n';
    os << "fv.obs_count = " << fv_obs_count << '\n';
    os << "fv.noise_sd = " << fmt_double(fv_noise_sd) << '\n';
    os << "fv.noise_frac = " << fmt_double(fv_noise_frac) << '\n';
    os << "fv.x_true = "
       << (fv_x_true.empty() ? std::string("default") : fmt_list(fv_x_true))
       << '\n';
    os << "fv.prior_sd = " << fmt_double(fv_prior_sd) << '\n';
    os << "toy.start = " << toy_start << '\n';
    return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunConfig::hash() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_text())));
    return buf;
}

// ------------------------------------------------------------------ assembly

namespace {

std::shared_ptr<const ForwardModelPair> make_pair_for(const RunConfig& cfg) {
    if (cfg.problem == "analytic") {
        AnalyticSpec spec = AnalyticSpec::defaults();
        spec.epsilon = cfg.an_epsilon;
        return make_analytic_pair(spec);
    }
    FvSpec fine = FvSpec::fine_default();
    FvSpec coarse = FvSpec::coarse_default();
    fine.zones = coarse.zones = cfg.fv_zones;
    fine.cells = cfg.fv_fine_cells;
    fine.steps = cfg.fv_fine_steps;
    coarse.cells = cfg.fv_coarse_cells;
    coarse.steps = cfg.fv_coarse_steps;
    fine.obs_count = coarse.obs_count = cfg.fv_obs_count;
    return make_fv_pair(fine, coarse);
}

// Built-in conductivity truth: a smooth log10 profile well inside the
// bounds, so the fine and coarse responses differ visibly but the inverse
// problem stays well posed.
Vector default_fv_truth(int zones) {
    constexpr double two_pi = 6.283185307179586;
    Vector x(zones);
    for (int j = 0; j < zones; ++j)
        x[j] = 0.5 * std::sin(two_pi * (j + 0.5) / zones);
    return x;
}

}  // namespace

ProblemSetup build_problem(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.problem == "discrete-toy")
        throw ConfigError("the discrete toy has no continuous problem setup");

    ProblemSetup s;
    auto pair = make_pair_for(cfg);
    // Data generation runs on its own pair, so the chain's pair has never
    // been evaluated when the sampler takes it over and its counters hold
    // the chain's cost story alone.
    auto data_pair = make_pair_for(cfg);
    Rng data_rng(cfg.seed, 0);

    if (cfg.problem == "analytic") {
        s.x_true = Eigen::Map<const Vector>(cfg.an_x_true.data(), 2);
        s.data = generate_synthetic_data(*data_pair, s.x_true, 0.0,
                                         cfg.an_noise_sd, data_rng);
        const Bounds b = Bounds::box(Vector::Constant(2, -cfg.an_box),
                                     Vector::Constant(2, cfg.an_box));
        Prior prior =
            cfg.an_prior == "gaussian"
                ? Prior::gaussian_box(Vector::Zero(2),
                                      Vector::Constant(2, cfg.an_prior_sd), b)
                : Prior::box(b);
        s.posterior = std::make_shared<Posterior>(
            pair, NoiseModel::iso(cfg.an_noise_sd, pair->output_dim()),
            std::move(prior), s.data.data);
        s.x0 = Vector::Zero(2);
        return s;
    }

    const int z = cfg.fv_zones;
    s.x_true = cfg.fv_x_true.empty()
                   ? default_fv_truth(z)
                   : Vector(Eigen::Map<const Vector>(cfg.fv_x_true.data(), z));
    s.data = generate_synthetic_data(*data_pair, s.x_true, cfg.fv_noise_frac,
                                     cfg.fv_noise_sd, data_rng);
    FvSpec fine = FvSpec::fine_default();
    fine.zones = z;
    const Bounds b = fv_bounds(fine);
    Prior prior = Prior::gaussian_box(
        Vector::Zero(z), Vector::Constant(z, cfg.fv_prior_sd), b);
    s.posterior = std::make_shared<Posterior>(
        pair, NoiseModel::iso(s.data.sigma, pair->output_dim()),
        std::move(prior), s.data.data);
    s.x0 = Vector::Zero(z);
    return s;
}

Sampler make_sampler(const RunConfig& cfg, const ProblemSetup& setup,
                     std::uint64_t chain_index) {
    const int d = setup.posterior->dim();
    const std::string pk = cfg.resolved_proposal();
    ProposalAdaptState prop =
        pk == "rw" ? ProposalAdaptState::rw(d, cfg.rw_scale)
        : pk == "am"
            ? ProposalAdaptState::am(d, cfg.beta_mix)
            : ProposalAdaptState::gcam(
                  cfg.gcam_groups.empty()
                      ? GroupPartition::single(d)
                      : GroupPartition::contiguous(cfg.gcam_groups),
                  cfg.beta_mix, cfg.gcam_batch, cfg.gcam_target_rate);

    std::optional<AemState> aem;
    if (scheme_uses_aem(cfg.scheme)) {
        const Matrix& ncov = setup.posterior->noise().cov();
        if (cfg.scheme == Scheme::Approx2) {
            // Built on its own pair so the chain's evaluation counters only
            // ever describe the chain.
            auto build_pair = make_pair_for(cfg);
            Rng build_rng(cfg.seed, 1);
            aem = build_prior_aem(*build_pair, setup.posterior->prior(), ncov,
                                  cfg.aem_prior_samples, build_rng)
                      .state;
        } else {
            aem = AemState(ncov, cfg.scheme == Scheme::Approx5
                                     ? MeanMode::PinnedZero
                                     : MeanMode::Free);
        }
    }

    KernelOptions opt;
    opt.kernel = cfg.kernel;
    opt.scheme = cfg.scheme;
    opt.approx3_input = cfg.approx3_input;
    opt.approx5_input = cfg.approx5_input;
    opt.inner_target = cfg.inner_target;
    opt.retry_budget = cfg.retry_budget;

    return Sampler(setup.posterior, opt, std::move(prop), std::move(aem),
                   Rng(cfg.seed, 2 + chain_index));
}

}  // namespace damcmc
