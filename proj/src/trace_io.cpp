#include "damcmc/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "damcmc/errors.hpp"
#include "damcmc/version.hpp"

namespace damcmc {

namespace {

void put_d(std::ostream& os, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

double parse_field_double(const std::string& tok, std::uint64_t row) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw Error("trace row " + std::to_string(row) + ": bad number '" +
                    tok + "'");
    return v;
}

long long parse_field_int(const std::string& tok, std::uint64_t row) {
    try {
        size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw Error("trace row " + std::to_string(row) + ": bad integer '" +
                    tok + "'");
    }
}

}  // namespace

TraceWriter::TraceWriter(std::ostream& os, const TraceHeader& h)
    : os_(os), dim_(h.dim), n_sigma_(h.n_sigma) {
    if (dim_ < 1 || n_sigma_ < 1)
        throw Error("trace header: dim and n_sigma must be positive");
    os_ << "# damcmc-trace v1\n";
    os_ << "# version = " << (h.version.empty() ? kVersion : h.version) << '\n';
    os_ << "# config_hash = " << h.config_hash << '\n';
    os_ << "# chain = " << h.chain << '\n';
    os_ << "# burnin = " << h.burnin << '\n';
    os_ << "# dim = " << dim_ << '\n';
    os_ << "# n_sigma = " << n_sigma_ << '\n';
    os_ << "iter";
    for (int i = 1; i <= dim_; ++i) os_ << ",x_" << i;
    os_ << ",log_post,acc1,acc2,n_fine,n_coarse";
    for (int i = 1; i <= n_sigma_; ++i) os_ << ",sigma_" << i;
    os_ << '\n';
}

void TraceWriter::write(const ChainRecord& rec) {
    if (rec.x.size() != dim_ || static_cast<int>(rec.sigma.size()) != n_sigma_)
        throw DimensionError("trace write: record shape does not match header");
    os_ << rec.iter;
    for (Eigen::Index i = 0; i < rec.x.size(); ++i) {
        os_ << ',';
        put_d(os_, rec.x[i]);
    }
    os_ << ',';
    put_d(os_, rec.log_post);
    os_ << ',' << rec.acc1 << ',' << rec.acc2 << ',' << rec.n_fine << ','
        << rec.n_coarse;
    for (double s : rec.sigma) {
        os_ << ',';
        put_d(os_, s);
    }
    os_ << '\n';
}

TraceFile read_trace_stream(std::istream& is) {
    TraceFile tf;
    std::string line;
    bool saw_magic = false, saw_columns = false;
    std::uint64_t row = 0;

    auto header_value = [](const std::string& l) {
        const auto eq = l.find('=');
        if (eq == std::string::npos) return std::string();
        auto v = l.substr(eq + 1);
        const auto a = v.find_first_not_of(" \t");
        return a == std::string::npos ? std::string() : v.substr(a);
    };

    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("damcmc-trace") != std::string::npos) saw_magic = true;
            else if (line.find("# version") == 0) tf.header.version = header_value(line);
            else if (line.find("# config_hash") == 0) tf.header.config_hash = header_value(line);
            else if (line.find("# chain") == 0) tf.header.chain = std::atoi(header_value(line).c_str());
            else if (line.find("# burnin") == 0) tf.header.burnin = std::strtoull(header_value(line).c_str(), nullptr, 10);
            else if (line.find("# dim") == 0) tf.header.dim = std::atoi(header_value(line).c_str());
            else if (line.find("# n_sigma") == 0) tf.header.n_sigma = std::atoi(header_value(line).c_str());
            continue;
        }
        if (!saw_columns) {  // the column-name row
            if (line.rfind("iter", 0) != 0)
                throw Error("trace: expected the column header row");
            saw_columns = true;
            continue;
        }

        ++row;
        std::vector<std::string> tok;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ',')) tok.push_back(cur);
        const size_t want = 1 + static_cast<size_t>(tf.header.dim) + 5 +
                            static_cast<size_t>(tf.header.n_sigma);
        if (tok.size() != want)
            throw Error("trace row " + std::to_string(row) + ": expected " +
                        std::to_string(want) + " fields, got " +
                        std::to_string(tok.size()));

        ChainRecord rec;
        size_t f = 0;
        rec.iter = static_cast<std::uint64_t>(parse_field_int(tok[f++], row));
        rec.x.resize(tf.header.dim);
        for (int i = 0; i < tf.header.dim; ++i)
            rec.x[i] = parse_field_double(tok[f++], row);
        rec.log_post = parse_field_double(tok[f++], row);
        rec.acc1 = static_cast<int>(parse_field_int(tok[f++], row));
        rec.acc2 = static_cast<int>(parse_field_int(tok[f++], row));
        rec.n_fine = static_cast<std::uint64_t>(parse_field_int(tok[f++], row));
        rec.n_coarse = static_cast<std::uint64_t>(parse_field_int(tok[f++], row));
        rec.sigma.resize(tf.header.n_sigma);
        for (int i = 0; i < tf.header.n_sigma; ++i)
            rec.sigma[i] = parse_field_double(tok[f++], row);
        tf.records.push_back(std::move(rec));
    }
    if (!saw_magic) throw Error("not a trace file (missing damcmc-trace header)");
    if (tf.header.dim < 1) throw Error("trace: missing or bad dim header");
    return tf;
}

TraceFile read_trace(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open trace file " + path);
    return read_trace_stream(is);
}

void write_run_report(std::ostream& os, const RunSummary& s,
                      const std::string& config_hash, int chain) {
    auto rate = [](std::uint64_t num, std::uint64_t den) {
        return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    os << "damcmc run report\n";
    os << "version: " << kVersion << '\n';
    os << "config_hash: " << config_hash << '\n';
    os << "chain: " << chain << '\n';
    os << "iterations: " << s.length << " (burnin " << s.burnin << ")\n";
    os << "stage1_accept_rate: " << rate(s.acc1, s.length) << '\n';
    if (s.has_stage2) {
        os << "promotions: " << s.promoted << '\n';
        os << "stage2_accept_rate_given_promotion: " << rate(s.acc2, s.promoted)
           << '\n';
    }
    os << "move_rate: " << rate(s.moved, s.length) << '\n';
    os << "retries: " << s.retries << '\n';
    os << "fine_evals: " << s.evals.n_fine << '\n';
    os << "coarse_evals: " << s.evals.n_coarse << '\n';
    os << "mean_fine_seconds: " << s.evals.mean_fine_seconds() << '\n';
    os << "mean_coarse_seconds: " << s.evals.mean_coarse_seconds() << '\n';
    os << "aem_drift_max_first_half: " << s.aem_drift_max_first << '\n';
    os << "aem_drift_max_second_half: " << s.aem_drift_max_second << '\n';
    os << "prop_drift_max_first_half: " << s.prop_drift_max_first << '\n';
    os << "prop_drift_max_second_half: " << s.prop_drift_max_second << '\n';
    if (s.unbounded_space)
        os << "warning: adaptive two-stage chain on an unbounded parameter "
              "space; ergodicity relies on the adaptation diminishing\n";
}

}  // namespace damcmc
