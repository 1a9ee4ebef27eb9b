#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "damcmc/chain.hpp"
#include "damcmc/kernel.hpp"

namespace damcmc {

struct TraceHeader {
    std::string version;
    std::string config_hash;
    int chain = 0;
    std::uint64_t burnin = 0;
    int dim = 0;
    int n_sigma = 0;
};

// Chain trace CSV: '#'-prefixed header lines, then
//   iter,x_1..x_d,log_post,acc1,acc2,n_fine,n_coarse,sigma_1..sigma_L
// per iteration.  Floats are written with 17 significant digits so a read
// back reproduces every double bit for bit; a fixed (config, seed) therefore
// yields a byte-identical file.
class TraceWriter {
public:
    TraceWriter(std::ostream& os, const TraceHeader& header);
    void write(const ChainRecord& rec);

private:
    std::ostream& os_;
    int dim_;
    int n_sigma_;
};

struct TraceFile {
    TraceHeader header;
    std::vector<ChainRecord> records;
};

TraceFile read_trace_stream(std::istream& is);
TraceFile read_trace(const std::string& path);

// Human-readable per-chain run report (rates, evaluation counts and mean
// model times, adaptation-drift maxima).  Mean times vary run to run; the
// byte-reproducibility contract covers traces, not reports.
void write_run_report(std::ostream& os, const RunSummary& summary,
                      const std::string& config_hash, int chain);

}  // namespace damcmc
