#pragma once

#include <optional>
#include <string>
#include <vector>

#include "machmin/adversary.hpp"
#include "machmin/composite.hpp"
#include "machmin/logn.hpp"

namespace machmin {

struct RunOptions {
    /// Explicit budget for base policies (edf, llf, edf-np).
    std::optional<int> machines;
    /// Optimum handed to semi-online policies; computed when absent.
    std::optional<int> m;
    std::optional<Rational> alpha;
    int nonpreemptive_cap = kDefaultNonpreemptiveCap;
};

struct PolicyResult {
    SimulationRun run;
    /// Machines charged to the policy: pool peaks summed over pools, or the
    /// machines opened across epochs for Double.
    int machines = 0;
    int m = 0;
    std::optional<DoubleRun> doubling;
    std::optional<LognMonitor> logn;
};

/// Known policy names, e.g. "edf", "agreeable-np-online". A base policy may
/// carry a budget multiplier: "edf@3m", "edf-np@9/4m", "llf@m".
std::vector<std::string> policy_names();
bool is_nonpreemptive_policy(const std::string& name);

/// Throws std::invalid_argument on an unknown name or a violated
/// precondition, OracleCapExceeded when m cannot be computed.
PolicyResult run_policy(const std::string& name, const Instance& instance, const RunOptions& opts);

int accounted_machines(const SimulationRun& run);

// Bench

struct Campaign {
    RandomSpec spec;
    std::size_t count = 10;
    std::vector<std::string> policies;
    int threads = 1;
    bool timing = false;
    int nonpreemptive_cap = 10;
};

struct BenchRow {
    std::size_t instance = 0;
    std::string profile;
    std::size_t n = 0;
    std::optional<int> m_opt;
    std::string policy;
    std::string params;
    int machines = 0;
    std::optional<Miss> first_miss;
    std::optional<Rational> ratio;
    /// ok | miss | oracle-skipped | rejected
    std::string status;
    double wall_ms = 0;
};

struct PolicySummary {
    std::string policy;
    std::size_t rows = 0;
    std::size_t misses = 0;
    std::size_t skipped = 0;
    std::optional<Rational> max_ratio;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<PolicySummary> summary;
};

BenchResult bench(const Campaign& campaign);

std::string to_csv(const BenchResult& result, bool timing);
std::string to_jsonl(const BenchResult& result, bool timing);

struct ConstantReport {
    std::size_t count = 0;
    std::optional<Rational> max;
    std::optional<Rational> p95;
    std::string text;
};

/// machines / (m * ceil(log2 n)) over the logn rows.
ConstantReport report_constants(const BenchResult& result);

// Verify

struct VerifyResult {
    int status = 0;  // 0 feasible, 1 infeasible, 2 format mismatch
    std::string report;
};

VerifyResult verify(const Instance& instance, const Trace& trace,
                    std::optional<bool> expect_preemptive = std::nullopt);

}  // namespace machmin
