#pragma once

#include <optional>
#include <vector>

#include "machmin/engine.hpp"
#include "machmin/model.hpp"
#include "machmin/rational.hpp"

namespace machmin {

/// Lower bound on 2 - pi^2/6 used as the monitored laxity floor.
Rational laxity_floor();

/// p_j(t) <= alpha (d_j - t)
bool becomes_safe(const JobState& state, Time t, const Rational& alpha);

/// The job re-expressed from time t: remaining work, window [t, d_j].
Job residue(const JobState& state, Time t);

/// First-fit grouping of critical jobs scanned by decreasing deadline. A job
/// joins the lowest S_i whose earliest-deadline member a(i) has
/// laxity(t) >= d_j - t. Returns positions into `critical`.
std::vector<std::vector<std::size_t>> build_groups(const std::vector<JobState>& critical, Time t);

/// Round-robin by increasing-deadline rank: rank k goes to subgroup k mod mu.
/// Returns positions into `group`; empty subgroups are omitted.
std::vector<std::vector<std::size_t>> split_group(const std::vector<Job>& group, int mu);

/// Smallest mu >= 1 with (1 - alpha)^mu * n^2 <= 1, in exact arithmetic.
int choose_mu(std::size_t n, const Rational& alpha);

struct RebuildRecord {
    Time t = 0;
    int h = 0;
    int mu = 0;
    int critical = 0;
    /// h <= 1 + (2 + 2/alpha) m(T-hat) checked as m(T-hat) >= needed
    int needed = 0;
    bool ok = true;
};

struct LognMonitor {
    /// min over steps and critical jobs with positive laxity of l_j(t) / l_j
    Rational min_laxity_ratio{1};
    std::size_t laxity_floor_violations = 0;
    Rational min_safe_entry_ratio{1};
    std::size_t safe_entry_violations = 0;
    std::vector<RebuildRecord> rebuilds;
    std::size_t h_bound_violations = 0;
    int max_h = 0;
    int max_mu = 0;
    int critical_machines = 0;
    int safe_machines = 0;
    /// m of all residues admitted to the safe pool by the end of the run
    int safe_optimum = 0;

    bool ok() const
    {
        return laxity_floor_violations == 0 && safe_entry_violations == 0 && h_bound_violations == 0;
    }
};

struct LognRun {
    SimulationRun run;
    LognMonitor monitor;
};

class LognPolicy : public OnlinePolicy {
public:
    explicit LognPolicy(const Rational& alpha = Rational(1, 2), bool monitor_h = true);

    std::string name() const override;
    void on_release(std::size_t idx, const SimView& view) override;
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override { return safe_budget_ + critical_alloc_; }
    std::map<std::string, int> pool_peaks() const override;

    const LognMonitor& monitor() const { return monitor_; }

private:
    void reclassify(const SimView& view);
    void rebuild(const SimView& view);
    void check_laxity_floor(const SimView& view);

    Rational alpha_;
    bool monitor_h_;
    std::vector<bool> safe_;
    std::vector<Job> residues_;
    std::vector<std::vector<std::size_t>> subgroups_;
    bool released_now_ = false;
    int safe_budget_ = 0;
    int critical_alloc_ = 0;
    int safe_peak_ = 0;
    int critical_peak_ = 0;
    LognMonitor monitor_;
};

/// The semi-online schedule. The algorithm itself never reads m; it is kept
/// for the caller's reporting.
LognRun logn_schedule(const Instance& instance, const Rational& alpha = Rational(1, 2),
                      bool monitor_h = true);

/// machines_used / (m * ceil(log2 n)), n >= 2.
Rational logn_constant(int machines_used, int m, std::size_t n);

// Laxity transforms

enum class TransformKind { ScaleLaxity, LeftPart, RightPart, LeftShortened, RightShortened };

struct TransformSpec {
    TransformKind kind = TransformKind::ScaleLaxity;
    Rational param{1, 2};
};

struct TransformResult {
    Instance instance;
    /// All times in `instance` are multiplied by this factor.
    Time scale = 1;
    /// Jobs whose transformed processing time would be zero.
    std::vector<JobId> dropped;
};

/// Parses beta|left|right|lshort|rshort.
TransformKind parse_transform_kind(const std::string& text);
std::string to_string(TransformKind kind);

TransformResult transform(const Instance& instance, const TransformSpec& spec);

}  // namespace machmin
