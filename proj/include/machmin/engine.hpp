#pragma once

#include <climits>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "machmin/model.hpp"
#include "machmin/rational.hpp"

namespace machmin {

inline constexpr int kUnbounded = INT_MAX;

/// Thrown when a policy breaks the online protocol.
class ProtocolViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// What a policy may observe: released jobs only, indexed densely in
/// delivery order.
class SimView {
public:
    Time now() const { return now_; }
    std::size_t size() const { return states_.size(); }
    const Job& job(std::size_t i) const { return states_[i].job; }
    const JobState& state(std::size_t i) const { return states_[i]; }
    Time remaining(std::size_t i) const { return states_[i].remaining; }
    Time laxity(std::size_t i) const { return machmin::laxity(states_[i], now_); }
    bool started(std::size_t i) const { return start_[i].has_value(); }
    std::optional<Time> start(std::size_t i) const { return start_[i]; }
    /// Processed in the previous slot and still unfinished.
    bool running(std::size_t i) const { return running_[i]; }

private:
    friend class Simulator;
    Time now_ = 0;
    std::vector<JobState> states_;
    std::vector<std::optional<Time>> start_;
    std::vector<bool> running_;
};

class OnlinePolicy {
public:
    virtual ~OnlinePolicy() = default;

    virtual std::string name() const = 0;
    virtual bool preemptive() const { return true; }

    /// Called once per job, at its release, before select() for that slot.
    virtual void on_release(std::size_t /*idx*/, const SimView& /*view*/) {}

    /// Jobs to process in [now, now+1), chosen among `active`.
    virtual std::vector<std::size_t> select(const SimView& view,
                                            const std::vector<std::size_t>& active) = 0;

    /// Current machine budget; kUnbounded if the policy has no fixed budget.
    virtual int budget() const = 0;

    /// Peak machines per named sub-pool, for composite policies.
    virtual std::map<std::string, int> pool_peaks() const { return {}; }
};

struct Miss {
    JobId id = 0;
    Time time = 0;
    bool operator==(const Miss&) const = default;
};

struct SlotRecord {
    Time t = 0;
    int active = 0;
    int processed = 0;
    int budget = 0;
    bool operator==(const SlotRecord&) const = default;
};

struct SimulationRun {
    Instance instance;
    std::string policy;
    bool preemptive = true;
    PreemptiveSchedule schedule;
    NonpreemptiveSchedule starts;
    std::vector<SlotRecord> slots;
    std::vector<Miss> misses;
    std::optional<Miss> first_miss;
    int machines_used = 0;
    int peak_budget = 0;
    std::map<std::string, int> pool_peaks;
    /// Factor the instance was multiplied by before simulation (1 if none).
    Time scale = 1;

    bool ok() const { return misses.empty(); }
    ValidationReport validate() const;
};

/// Incremental driver; jobs may be added while the run is in progress as long
/// as their release is not in the past.
class Simulator {
public:
    explicit Simulator(OnlinePolicy& policy);

    void add_job(const Job& job);
    /// Processes slot now() and advances the clock by one.
    void step();
    Time now() const { return view_.now_; }
    /// No known job has a deadline beyond now().
    bool done() const;
    const SimView& view() const { return view_; }
    const std::vector<Miss>& misses() const { return misses_; }

    /// Steps until done() and returns the full record.
    SimulationRun finish();

private:
    void deliver();
    void detect_misses();

    OnlinePolicy& policy_;
    SimView view_;
    std::vector<Job> pending_;
    std::vector<Job> all_;
    std::map<JobId, bool> ids_;
    std::vector<bool> missed_;
    std::vector<Miss> misses_;
    PreemptiveSchedule schedule_;
    std::vector<SlotRecord> slots_;
    int machines_used_ = 0;
    int peak_budget_ = 0;
    Time horizon_ = 0;
};

SimulationRun simulate(const Instance& instance, OnlinePolicy& policy);

// Selection rules. Canonical tie-break: key, then release, then id.

std::vector<JobId> edf_select(const std::vector<JobState>& active, Time t, int budget);
std::vector<JobId> llf_select(const std::vector<JobState>& active, Time t, int budget);
/// Running jobs continue; free budget goes to waiting jobs by EDF order.
std::vector<JobId> edf_nonpreemptive_step(const std::vector<JobState>& running,
                                          const std::vector<JobState>& waiting, Time t,
                                          int budget);

std::vector<std::size_t> edf_select(const SimView& view, std::vector<std::size_t> candidates,
                                    int budget);
std::vector<std::size_t> llf_select(const SimView& view, std::vector<std::size_t> candidates,
                                    int budget);
std::vector<std::size_t> edf_nonpreemptive_select(const SimView& view,
                                                  const std::vector<std::size_t>& candidates,
                                                  int budget);

Time early_fit(const Job& job);
/// Start so that the job occupies the middle of its window; needs even laxity.
Time medium_fit(const Job& job);

/// Returns the instance unchanged (scale 1) if every laxity is even, else the
/// instance doubled (scale 2).
Instance prescale_for_medium_fit(const Instance& instance, Time& scale);

/// At every slot all budget machines are used or every active job is processed.
bool check_busy(const SimulationRun& run, int budget);

/// Remaining work (unreleased jobs included) at the start of each slot
/// t = 0..horizon, given a per-slot processed set.
std::vector<Time> remaining_work(const Instance& instance, const PreemptiveSchedule& schedule,
                                 Time horizon);

/// First t where (b-a)(W_A(t) - W_OPT(t)) > a*m*(d_max - t) for alpha = a/b.
std::optional<Time> first_load_violation(const SimulationRun& run,
                                         const PreemptiveSchedule& optimal, int m,
                                         const Rational& alpha);

class EdfPolicy : public OnlinePolicy {
public:
    explicit EdfPolicy(int budget) : budget_(budget) {}
    std::string name() const override;
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override { return budget_; }

private:
    int budget_;
};

class LlfPolicy : public OnlinePolicy {
public:
    explicit LlfPolicy(int budget) : budget_(budget) {}
    std::string name() const override;
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override { return budget_; }

private:
    int budget_;
};

class NonpreemptiveEdfPolicy : public OnlinePolicy {
public:
    explicit NonpreemptiveEdfPolicy(int budget) : budget_(budget) {}
    std::string name() const override;
    bool preemptive() const override { return false; }
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override { return budget_; }

private:
    int budget_;
};

/// Non-preemptive policy that commits every job to a start time at release.
class CommitPolicy : public OnlinePolicy {
public:
    bool preemptive() const override { return false; }
    void on_release(std::size_t idx, const SimView& view) override;
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override { return kUnbounded; }

protected:
    virtual Time start_for(const Job& job) const = 0;

private:
    std::map<std::size_t, Time> planned_;
};

class EarlyFitPolicy : public CommitPolicy {
public:
    std::string name() const override { return "earlyfit"; }

protected:
    Time start_for(const Job& job) const override { return early_fit(job); }
};

/// Throws std::invalid_argument on a job with odd laxity.
class MediumFitPolicy : public CommitPolicy {
public:
    std::string name() const override { return "mediumfit"; }

protected:
    Time start_for(const Job& job) const override { return medium_fit(job); }
};

}  // namespace machmin
