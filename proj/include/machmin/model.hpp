#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "machmin/rational.hpp"

namespace machmin {

using Time = std::int64_t;
using JobId = std::int64_t;

/// A deadline-constrained unit of work. Valid jobs satisfy release >= 0,
/// processing >= 1 and deadline >= release + processing.
struct Job {
    JobId id = 0;
    Time release = 0;
    Time deadline = 0;
    Time processing = 0;

    Time window() const { return deadline - release; }
    Time laxity() const { return deadline - release - processing; }

    bool operator==(const Job&) const = default;
};

/// Throws std::invalid_argument describing the first violated job invariant.
void check_job(const Job& job);

class Instance {
public:
    Instance() = default;
    explicit Instance(std::vector<Job> jobs);

    const std::vector<Job>& jobs() const { return jobs_; }
    std::size_t size() const { return jobs_.size(); }
    bool empty() const { return jobs_.empty(); }
    const Job& operator[](std::size_t i) const { return jobs_[i]; }

    const Job& by_id(JobId id) const;
    std::optional<std::size_t> index_of(JobId id) const;
    bool contains(JobId id) const { return index_.count(id) != 0; }

    Time max_deadline() const;
    Time total_processing() const;

    bool is_agreeable() const;
    bool is_equal_processing() const;
    bool is_uniform_deadline() const;

    /// Jobs with release <= t, in original order.
    Instance released_by(Time t) const;

    /// Every time value multiplied by factor.
    Instance scaled(Time factor) const;

private:
    std::vector<Job> jobs_;
    std::unordered_map<JobId, std::size_t> index_;
};

enum class Tightness { Loose, Tight };

/// Per-job progress inside a schedule or simulation.
struct JobState {
    Job job;
    Time remaining = 0;
    bool ever_loose = false;
};

/// d_j - t - remaining(t); negative means the deadline can no longer be met.
Time laxity(const JobState& state, Time t);

/// Loose iff remaining <= alpha * (d_j - r_j), compared exactly.
Tightness classify(const JobState& state, Time t, const Rational& alpha);
Tightness classify(const Job& job, const Rational& alpha);

struct PreemptiveSchedule {
    /// slot t -> job ids processed in [t, t+1)
    std::map<Time, std::vector<JobId>> slots;

    void assign(Time t, JobId id) { slots[t].push_back(id); }
    int machines_used() const;
};

struct NonpreemptiveSchedule {
    std::map<JobId, Time> starts;

    int machines_used(const Instance& instance) const;
};

struct JobDiagnostic {
    JobId id = 0;
    Time required = 0;
    Time assigned = 0;
    std::vector<Time> outside_window;
    std::vector<Time> duplicate_slots;
    std::optional<Time> start;
    bool ok = true;
    std::string message;
};

struct ValidationReport {
    bool feasible = true;
    int machines_used = 0;
    std::vector<JobDiagnostic> jobs;
    std::vector<std::string> structural_errors;

    const JobDiagnostic* find(JobId id) const;
    std::string summary() const;
};

ValidationReport validate_preemptive(const Instance& instance, const PreemptiveSchedule& schedule);
ValidationReport validate_nonpreemptive(const Instance& instance,
                                        const NonpreemptiveSchedule& schedule);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& instance);

Instance read_instance_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// A parsed schedule trace: exactly one of the two schedules is meaningful.
struct Trace {
    bool preemptive = true;
    PreemptiveSchedule preemptive_schedule;
    NonpreemptiveSchedule nonpreemptive_schedule;
};

Trace parse_trace(std::string_view text);
std::string serialize_trace(const PreemptiveSchedule& schedule);
std::string serialize_trace(const NonpreemptiveSchedule& schedule);

}  // namespace machmin
