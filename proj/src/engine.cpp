#include "machmin/engine.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace machmin {

ValidationReport SimulationRun::validate() const
{
    return preemptive ? validate_preemptive(instance, schedule)
                      : validate_nonpreemptive(instance, starts);
}

Simulator::Simulator(OnlinePolicy& policy) : policy_(policy) {}

void Simulator::add_job(const Job& job)
{
    check_job(job);
    if (job.release < now())
        throw std::invalid_argument("job " + std::to_string(job.id) + " released in the past");
    if (ids_.count(job.id))
        throw std::invalid_argument("duplicate id " + std::to_string(job.id));
    ids_[job.id] = true;
    pending_.push_back(job);
    all_.push_back(job);
    horizon_ = std::max(horizon_, job.deadline);
}

bool Simulator::done() const
{
    return now() >= horizon_;
}

void Simulator::deliver()
{
    std::vector<Job> now_released;
    std::vector<Job> later;
    for (const auto& j : pending_)
        (j.release == now() ? now_released : later).push_back(j);
    pending_ = std::move(later);
    for (const auto& j : now_released) {
        view_.states_.push_back({j, j.processing, false});
        view_.start_.emplace_back();
        view_.running_.push_back(false);
        missed_.push_back(false);
        policy_.on_release(view_.states_.size() - 1, view_);
    }
}

void Simulator::detect_misses()
{
    for (std::size_t i = 0; i < view_.states_.size(); ++i) {
        const auto& s = view_.states_[i];
        if (missed_[i] || s.remaining == 0 || s.job.deadline < now())
            continue;
        if (view_.laxity(i) < 0) {
            missed_[i] = true;
            misses_.push_back({s.job.id, now()});
        }
    }
}

void Simulator::step()
{
    deliver();
    detect_misses();

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < view_.states_.size(); ++i) {
        const auto& s = view_.states_[i];
        if (s.remaining > 0 && now() < s.job.deadline)
            active.push_back(i);
    }

    auto chosen = policy_.select(view_, active);
    const int budget = policy_.budget();

    std::set<std::size_t> seen;
    for (std::size_t i : chosen) {
        if (i >= view_.states_.size())
            throw ProtocolViolation(policy_.name() + " selected an unreleased job at t=" +
                                    std::to_string(now()));
        if (!std::binary_search(active.begin(), active.end(), i))
            throw ProtocolViolation(policy_.name() + " selected inactive job " +
                                    std::to_string(view_.job(i).id) + " at t=" +
                                    std::to_string(now()));
        if (!seen.insert(i).second)
            throw ProtocolViolation(policy_.name() + " selected job " +
                                    std::to_string(view_.job(i).id) + " twice");
    }
    if (budget != kUnbounded && static_cast<int>(chosen.size()) > budget)
        throw ProtocolViolation(policy_.name() + " exceeded its budget at t=" +
                                std::to_string(now()));
    if (!policy_.preemptive()) {
        for (std::size_t i : active)
            if (view_.running_[i] && !seen.count(i))
                throw ProtocolViolation(policy_.name() + " preempted job " +
                                        std::to_string(view_.job(i).id) + " at t=" +
                                        std::to_string(now()));
    }

    std::fill(view_.running_.begin(), view_.running_.end(), false);
    for (std::size_t i : chosen) {
        auto& s = view_.states_[i];
        if (!view_.start_[i])
            view_.start_[i] = now();
        --s.remaining;
        view_.running_[i] = s.remaining > 0;
        schedule_.assign(now(), s.job.id);
    }
    if (auto it = schedule_.slots.find(now()); it != schedule_.slots.end())
        std::sort(it->second.begin(), it->second.end());

    const int processed = static_cast<int>(chosen.size());
    slots_.push_back({now(), static_cast<int>(active.size()), processed, budget});
    machines_used_ = std::max(machines_used_, processed);
    if (budget != kUnbounded)
        peak_budget_ = std::max(peak_budget_, budget);
    ++view_.now_;
}

SimulationRun Simulator::finish()
{
    while (!done())
        step();
    deliver();
    detect_misses();

    SimulationRun run;
    run.instance = Instance(all_);
    run.policy = policy_.name();
    run.preemptive = policy_.preemptive();
    run.schedule = schedule_;
    for (std::size_t i = 0; i < view_.states_.size(); ++i)
        if (view_.start_[i])
            run.starts.starts[view_.job(i).id] = *view_.start_[i];
    run.slots = slots_;
    run.misses = misses_;
    if (!misses_.empty())
        run.first_miss = misses_.front();
    run.machines_used = machines_used_;
    run.peak_budget = peak_budget_ > 0 ? peak_budget_ : machines_used_;
    run.pool_peaks = policy_.pool_peaks();
    return run;
}

SimulationRun simulate(const Instance& instance, OnlinePolicy& policy)
{
    Simulator sim(policy);
    for (const auto& j : instance.jobs())
        sim.add_job(j);
    auto run = sim.finish();
    run.instance = instance;
    return run;
}

namespace {

auto edf_key(const JobState& s)
{
    return std::make_tuple(s.job.deadline, s.job.release, s.job.id);
}

auto llf_key(const JobState& s, Time t)
{
    return std::make_tuple(laxity(s, t), s.job.release, s.job.id);
}

std::vector<JobId> ids_of(const std::vector<JobState>& states)
{
    std::vector<JobId> out;
    for (const auto& s : states)
        out.push_back(s.job.id);
    return out;
}

}  // namespace

std::vector<JobId> edf_select(const std::vector<JobState>& active, Time, int budget)
{
    auto sorted = active;
    std::sort(sorted.begin(), sorted.end(),
              [](const JobState& a, const JobState& b) { return edf_key(a) < edf_key(b); });
    sorted.resize(std::min<std::size_t>(sorted.size(), static_cast<std::size_t>(std::max(0, budget))));
    return ids_of(sorted);
}

std::vector<JobId> llf_select(const std::vector<JobState>& active, Time t, int budget)
{
    std::vector<JobState> eligible;
    for (const auto& s : active)
        if (laxity(s, t) >= 0)
            eligible.push_back(s);
    std::sort(eligible.begin(), eligible.end(), [t](const JobState& a, const JobState& b) {
        return llf_key(a, t) < llf_key(b, t);
    });
    eligible.resize(std::min<std::size_t>(eligible.size(), static_cast<std::size_t>(std::max(0, budget))));
    return ids_of(eligible);
}

std::vector<JobId> edf_nonpreemptive_step(const std::vector<JobState>& running,
                                          const std::vector<JobState>& waiting, Time t,
                                          int budget)
{
    auto out = ids_of(running);
    const int free = budget - static_cast<int>(running.size());
    for (JobId id : edf_select(waiting, t, free))
        out.push_back(id);
    return out;
}

std::vector<std::size_t> edf_select(const SimView& view, std::vector<std::size_t> candidates,
                                    int budget)
{
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return edf_key(view.state(a)) < edf_key(view.state(b));
    });
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(std::max(0, budget))));
    return candidates;
}

std::vector<std::size_t> llf_select(const SimView& view, std::vector<std::size_t> candidates,
                                    int budget)
{
    const Time t = view.now();
    std::erase_if(candidates, [&](std::size_t i) { return view.laxity(i) < 0; });
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return llf_key(view.state(a), t) < llf_key(view.state(b), t);
    });
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(std::max(0, budget))));
    return candidates;
}

std::vector<std::size_t> edf_nonpreemptive_select(const SimView& view,
                                                  const std::vector<std::size_t>& candidates,
                                                  int budget)
{
    std::vector<std::size_t> out;
    std::vector<std::size_t> waiting;
    for (std::size_t i : candidates)
        (view.running(i) ? out : waiting).push_back(i);
    const int free = budget - static_cast<int>(out.size());
    for (std::size_t i : edf_select(view, std::move(waiting), free))
        out.push_back(i);
    return out;
}

Time early_fit(const Job& job)
{
    return job.release;
}

Time medium_fit(const Job& job)
{
    if (job.laxity() % 2 != 0)
        throw std::invalid_argument("medium fit needs even laxity (job " + std::to_string(job.id) +
                                    "); pre-scale the instance by 2");
    return job.release + job.laxity() / 2;
}

Instance prescale_for_medium_fit(const Instance& instance, Time& scale)
{
    const bool odd = std::any_of(instance.jobs().begin(), instance.jobs().end(),
                                 [](const Job& j) { return j.laxity() % 2 != 0; });
    scale = odd ? 2 : 1;
    return odd ? instance.scaled(2) : instance;
}

bool check_busy(const SimulationRun& run, int budget)
{
    return std::all_of(run.slots.begin(), run.slots.end(), [budget](const SlotRecord& s) {
        return s.processed >= budget || s.processed == s.active;
    });
}

std::vector<Time> remaining_work(const Instance& instance, const PreemptiveSchedule& schedule,
                                 Time horizon)
{
    std::vector<Time> out(static_cast<std::size_t>(horizon) + 1, 0);
    Time w = instance.total_processing();
    auto it = schedule.slots.begin();
    for (Time t = 0; t <= horizon; ++t) {
        while (it != schedule.slots.end() && it->first < t) {
            w -= static_cast<Time>(it->second.size());
            ++it;
        }
        out[static_cast<std::size_t>(t)] = w;
    }
    return out;
}

std::optional<Time> first_load_violation(const SimulationRun& run,
                                         const PreemptiveSchedule& optimal, int m,
                                         const Rational& alpha)
{
    const Time dmax = run.instance.max_deadline();
    const auto wa = remaining_work(run.instance, run.schedule, dmax);
    const auto wo = remaining_work(run.instance, optimal, dmax);
    const Time a = alpha.numerator();
    const Time b = alpha.denominator();
    for (Time t = 0; t <= dmax; ++t) {
        const auto i = static_cast<std::size_t>(t);
        if ((b - a) * (wa[i] - wo[i]) > a * m * (dmax - t))
            return t;
    }
    return std::nullopt;
}

std::string EdfPolicy::name() const
{
    return "edf(m'=" + std::to_string(budget_) + ")";
}

std::vector<std::size_t> EdfPolicy::select(const SimView& view,
                                           const std::vector<std::size_t>& active)
{
    return edf_select(view, active, budget_);
}

std::string LlfPolicy::name() const
{
    return "llf(m'=" + std::to_string(budget_) + ")";
}

std::vector<std::size_t> LlfPolicy::select(const SimView& view,
                                           const std::vector<std::size_t>& active)
{
    return llf_select(view, active, budget_);
}

std::string NonpreemptiveEdfPolicy::name() const
{
    return "edf-np(m'=" + std::to_string(budget_) + ")";
}

std::vector<std::size_t> NonpreemptiveEdfPolicy::select(const SimView& view,
                                                        const std::vector<std::size_t>& active)
{
    return edf_nonpreemptive_select(view, active, budget_);
}

void CommitPolicy::on_release(std::size_t idx, const SimView& view)
{
    planned_[idx] = start_for(view.job(idx));
}

std::vector<std::size_t> CommitPolicy::select(const SimView& view,
                                              const std::vector<std::size_t>& active)
{
    std::vector<std::size_t> out;
    for (std::size_t i : active) {
        auto it = planned_.find(i);
        if (view.running(i) || (it != planned_.end() && it->second == view.now()))
            out.push_back(i);
    }
    return out;
}

}  // namespace machmin
