#include "machmin/optimum.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <tuple>

namespace machmin {

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals))
{
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (intervals_[i].begin >= intervals_[i].end)
            throw std::invalid_argument("interval with begin >= end");
        if (i > 0 && intervals_[i - 1].end > intervals_[i].begin)
            throw std::invalid_argument("intervals overlap or are unsorted");
    }
}

IntervalSet IntervalSet::from_slots(const std::vector<Time>& slots)
{
    auto sorted = slots;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<Interval> runs;
    for (Time t : sorted) {
        if (!runs.empty() && runs.back().end == t)
            runs.back().end = t + 1;
        else
            runs.push_back({t, t + 1});
    }
    return IntervalSet(std::move(runs));
}

Time IntervalSet::length() const
{
    Time total = 0;
    for (const auto& iv : intervals_)
        total += iv.end - iv.begin;
    return total;
}

Time IntervalSet::overlap(Time a, Time b) const
{
    Time total = 0;
    for (const auto& iv : intervals_) {
        const Time lo = std::max(a, iv.begin);
        const Time hi = std::min(b, iv.end);
        if (hi > lo)
            total += hi - lo;
    }
    return total;
}

FlowNetwork::FlowNetwork(const Instance& instance, int machines) : graph(2)
{
    std::vector<Time> points;
    points.reserve(instance.size() * 2);
    for (const auto& j : instance.jobs()) {
        points.push_back(j.release);
        points.push_back(j.deadline);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const Time a = points[i];
        const Time b = points[i + 1];
        const bool covered = std::any_of(instance.jobs().begin(), instance.jobs().end(),
                                         [&](const Job& j) { return j.release <= a && b <= j.deadline; });
        if (covered)
            segments.push_back({a, b});
    }

    const int n = static_cast<int>(instance.size());
    const int seg_base = 2 + n;
    graph = MaxFlow(seg_base + static_cast<int>(segments.size()));
    source = 0;
    sink = 1;
    job_arcs.resize(instance.size());
    for (int i = 0; i < n; ++i) {
        const auto& job = instance[static_cast<std::size_t>(i)];
        graph.add_edge(source, 2 + i, job.processing);
        for (std::size_t s = 0; s < segments.size(); ++s) {
            if (job.release <= segments[s].begin && segments[s].end <= job.deadline) {
                int e = graph.add_edge(2 + i, seg_base + static_cast<int>(s), segments[s].length());
                job_arcs[static_cast<std::size_t>(i)].emplace_back(s, e);
            }
        }
    }
    for (std::size_t s = 0; s < segments.size(); ++s)
        graph.add_edge(seg_base + static_cast<int>(s), sink,
                       static_cast<MaxFlow::Cap>(machines) * segments[s].length());
}

namespace {

PreemptiveSchedule extract_witness(const Instance& instance, const FlowNetwork& net)
{
    // Per segment, lay the job amounts out with McNaughton's wrap-around rule,
    // lowest id first. A job never exceeds the segment length, so its wrapped
    // pieces never share a slot.
    std::vector<std::vector<std::pair<JobId, Time>>> per_segment(net.segments.size());
    for (std::size_t i = 0; i < instance.size(); ++i)
        for (const auto& [s, e] : net.job_arcs[i])
            if (Time f = net.graph.flow(e); f > 0)
                per_segment[s].emplace_back(instance[i].id, f);

    PreemptiveSchedule schedule;
    for (std::size_t s = 0; s < net.segments.size(); ++s) {
        auto& amounts = per_segment[s];
        std::sort(amounts.begin(), amounts.end());
        const Time len = net.segments[s].length();
        const Time base = net.segments[s].begin;
        Time offset = 0;
        for (const auto& [id, amount] : amounts) {
            for (Time k = 0; k < amount; ++k) {
                schedule.assign(base + offset, id);
                offset = (offset + 1) % len;
            }
        }
    }
    for (auto& [t, ids] : schedule.slots)
        std::sort(ids.begin(), ids.end());
    return schedule;
}

}  // namespace

FeasibilityResult feasible_preemptive(const Instance& instance, int machines)
{
    FeasibilityResult result;
    if (instance.empty()) {
        result.feasible = true;
        result.witness = PreemptiveSchedule{};
        return result;
    }
    if (machines < 1)
        return result;
    FlowNetwork net(instance, machines);
    const auto flow = net.graph.run(net.source, net.sink);
    result.feasible = flow == instance.total_processing();
    if (result.feasible)
        result.witness = extract_witness(instance, net);
    return result;
}

bool optimum_at_least(const Instance& instance, int k)
{
    if (k <= 0)
        return true;
    if (k == 1)
        return !instance.empty();
    FlowNetwork net(instance, k - 1);
    return net.graph.run(net.source, net.sink) != instance.total_processing();
}

namespace {

bool flow_feasible(const Instance& instance, int machines)
{
    FlowNetwork net(instance, machines);
    return net.graph.run(net.source, net.sink) == instance.total_processing();
}

}  // namespace

int optimum_preemptive(const Instance& instance)
{
    if (instance.empty())
        return 0;
    Time dmax = instance.max_deadline();
    Time rmin = dmax;
    for (const auto& j : instance.jobs())
        rmin = std::min(rmin, j.release);
    const Time span = std::max<Time>(1, dmax - rmin);
    int lo = static_cast<int>(std::max<Time>(1, (instance.total_processing() + span - 1) / span));
    int hi = static_cast<int>(instance.size());
    if (lo > hi)
        lo = hi;
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        if (flow_feasible(instance, mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

Time contribution(const Job& job, const IntervalSet& iset)
{
    return std::max<Time>(0, iset.overlap(job.release, job.deadline) - job.laxity());
}

StrongDensity strong_density_exact(const Instance& instance, int slot_cap)
{
    std::vector<Time> occupied;
    for (const auto& j : instance.jobs())
        for (Time t = j.release; t < j.deadline; ++t)
            occupied.push_back(t);
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
    if (static_cast<int>(occupied.size()) > slot_cap || occupied.size() > 30)
        throw OracleCapExceeded("instance too large for exact enumeration (" +
                                std::to_string(occupied.size()) + " occupied slots, cap " +
                                std::to_string(slot_cap) + ")");
    StrongDensity best{Rational(0), IntervalSet{}};
    if (occupied.empty())
        return best;

    const std::size_t k = occupied.size();
    std::vector<std::uint32_t> window_mask(instance.size(), 0);
    std::vector<int> lax(instance.size());
    for (std::size_t i = 0; i < instance.size(); ++i) {
        for (std::size_t s = 0; s < k; ++s)
            if (instance[i].release <= occupied[s] && occupied[s] < instance[i].deadline)
                window_mask[i] |= std::uint32_t{1} << s;
        lax[i] = static_cast<int>(instance[i].laxity());
    }

    std::int64_t best_num = 0;
    std::int64_t best_den = 1;
    std::uint32_t best_mask = 0;
    const std::uint32_t full = (k == 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << k) - 1);
    for (std::uint32_t mask = 1; mask <= full && mask != 0; ++mask) {
        std::int64_t total = 0;
        for (std::size_t i = 0; i < window_mask.size(); ++i) {
            const int c = std::popcount(mask & window_mask[i]) - lax[i];
            if (c > 0)
                total += c;
        }
        const std::int64_t len = std::popcount(mask);
        if (total * best_den > best_num * len) {
            best_num = total;
            best_den = len;
            best_mask = mask;
        }
        if (mask == full)
            break;
    }
    std::vector<Time> chosen;
    for (std::size_t s = 0; s < k; ++s)
        if (best_mask & (std::uint32_t{1} << s))
            chosen.push_back(occupied[s]);
    best.value = Rational(best_num, best_den);
    best.argmax = IntervalSet::from_slots(chosen);
    return best;
}

bool check_strong_density_theorem(const Instance& instance, int slot_cap)
{
    const auto rho = strong_density_exact(instance, slot_cap);
    return ceil_rational(rho.value) == optimum_preemptive(instance);
}

namespace {

class NonpreemptiveSearch {
public:
    explicit NonpreemptiveSearch(const Instance& instance) : instance_(instance)
    {
        order_.resize(instance.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = instance[a];
            const auto& y = instance[b];
            return std::tie(x.deadline, x.release, x.processing, x.id) <
                   std::tie(y.deadline, y.release, y.processing, y.id);
        });
        profile_.assign(static_cast<std::size_t>(instance.max_deadline()), 0);
        starts_.assign(instance.size(), 0);
    }

    NonpreemptiveOptimum solve()
    {
        lower_ = optimum_preemptive(instance_);
        seed_incumbent();
        if (incumbent_ > lower_)
            dfs(0, 0);
        NonpreemptiveOptimum out;
        out.machines = incumbent_;
        for (std::size_t i = 0; i < instance_.size(); ++i)
            out.schedule.starts[instance_[i].id] = best_starts_[i];
        return out;
    }

private:
    int peak_over(Time s, Time p) const
    {
        int peak = 0;
        for (Time t = s; t < s + p; ++t)
            peak = std::max(peak, profile_[static_cast<std::size_t>(t)]);
        return peak;
    }

    void place(Time s, Time p, int delta)
    {
        for (Time t = s; t < s + p; ++t)
            profile_[static_cast<std::size_t>(t)] += delta;
    }

    void seed_incumbent()
    {
        // Greedy in deadline order, each job at the start that keeps the peak lowest.
        int peak = 0;
        for (std::size_t idx : order_) {
            const auto& j = instance_[idx];
            Time best_s = j.release;
            int best_peak = peak_over(j.release, j.processing) + 1;
            for (Time s = j.release + 1; s + j.processing <= j.deadline; ++s) {
                int pk = peak_over(s, j.processing) + 1;
                if (pk < best_peak) {
                    best_peak = pk;
                    best_s = s;
                }
            }
            starts_[idx] = best_s;
            place(best_s, j.processing, +1);
            peak = std::max(peak, best_peak);
        }
        incumbent_ = peak;
        best_starts_ = starts_;
        for (std::size_t idx : order_)
            place(starts_[idx], instance_[idx].processing, -1);
    }

    bool same_shape(std::size_t a, std::size_t b) const
    {
        const auto& x = instance_[a];
        const auto& y = instance_[b];
        return x.release == y.release && x.deadline == y.deadline && x.processing == y.processing;
    }

    bool forward_check(std::size_t depth) const
    {
        for (std::size_t k = depth; k < order_.size(); ++k) {
            const auto& j = instance_[order_[k]];
            bool any = false;
            for (Time s = j.release; s + j.processing <= j.deadline && !any; ++s)
                any = peak_over(s, j.processing) + 1 < incumbent_;
            if (!any)
                return false;
        }
        return true;
    }

    void dfs(std::size_t depth, int peak)
    {
        if (incumbent_ == lower_ || peak >= incumbent_)
            return;
        if (depth == order_.size()) {
            incumbent_ = peak;
            best_starts_ = starts_;
            return;
        }
        if (!forward_check(depth))
            return;
        const std::size_t idx = order_[depth];
        const auto& j = instance_[idx];
        Time first = j.release;
        if (depth > 0 && same_shape(order_[depth - 1], idx))
            first = starts_[order_[depth - 1]];

        std::vector<std::pair<int, Time>> candidates;
        for (Time s = first; s + j.processing <= j.deadline; ++s) {
            int pk = std::max(peak, peak_over(s, j.processing) + 1);
            if (pk < incumbent_)
                candidates.emplace_back(pk, s);
        }
        std::stable_sort(candidates.begin(), candidates.end());
        for (const auto& [pk, s] : candidates) {
            if (pk >= incumbent_)
                break;
            starts_[idx] = s;
            place(s, j.processing, +1);
            dfs(depth + 1, pk);
            place(s, j.processing, -1);
            if (incumbent_ == lower_)
                return;
        }
    }

    const Instance& instance_;
    std::vector<std::size_t> order_;
    std::vector<int> profile_;
    std::vector<Time> starts_;
    std::vector<Time> best_starts_;
    int incumbent_ = 0;
    int lower_ = 0;
};

}  // namespace

NonpreemptiveOptimum solve_nonpreemptive_exact(const Instance& instance, int job_cap)
{
    if (static_cast<int>(instance.size()) > job_cap)
        throw OracleCapExceeded("non-preemptive exact solver capped at " + std::to_string(job_cap) +
                                " jobs (got " + std::to_string(instance.size()) + ")");
    if (instance.empty())
        return {};
    return NonpreemptiveSearch(instance).solve();
}

int optimum_nonpreemptive_exact(const Instance& instance, int job_cap)
{
    return solve_nonpreemptive_exact(instance, job_cap).machines;
}

Rational density_equal_p(const Instance& released, Time p)
{
    if (released.empty())
        return Rational(0);
    std::vector<Time> starts{0};
    std::vector<Time> ends;
    for (const auto& j : released.jobs()) {
        starts.push_back(j.release);
        ends.push_back(j.deadline);
    }
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

    Rational best(0);
    for (Time a : starts) {
        for (Time b : ends) {
            if (b <= a)
                continue;
            std::int64_t count = 0;
            for (const auto& j : released.jobs())
                if (a <= j.release && j.deadline <= b)
                    ++count;
            Rational q(count * p, b - a);
            if (q > best)
                best = q;
        }
    }
    return best;
}

}  // namespace machmin
