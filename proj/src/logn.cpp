#include "machmin/logn.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include <boost/multiprecision/cpp_int.hpp>

#include "machmin/optimum.hpp"

namespace machmin {

Rational laxity_floor()
{
    return Rational(355, 1000);
}

bool becomes_safe(const JobState& state, Time t, const Rational& alpha)
{
    return Rational(state.remaining) <= alpha * Rational(state.job.deadline - t);
}

Job residue(const JobState& state, Time t)
{
    return {state.job.id, t, state.job.deadline, state.remaining};
}

std::vector<std::vector<std::size_t>> build_groups(const std::vector<JobState>& critical, Time t)
{
    std::vector<std::size_t> order(critical.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = critical[a].job;
        const auto& y = critical[b].job;
        return std::make_tuple(-x.deadline, x.release, x.id) < std::make_tuple(-y.deadline, y.release, y.id);
    });

    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> anchor;  // earliest-deadline member so far
    for (std::size_t pos : order) {
        const Time window = critical[pos].job.deadline - t;
        bool placed = false;
        for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
            if (window <= laxity(critical[anchor[g]], t)) {
                groups[g].push_back(pos);
                anchor[g] = pos;
                placed = true;
            }
        }
        if (!placed) {
            groups.push_back({pos});
            anchor.push_back(pos);
        }
    }
    return groups;
}

std::vector<std::vector<std::size_t>> split_group(const std::vector<Job>& group, int mu)
{
    std::vector<std::size_t> order(group.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(group[a].deadline, group[a].release, group[a].id) <
               std::tie(group[b].deadline, group[b].release, group[b].id);
    });
    const auto k = static_cast<std::size_t>(std::max(1, mu));
    std::vector<std::vector<std::size_t>> out(std::min(k, group.size()));
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        out[rank % k].push_back(order[rank]);
    return out;
}

int choose_mu(std::size_t n, const Rational& alpha)
{
    using boost::multiprecision::cpp_int;
    const cpp_int a = alpha.numerator();
    const cpp_int b = alpha.denominator();
    const cpp_int n2 = cpp_int(n) * cpp_int(n);
    cpp_int lhs = (b - a) * n2;  // (b-a)^mu n^2
    cpp_int rhs = b;             // b^mu
    int mu = 1;
    while (lhs > rhs) {
        lhs *= (b - a);
        rhs *= b;
        ++mu;
    }
    return mu;
}

LognPolicy::LognPolicy(const Rational& alpha, bool monitor_h) : alpha_(alpha), monitor_h_(monitor_h)
{
    if (alpha <= Rational(0) || alpha >= Rational(1))
        throw std::invalid_argument("alpha must lie in (0, 1)");
}

std::string LognPolicy::name() const
{
    return "logn(alpha=" + to_string(alpha_) + ")";
}

void LognPolicy::on_release(std::size_t idx, const SimView&)
{
    if (safe_.size() <= idx)
        safe_.resize(idx + 1, false);
    released_now_ = true;
}

void LognPolicy::reclassify(const SimView& view)
{
    const Time t = view.now();
    bool grew = false;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& s = view.state(i);
        if (safe_[i] || s.remaining == 0 || t >= s.job.deadline)
            continue;
        if (!becomes_safe(s, t, alpha_))
            continue;
        safe_[i] = true;
        residues_.push_back(residue(s, t));
        grew = true;
        const Time l0 = s.job.laxity();
        if (l0 > 0) {
            const Rational ratio(view.laxity(i), l0);
            monitor_.min_safe_entry_ratio = std::min(monitor_.min_safe_entry_ratio, ratio);
            if (ratio < laxity_floor())
                ++monitor_.safe_entry_violations;
        }
    }
    if (grew) {
        monitor_.safe_optimum = optimum_preemptive(Instance(residues_));
        const Rational one_minus = Rational(1) - alpha_;
        const int need = static_cast<int>(
            ceil_times(Rational(1) / (one_minus * one_minus), monitor_.safe_optimum));
        safe_budget_ = std::max(safe_budget_, need);
    }
}

void LognPolicy::rebuild(const SimView& view)
{
    const Time t = view.now();
    std::vector<std::size_t> crit;
    std::vector<JobState> states;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& s = view.state(i);
        if (!safe_[i] && s.remaining > 0 && t < s.job.deadline) {
            crit.push_back(i);
            states.push_back(s);
        }
    }
    const auto groups = build_groups(states, t);
    const int mu = choose_mu(view.size(), alpha_);
    const int h = static_cast<int>(groups.size());

    subgroups_.clear();
    for (const auto& g : groups) {
        std::vector<Job> jobs;
        for (std::size_t pos : g)
            jobs.push_back(states[pos].job);
        for (const auto& sub : split_group(jobs, mu)) {
            std::vector<std::size_t> members;
            for (std::size_t k : sub)
                members.push_back(crit[g[k]]);
            subgroups_.push_back(std::move(members));
        }
    }
    critical_alloc_ = std::max(critical_alloc_, h * mu);
    monitor_.max_h = std::max(monitor_.max_h, h);
    monitor_.max_mu = std::max(monitor_.max_mu, mu);

    RebuildRecord rec{t, h, mu, static_cast<int>(crit.size()), 0, true};
    if (monitor_h_ && h > 1) {
        // h <= 1 + (2 + 2/alpha) M  <=>  M >= ceil((h - 1) / (2 + 2/alpha))
        rec.needed = static_cast<int>(
            ceil_rational(Rational(h - 1) / (Rational(2) + Rational(2) / alpha_)));
        std::vector<Job> hat;
        for (const auto& s : states)
            if (laxity(s, t) >= 0)
                hat.push_back(residue(s, t));
        rec.ok = optimum_at_least(Instance(hat), rec.needed);
        if (!rec.ok)
            ++monitor_.h_bound_violations;
    }
    monitor_.rebuilds.push_back(rec);
}

void LognPolicy::check_laxity_floor(const SimView& view)
{
    const Time t = view.now();
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& s = view.state(i);
        if (safe_[i] || s.remaining == 0 || t >= s.job.deadline || s.job.laxity() == 0)
            continue;
        const Rational ratio(view.laxity(i), s.job.laxity());
        monitor_.min_laxity_ratio = std::min(monitor_.min_laxity_ratio, ratio);
        if (ratio < laxity_floor())
            ++monitor_.laxity_floor_violations;
    }
}

std::vector<std::size_t> LognPolicy::select(const SimView& view,
                                            const std::vector<std::size_t>& active)
{
    if (safe_.size() < view.size())
        safe_.resize(view.size(), false);
    reclassify(view);
    if (released_now_) {
        rebuild(view);
        released_now_ = false;
    } else {
        for (auto& sub : subgroups_)
            std::erase_if(sub, [&](std::size_t i) { return safe_[i] || view.remaining(i) == 0; });
    }
    check_laxity_floor(view);

    std::vector<bool> is_active(view.size(), false);
    std::vector<std::size_t> safe_active;
    for (std::size_t i : active) {
        is_active[i] = true;
        if (safe_[i])
            safe_active.push_back(i);
    }
    auto out = edf_select(view, std::move(safe_active), safe_budget_);
    safe_peak_ = std::max(safe_peak_, static_cast<int>(out.size()));

    int critical_used = 0;
    for (const auto& sub : subgroups_) {
        std::vector<std::size_t> live;
        for (std::size_t i : sub)
            if (is_active[i] && !safe_[i])
                live.push_back(i);
        for (std::size_t i : edf_select(view, std::move(live), 1)) {
            out.push_back(i);
            ++critical_used;
        }
    }
    critical_peak_ = std::max(critical_peak_, critical_used);
    monitor_.safe_machines = safe_budget_;
    monitor_.critical_machines = critical_alloc_;
    return out;
}

std::map<std::string, int> LognPolicy::pool_peaks() const
{
    return {{"safe", safe_peak_},
            {"critical", critical_peak_},
            {"safe/budget", safe_budget_},
            {"critical/alloc", critical_alloc_}};
}

LognRun logn_schedule(const Instance& instance, const Rational& alpha, bool monitor_h)
{
    LognPolicy policy(alpha, monitor_h);
    LognRun out;
    out.run = simulate(instance, policy);
    out.monitor = policy.monitor();
    return out;
}

Rational logn_constant(int machines_used, int m, std::size_t n)
{
    std::int64_t log2n = 1;
    while ((std::size_t{1} << log2n) < n)
        ++log2n;
    return Rational(machines_used, std::max<std::int64_t>(1, m * log2n));
}

// Laxity transforms

TransformKind parse_transform_kind(const std::string& text)
{
    if (text == "beta")
        return TransformKind::ScaleLaxity;
    if (text == "left")
        return TransformKind::LeftPart;
    if (text == "right")
        return TransformKind::RightPart;
    if (text == "lshort")
        return TransformKind::LeftShortened;
    if (text == "rshort")
        return TransformKind::RightShortened;
    throw std::invalid_argument("unknown transform kind '" + text + "'");
}

std::string to_string(TransformKind kind)
{
    switch (kind) {
    case TransformKind::ScaleLaxity:
        return "beta";
    case TransformKind::LeftPart:
        return "left";
    case TransformKind::RightPart:
        return "right";
    case TransformKind::LeftShortened:
        return "lshort";
    case TransformKind::RightShortened:
        return "rshort";
    }
    return "?";
}

namespace {

Time times(const Rational& q, Time x)
{
    const Rational v = q * Rational(x);
    if (v.denominator() != 1)
        throw std::logic_error("transform produced a fractional time");
    return v.numerator();
}

}  // namespace

TransformResult transform(const Instance& instance, const TransformSpec& spec)
{
    const Rational q = spec.param;
    if (q <= Rational(0) || q > Rational(1))
        throw std::invalid_argument("transform parameter must lie in (0, 1]");

    const Rational one(1);
    const Rational drop = one - q;                 // (1 - q)
    const Rational split = one - q / Rational(2);  // (1 - q/2)
    std::vector<Rational> coeffs{drop};
    if (spec.kind == TransformKind::LeftPart || spec.kind == TransformKind::RightPart)
        coeffs.push_back(split);
    // Smallest factor making every coeff * laxity integral on this instance.
    Time scale = 1;
    for (const auto& job : instance.jobs())
        for (const auto& c : coeffs)
            scale = std::lcm(scale, (c * Rational(job.laxity())).denominator());

    TransformResult out;
    out.scale = scale;
    std::vector<Job> jobs;
    for (const auto& original : instance.jobs()) {
        const Job j{original.id, original.release * scale, original.deadline * scale,
                    original.processing * scale};
        const Time l = j.laxity();
        Job t = j;
        switch (spec.kind) {
        case TransformKind::ScaleLaxity:
            t.processing = j.processing + times(drop, l);
            break;
        case TransformKind::LeftPart:
            t.deadline = j.release + times(split, l);
            t.processing = times(drop, l);
            break;
        case TransformKind::RightPart:
            t.release = j.release + times(split, l);
            break;
        case TransformKind::LeftShortened:
            t.deadline = j.deadline - times(drop, l);
            break;
        case TransformKind::RightShortened:
            t.release = j.release + times(drop, l);
            break;
        }
        if (t.processing == 0) {
            out.dropped.push_back(j.id);
            continue;
        }
        jobs.push_back(t);
    }
    out.instance = Instance(std::move(jobs));
    return out;
}

}  // namespace machmin
