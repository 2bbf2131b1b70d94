#include "machmin/composite.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace machmin {

namespace {

void require(bool condition, const char* what)
{
    if (!condition)
        throw std::invalid_argument(what);
}

Rational loose_factor(const Rational& alpha)
{
    const Rational one_minus = Rational(1) - alpha;
    return Rational(1) / (one_minus * one_minus);
}

std::vector<std::size_t> restrict_to(const std::vector<std::size_t>& active,
                                     const std::map<std::size_t, std::size_t>& owner,
                                     std::size_t k)
{
    std::vector<std::size_t> out;
    for (std::size_t i : active)
        if (auto it = owner.find(i); it != owner.end() && it->second == k)
            out.push_back(i);
    return out;
}

}  // namespace

RoutedPolicy::RoutedPolicy(std::string name, bool preemptive, std::vector<Pool> pools,
                           Router router)
    : name_(std::move(name)), preemptive_(preemptive), pools_(std::move(pools)),
      router_(std::move(router)), peaks_(pools_.size(), 0)
{
}

void RoutedPolicy::on_release(std::size_t idx, const SimView& view)
{
    const std::size_t k = router_(view, idx);
    owner_[idx] = k;
    pools_.at(k).policy->on_release(idx, view);
}

std::vector<std::size_t> RoutedPolicy::select(const SimView& view,
                                              const std::vector<std::size_t>& active)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < pools_.size(); ++k) {
        auto chosen = pools_[k].policy->select(view, restrict_to(active, owner_, k));
        peaks_[k] = std::max(peaks_[k], static_cast<int>(chosen.size()));
        out.insert(out.end(), chosen.begin(), chosen.end());
    }
    return out;
}

int RoutedPolicy::budget() const
{
    long long total = 0;
    for (const auto& p : pools_) {
        const int b = p.policy->budget();
        if (b == kUnbounded)
            return kUnbounded;
        total += b;
    }
    return static_cast<int>(total);
}

std::map<std::string, int> RoutedPolicy::pool_peaks() const
{
    std::map<std::string, int> out;
    for (std::size_t k = 0; k < pools_.size(); ++k) {
        out[pools_[k].name] = peaks_[k];
        for (const auto& [sub, v] : pools_[k].policy->pool_peaks())
            out[pools_[k].name + "/" + sub] = v;
    }
    return out;
}

std::unique_ptr<RoutedPolicy> make_split(std::string name, const Rational& alpha, bool preemptive,
                                         Pool loose, Pool tight)
{
    std::vector<Pool> pools;
    pools.push_back(std::move(loose));
    pools.push_back(std::move(tight));
    auto router = [alpha](const SimView& view, std::size_t idx) -> std::size_t {
        return classify(view.job(idx), alpha) == Tightness::Loose ? 0 : 1;
    };
    return std::make_unique<RoutedPolicy>(std::move(name), preemptive, std::move(pools), router);
}

// Double

namespace {

bool opens_epoch(const std::vector<Epoch>& epochs, int m)
{
    return epochs.empty() || m > 2 * epochs.back().m;
}

}  // namespace

std::vector<Epoch> double_epochs(const std::vector<std::pair<Time, int>>& m_trace,
                                 const Rational& a)
{
    std::vector<Epoch> out;
    for (const auto& [t, m] : m_trace)
        if (opens_epoch(out, m))
            out.push_back({t, m, static_cast<int>(ceil_times(a * Rational(2), m))});
    return out;
}

DoubleCheck check_double(const std::vector<Epoch>& epochs, const Rational& a)
{
    DoubleCheck c;
    c.opened = Rational(0);
    c.bound = Rational(0);
    c.total_ok = true;
    c.epochs_ok = true;
    if (epochs.empty())
        return c;
    const int mk = epochs.back().m;
    const std::size_t k = epochs.size() - 1;
    for (std::size_t i = 0; i <= k; ++i) {
        c.opened += Rational(2) * a * Rational(epochs[i].m);
        c.opened_machines += epochs[i].block;
        __int128 lhs = epochs[i].m;
        for (std::size_t s = i; s < k && lhs <= mk; ++s)
            lhs *= 2;
        if (lhs > mk)
            c.epochs_ok = false;
    }
    c.bound = Rational(4) * a * Rational(mk);
    c.total_ok = c.opened <= c.bound;
    return c;
}

OptimumOracle preemptive_oracle()
{
    return [](const Instance& inst) { return optimum_preemptive(inst); };
}

OptimumOracle nonpreemptive_oracle(int job_cap)
{
    return [job_cap](const Instance& inst) { return optimum_nonpreemptive_exact(inst, job_cap); };
}

DoublePolicy::DoublePolicy(std::string name, bool preemptive, Rational a, PolicyFactory factory,
                           OptimumOracle oracle)
    : name_(std::move(name)), preemptive_(preemptive), a_(a), factory_(std::move(factory)),
      oracle_(std::move(oracle))
{
}

std::string DoublePolicy::name() const
{
    return "double(a=" + to_string(a_) + ")[" + name_ + "]";
}

void DoublePolicy::on_release(std::size_t idx, const SimView&)
{
    buffer_.push_back(idx);
}

std::vector<std::size_t> DoublePolicy::select(const SimView& view,
                                              const std::vector<std::size_t>& active)
{
    // m(t) is evaluated once all of this slot's releases have arrived.
    if (!buffer_.empty()) {
        for (std::size_t idx : buffer_)
            released_.push_back(view.job(idx));
        const int mt = oracle_(Instance(released_));
        if (opens_epoch(epochs_, mt)) {
            epochs_.push_back({view.now(), mt, static_cast<int>(ceil_times(a_ * Rational(2), mt))});
            children_.push_back(factory_(2 * mt));
        }
        for (std::size_t idx : buffer_) {
            owner_[idx] = children_.size() - 1;
            children_.back()->on_release(idx, view);
        }
        buffer_.clear();
    }
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < children_.size(); ++k) {
        auto chosen = children_[k]->select(view, restrict_to(active, owner_, k));
        out.insert(out.end(), chosen.begin(), chosen.end());
    }
    return out;
}

int DoublePolicy::budget() const
{
    int total = 0;
    for (const auto& e : epochs_)
        total += e.block;
    return total;
}

std::map<std::string, int> DoublePolicy::pool_peaks() const
{
    return {{"opened", budget()}, {"epochs", static_cast<int>(epochs_.size())}};
}

DoubleRun double_wrap(const Instance& instance, const Rational& a, PolicyFactory factory,
                      bool preemptive, OptimumOracle oracle)
{
    DoublePolicy policy("wrapped", preemptive, a, std::move(factory), std::move(oracle));
    DoubleRun out;
    out.run = simulate(instance, policy);
    out.epochs = policy.epochs();
    out.factor = a;
    out.check = check_double(out.epochs, a);
    return out;
}

int loose_budget(const Rational& alpha, int m)
{
    return static_cast<int>(ceil_times(loose_factor(alpha), m));
}

// Agreeable deadlines

namespace {

std::unique_ptr<RoutedPolicy> agreeable_preemptive_policy(const Rational& alpha, int m)
{
    const int tight = static_cast<int>(ceil_times(Rational(4) / alpha + Rational(6), m));
    return make_split("agreeable-p", alpha, true,
                      {"loose", std::make_unique<EdfPolicy>(loose_budget(alpha, m))},
                      {"tight", std::make_unique<LlfPolicy>(tight)});
}

DoubleRun finish_double(SimulationRun run, const DoublePolicy& inner)
{
    DoubleRun out;
    out.run = std::move(run);
    out.epochs = inner.epochs();
    out.factor = inner.factor();
    out.check = check_double(out.epochs, out.factor);
    return out;
}

}  // namespace

SimulationRun agreeable_preemptive(const Instance& instance, int m, const Rational& alpha)
{
    require(instance.is_agreeable(), "instance does not have agreeable deadlines");
    auto policy = agreeable_preemptive_policy(alpha, m);
    return simulate(instance, *policy);
}

DoubleRun agreeable_preemptive_online(const Instance& instance, const Rational& alpha)
{
    require(instance.is_agreeable(), "instance does not have agreeable deadlines");
    const Rational a = loose_factor(alpha) + Rational(4) / alpha + Rational(6);
    return double_wrap(
        instance, a,
        [alpha](int mp) -> std::unique_ptr<OnlinePolicy> { return agreeable_preemptive_policy(alpha, mp); },
        true, preemptive_oracle());
}

SimulationRun agreeable_nonpreemptive(const Instance& instance, int m, const Rational& alpha)
{
    require(instance.is_agreeable(), "instance does not have agreeable deadlines");
    Time scale = 1;
    const Instance scaled = prescale_for_medium_fit(instance, scale);
    auto policy = make_split("agreeable-np", alpha, false,
                             {"loose", std::make_unique<NonpreemptiveEdfPolicy>(loose_budget(alpha, m))},
                             {"tight", std::make_unique<MediumFitPolicy>()});
    auto run = simulate(scaled, *policy);
    run.scale = scale;
    return run;
}

DoubleRun agreeable_nonpreemptive_online(const Instance& instance, const Rational& alpha,
                                         OptimumOracle oracle)
{
    require(instance.is_agreeable(), "instance does not have agreeable deadlines");
    Time scale = 1;
    const Instance scaled = prescale_for_medium_fit(instance, scale);
    const Rational a = loose_factor(alpha);
    auto inner = std::make_unique<DoublePolicy>(
        "edf-np", false, a,
        [a](int mp) -> std::unique_ptr<OnlinePolicy> {
            return std::make_unique<NonpreemptiveEdfPolicy>(static_cast<int>(ceil_times(a, mp)));
        },
        std::move(oracle));
    const DoublePolicy& handle = *inner;
    auto policy = make_split("agreeable-np-online", alpha, false, {"loose", std::move(inner)},
                             {"tight", std::make_unique<MediumFitPolicy>()});
    auto run = simulate(scaled, *policy);
    run.scale = scale;
    return finish_double(std::move(run), handle);
}

// Equal processing times

Time grid_points(const Job& job, Time p)
{
    const Time first = (job.release + p - 1) / p;
    const Time last = job.deadline / p;
    return std::max<Time>(0, last - first + 1);
}

bool is_critical(const Job& job, Time p)
{
    return grid_points(job, p) == 1;
}

std::pair<Time, Time> rounded_window(const Job& job, Time p)
{
    return {(job.release + p - 1) / p * p, job.deadline / p * p};
}

namespace {

Time common_p(const Instance& instance)
{
    require(instance.is_equal_processing(), "processing times are not all equal");
    return instance.empty() ? 1 : instance[0].processing;
}

/// Non-critical jobs on a fixed block: at each multiple of p, up to `machines`
/// pending rounded jobs start by EDF on the rounded deadlines.
class GridBatchPolicy : public OnlinePolicy {
public:
    GridBatchPolicy(int machines, Time p) : machines_(machines), p_(p) {}

    std::string name() const override
    {
        return "grid-edf(m'=" + std::to_string(machines_) + ",p=" + std::to_string(p_) + ")";
    }
    bool preemptive() const override { return false; }
    int budget() const override { return machines_; }

    void on_release(std::size_t idx, const SimView& view) override
    {
        const auto [r, d] = rounded_window(view.job(idx), p_);
        pending_.push_back({idx, r, d});
    }

    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override
    {
        std::vector<std::size_t> out;
        for (std::size_t i : active)
            if (view.running(i))
                out.push_back(i);
        if (view.now() % p_ != 0)
            return out;

        const std::set<std::size_t> live(active.begin(), active.end());
        std::erase_if(pending_, [&](const Entry& e) { return !live.count(e.idx); });
        std::vector<Entry> ready;
        for (const auto& e : pending_)
            if (e.release <= view.now())
                ready.push_back(e);
        std::sort(ready.begin(), ready.end(), [&](const Entry& a, const Entry& b) {
            const auto& ja = view.job(a.idx);
            const auto& jb = view.job(b.idx);
            return std::tie(a.deadline, ja.release, ja.id) < std::tie(b.deadline, jb.release, jb.id);
        });
        const int free = machines_ - static_cast<int>(out.size());
        std::set<std::size_t> started;
        for (int k = 0; k < free && k < static_cast<int>(ready.size()); ++k) {
            out.push_back(ready[static_cast<std::size_t>(k)].idx);
            started.insert(ready[static_cast<std::size_t>(k)].idx);
        }
        std::erase_if(pending_, [&](const Entry& e) { return started.count(e.idx); });
        return out;
    }

private:
    struct Entry {
        std::size_t idx;
        Time release;
        Time deadline;
    };
    int machines_;
    Time p_;
    std::vector<Entry> pending_;
};

RoutedPolicy::Router critical_router(Time p)
{
    return [p](const SimView& view, std::size_t idx) -> std::size_t {
        return is_critical(view.job(idx), p) ? 0 : 1;
    };
}

}  // namespace

SimulationRun equal_p_preemptive(const Instance& instance, int m)
{
    common_p(instance);
    EdfPolicy edf(3 * m);
    return simulate(instance, edf);
}

SimulationRun equal_p_nonpreemptive_semi(const Instance& instance, int m)
{
    const Time p = common_p(instance);
    std::vector<Pool> pools;
    pools.push_back({"critical", std::make_unique<EarlyFitPolicy>()});
    pools.push_back({"grid", std::make_unique<GridBatchPolicy>(2 * m, p)});
    RoutedPolicy policy("equalp-semi", false, std::move(pools), critical_router(p));
    return simulate(instance, policy);
}

DoubleRun equal_p_nonpreemptive_online(const Instance& instance, OptimumOracle oracle)
{
    const Time p = common_p(instance);
    auto inner = std::make_unique<DoublePolicy>(
        "grid-edf", false, Rational(2),
        [p](int mp) -> std::unique_ptr<OnlinePolicy> { return std::make_unique<GridBatchPolicy>(2 * mp, p); },
        std::move(oracle));
    const DoublePolicy& handle = *inner;
    std::vector<Pool> pools;
    pools.push_back({"critical", std::make_unique<EarlyFitPolicy>()});
    pools.push_back({"grid", std::move(inner)});
    RoutedPolicy policy("equalp-online-np", false, std::move(pools), critical_router(p));
    auto run = simulate(instance, policy);
    return finish_double(std::move(run), handle);
}

OfflineApprox equal_p_offline_approx(const Instance& instance, int job_cap)
{
    const Time p = common_p(instance);
    OfflineApprox out;
    std::vector<Job> critical;
    std::vector<Job> units;
    for (const auto& j : instance.jobs()) {
        if (is_critical(j, p)) {
            critical.push_back(j);
            out.schedule.starts[j.id] = j.release;
        } else {
            const auto [r, d] = rounded_window(j, p);
            units.push_back({j.id, r / p, d / p, 1});
        }
    }
    NonpreemptiveSchedule crit_only;
    for (const auto& j : critical)
        crit_only.starts[j.id] = j.release;
    out.critical_machines = crit_only.machines_used(Instance(critical));

    const Instance unit_instance(units);
    int mu = optimum_preemptive(unit_instance);
    for (;; ++mu) {
        EdfPolicy edf(mu);
        auto run = simulate(unit_instance, edf);
        if (run.ok()) {
            for (const auto& [slot, ids] : run.schedule.slots)
                for (JobId id : ids)
                    out.schedule.starts[id] = slot * p;
            out.grid_machines = run.machines_used;
            break;
        }
    }
    out.machines = out.schedule.machines_used(instance);
    if (static_cast<int>(instance.size()) <= job_cap)
        out.optimum = optimum_nonpreemptive_exact(instance, job_cap);
    return out;
}

Rational euler_upper()
{
    return Rational(2718282, 1000000);
}

Rational equal_p_online_factor(const Rational& alpha)
{
    return euler_upper() * (Rational(1) + alpha) / (Rational(1) - alpha);
}

Rational equal_p_online_bound(const Rational& alpha)
{
    return equal_p_online_factor(alpha) + Rational(1) / alpha + Rational(1);
}

namespace {

/// Tight jobs start at release; loose jobs share an EDF pool sized by the
/// running density of everything released so far. The pool never shrinks.
class EqualPOnlinePolicy : public OnlinePolicy {
public:
    EqualPOnlinePolicy(Rational alpha, Time p)
        : alpha_(alpha), c_(equal_p_online_factor(alpha)), p_(p)
    {
    }

    std::string name() const override { return "equalp-online(alpha=" + to_string(alpha_) + ")"; }
    int budget() const override { return kUnbounded; }

    void on_release(std::size_t idx, const SimView& view) override
    {
        released_.push_back(view.job(idx));
        tight_[idx] = classify(view.job(idx), alpha_) == Tightness::Tight;
        dirty_ = true;
    }

    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override
    {
        if (dirty_) {
            const Rational rho = density_equal_p(Instance(released_), p_);
            loose_budget_ = std::max<int>(loose_budget_, static_cast<int>(ceil_rational(c_ * rho)));
            dirty_ = false;
        }
        std::vector<std::size_t> out;
        std::vector<std::size_t> loose;
        for (std::size_t i : active)
            (tight_.at(i) ? out : loose).push_back(i);
        tight_peak_ = std::max(tight_peak_, static_cast<int>(out.size()));
        auto chosen = edf_select(view, std::move(loose), loose_budget_);
        loose_peak_ = std::max(loose_peak_, static_cast<int>(chosen.size()));
        out.insert(out.end(), chosen.begin(), chosen.end());
        return out;
    }

    std::map<std::string, int> pool_peaks() const override
    {
        return {{"tight", tight_peak_}, {"loose", loose_peak_}, {"loose/budget", loose_budget_}};
    }

private:
    Rational alpha_;
    Rational c_;
    Time p_;
    std::vector<Job> released_;
    std::map<std::size_t, bool> tight_;
    bool dirty_ = false;
    int loose_budget_ = 0;
    int tight_peak_ = 0;
    int loose_peak_ = 0;
};

}  // namespace

SimulationRun equal_p_online(const Instance& instance, const Rational& alpha)
{
    const Time p = common_p(instance);
    EqualPOnlinePolicy policy(alpha, p);
    return simulate(instance, policy);
}

// Uniform deadline

SimulationRun uniform_deadline_preemptive(const Instance& instance, int m)
{
    require(instance.is_uniform_deadline(), "deadlines are not uniform");
    LlfPolicy llf(m);
    return simulate(instance, llf);
}

DoubleRun uniform_deadline_preemptive_online(const Instance& instance)
{
    require(instance.is_uniform_deadline(), "deadlines are not uniform");
    return double_wrap(
        instance, Rational(1),
        [](int mp) -> std::unique_ptr<OnlinePolicy> { return std::make_unique<LlfPolicy>(mp); }, true,
        preemptive_oracle());
}

SimulationRun uniform_deadline_nonpreemptive(const Instance& instance, int m, const Rational& alpha)
{
    require(instance.is_uniform_deadline(), "deadlines are not uniform");
    auto policy = make_split("uniform-np", alpha, false,
                             {"loose", std::make_unique<NonpreemptiveEdfPolicy>(loose_budget(alpha, m))},
                             {"tight", std::make_unique<EarlyFitPolicy>()});
    return simulate(instance, *policy);
}

DoubleRun uniform_deadline_nonpreemptive_online(const Instance& instance, const Rational& alpha,
                                                OptimumOracle oracle)
{
    require(instance.is_uniform_deadline(), "deadlines are not uniform");
    const Rational a = loose_factor(alpha);
    auto inner = std::make_unique<DoublePolicy>(
        "edf-np", false, a,
        [a](int mp) -> std::unique_ptr<OnlinePolicy> {
            return std::make_unique<NonpreemptiveEdfPolicy>(static_cast<int>(ceil_times(a, mp)));
        },
        std::move(oracle));
    const DoublePolicy& handle = *inner;
    auto policy = make_split("uniform-np-online", alpha, false, {"loose", std::move(inner)},
                             {"tight", std::make_unique<EarlyFitPolicy>()});
    auto run = simulate(instance, *policy);
    return finish_double(std::move(run), handle);
}

}  // namespace machmin
