#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "machmin/engine.hpp"
#include "machmin/optimum.hpp"

namespace machmin {

struct Pool {
    std::string name;
    std::unique_ptr<OnlinePolicy> policy;
};

/// Routes each job to one pool at release; pools run side by side on
/// disjoint machines.
class RoutedPolicy : public OnlinePolicy {
public:
    using Router = std::function<std::size_t(const SimView&, std::size_t)>;

    RoutedPolicy(std::string name, bool preemptive, std::vector<Pool> pools, Router router);

    std::string name() const override { return name_; }
    bool preemptive() const override { return preemptive_; }
    void on_release(std::size_t idx, const SimView& view) override;
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override;
    std::map<std::string, int> pool_peaks() const override;

    std::size_t owner(std::size_t idx) const { return owner_.at(idx); }
    std::size_t pool_count() const { return pools_.size(); }
    OnlinePolicy& pool(std::size_t k) { return *pools_[k].policy; }

private:
    std::string name_;
    bool preemptive_;
    std::vector<Pool> pools_;
    Router router_;
    std::map<std::size_t, std::size_t> owner_;
    std::vector<int> peaks_;
};

/// Loose jobs (by classify at release) go to pool 0, tight ones to pool 1.
std::unique_ptr<RoutedPolicy> make_split(std::string name, const Rational& alpha, bool preemptive,
                                         Pool loose, Pool tight);

// Double reduction

struct Epoch {
    Time start = 0;
    int m = 0;      // m(t_i)
    int block = 0;  // ceil(2 a m(t_i)) machines opened at t_i
    bool operator==(const Epoch&) const = default;
};

/// Epoch boundaries for an m(t) trace given as (t, m(t)) pairs in time order.
std::vector<Epoch> double_epochs(const std::vector<std::pair<Time, int>>& m_trace,
                                 const Rational& a);

struct DoubleCheck {
    Rational opened;  // sum of 2 a m(t_i)
    Rational bound;   // 4 a m(t_k)
    int opened_machines = 0;
    bool total_ok = false;
    bool epochs_ok = false;  // 2^{k-i} m(t_i) <= m(t_k) for every i
    bool ok() const { return total_ok && epochs_ok; }
};

DoubleCheck check_double(const std::vector<Epoch>& epochs, const Rational& a);

using PolicyFactory = std::function<std::unique_ptr<OnlinePolicy>(int m)>;
using OptimumOracle = std::function<int(const Instance&)>;

OptimumOracle preemptive_oracle();
OptimumOracle nonpreemptive_oracle(int job_cap = kDefaultNonpreemptiveCap);

class DoublePolicy : public OnlinePolicy {
public:
    DoublePolicy(std::string name, bool preemptive, Rational a, PolicyFactory factory,
                 OptimumOracle oracle);

    std::string name() const override;
    bool preemptive() const override { return preemptive_; }
    void on_release(std::size_t idx, const SimView& view) override;
    std::vector<std::size_t> select(const SimView& view,
                                    const std::vector<std::size_t>& active) override;
    int budget() const override;
    std::map<std::string, int> pool_peaks() const override;

    const std::vector<Epoch>& epochs() const { return epochs_; }
    const Rational& factor() const { return a_; }

private:
    std::string name_;
    bool preemptive_;
    Rational a_;
    PolicyFactory factory_;
    OptimumOracle oracle_;
    std::vector<Job> released_;
    std::vector<std::size_t> buffer_;
    std::vector<Epoch> epochs_;
    std::vector<std::unique_ptr<OnlinePolicy>> children_;
    std::map<std::size_t, std::size_t> owner_;
};

struct DoubleRun {
    SimulationRun run;
    std::vector<Epoch> epochs;
    Rational factor;
    DoubleCheck check;
};

DoubleRun double_wrap(const Instance& instance, const Rational& a, PolicyFactory factory,
                      bool preemptive, OptimumOracle oracle);

// Agreeable deadlines

SimulationRun agreeable_preemptive(const Instance& instance, int m,
                                   const Rational& alpha = Rational(1, 2));
DoubleRun agreeable_preemptive_online(const Instance& instance,
                                      const Rational& alpha = Rational(1, 2));

/// MediumFit needs even laxities, so the run may be on the instance doubled
/// (see SimulationRun::scale).
SimulationRun agreeable_nonpreemptive(const Instance& instance, int m,
                                      const Rational& alpha = Rational(1, 2));
DoubleRun agreeable_nonpreemptive_online(const Instance& instance,
                                         const Rational& alpha = Rational(1, 3),
                                         OptimumOracle oracle = nonpreemptive_oracle());

// Equal processing times

/// Number of multiples of p inside [r, d].
Time grid_points(const Job& job, Time p);
bool is_critical(const Job& job, Time p);
/// Window rounded inward to the grid: r up, d down.
std::pair<Time, Time> rounded_window(const Job& job, Time p);

SimulationRun equal_p_preemptive(const Instance& instance, int m);
SimulationRun equal_p_nonpreemptive_semi(const Instance& instance, int m);
DoubleRun equal_p_nonpreemptive_online(const Instance& instance,
                                       OptimumOracle oracle = nonpreemptive_oracle());

struct OfflineApprox {
    NonpreemptiveSchedule schedule;
    int machines = 0;
    int critical_machines = 0;
    int grid_machines = 0;
    std::optional<int> optimum;
};

/// Critical jobs start at release; non-critical jobs become unit jobs on the
/// grid, placed by EDF with the unit-job optimum as capacity.
OfflineApprox equal_p_offline_approx(const Instance& instance,
                                     int job_cap = kDefaultNonpreemptiveCap);

/// e rounded up, as used for the loose-job budget factor.
Rational euler_upper();
Rational equal_p_online_factor(const Rational& alpha);  // e (1+a)/(1-a)
Rational equal_p_online_bound(const Rational& alpha);   // factor + 1/a + 1

SimulationRun equal_p_online(const Instance& instance, const Rational& alpha = Rational(3, 10));

// Uniform deadline

SimulationRun uniform_deadline_preemptive(const Instance& instance, int m);
DoubleRun uniform_deadline_preemptive_online(const Instance& instance);
SimulationRun uniform_deadline_nonpreemptive(const Instance& instance, int m,
                                             const Rational& alpha = Rational(1, 3));
DoubleRun uniform_deadline_nonpreemptive_online(const Instance& instance,
                                                const Rational& alpha = Rational(1, 4),
                                                OptimumOracle oracle = nonpreemptive_oracle());

/// ceil(m / (1 - alpha)^2)
int loose_budget(const Rational& alpha, int m);

}  // namespace machmin
