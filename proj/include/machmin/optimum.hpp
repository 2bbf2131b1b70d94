#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "machmin/flow.hpp"
#include "machmin/model.hpp"
#include "machmin/rational.hpp"

namespace machmin {

/// Raised when an exact enumeration oracle is asked to go beyond its cap.
class OracleCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pairwise-disjoint closed intervals [a, b] with integer endpoints, a < b,
/// sorted ascending. Touching intervals are kept separate.
class IntervalSet {
public:
    struct Interval {
        Time begin;
        Time end;
    };

    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> intervals);

    /// Maximal runs of the given unit slots [t, t+1).
    static IntervalSet from_slots(const std::vector<Time>& slots);

    const std::vector<Interval>& intervals() const { return intervals_; }
    Time length() const;
    /// |(union) ∩ [a, b]|
    Time overlap(Time a, Time b) const;

private:
    std::vector<Interval> intervals_;
};

/// Horn's network with time compressed into maximal segments between event
/// points: source -> job (p_j), job -> segment (segment length, if inside the
/// window), segment -> sink (m * length).
struct FlowNetwork {
    struct Segment {
        Time begin;
        Time end;
        Time length() const { return end - begin; }
    };

    FlowNetwork(const Instance& instance, int machines);

    std::vector<Segment> segments;
    MaxFlow graph;
    int source = 0;
    int sink = 0;
    /// per job (instance order): (segment index, edge handle)
    std::vector<std::vector<std::pair<std::size_t, int>>> job_arcs;
};

struct FeasibilityResult {
    bool feasible = false;
    std::optional<PreemptiveSchedule> witness;
};

FeasibilityResult feasible_preemptive(const Instance& instance, int machines);

/// m(J) via binary search on the flow oracle. Returns 0 for an empty instance.
int optimum_preemptive(const Instance& instance);

/// true iff m(J) >= k; a single flow computation.
bool optimum_at_least(const Instance& instance, int k);

/// max{0, |(union) ∩ Q_j| - laxity_j}
Time contribution(const Job& job, const IntervalSet& iset);

struct StrongDensity {
    Rational value;
    IntervalSet argmax;
};

inline constexpr int kDefaultSlotCap = 20;
inline constexpr int kDefaultNonpreemptiveCap = 12;

/// Exact strong density by enumerating subsets of occupied unit slots.
StrongDensity strong_density_exact(const Instance& instance, int slot_cap = kDefaultSlotCap);

/// ceil(strong density) == m(J)
bool check_strong_density_theorem(const Instance& instance, int slot_cap = kDefaultSlotCap);

/// Exact non-preemptive optimum by branch-and-bound over start times.
int optimum_nonpreemptive_exact(const Instance& instance, int job_cap = kDefaultNonpreemptiveCap);

struct NonpreemptiveOptimum {
    int machines = 0;
    NonpreemptiveSchedule schedule;
};
NonpreemptiveOptimum solve_nonpreemptive_exact(const Instance& instance,
                                               int job_cap = kDefaultNonpreemptiveCap);

/// p * max over [a, b] (a in releases ∪ {0}, b in deadlines) of
/// |{j : [r_j, d_j] ⊆ [a, b]}| / (b - a). Lower bound on m for equal p.
Rational density_equal_p(const Instance& released, Time p);

}  // namespace machmin
