#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "machmin/engine.hpp"
#include "machmin/model.hpp"
#include "machmin/rational.hpp"

namespace machmin {

/// Rejected generator parameters; the message names the failing quantity.
class GeneratorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// LLF lower bound

struct LlfLowerBound {
    Instance instance;
    int m = 0;
    int c = 0;
    int k = 0;
    /// LLF runs on c_hat * m = c * m / 2 machines.
    int llf_machines = 0;
    Time x0 = 0;
    bool certified = false;
};

/// Round r = 0..k-1 starts at T_r = x0 * sum_{i<r} c^-i and releases m/2
/// tight jobs (p = x0 / c^r, deadline c^{k+3}) plus c(c-1) waves of c*m/2
/// loose jobs (p = x_{r+1}, window c * x_{r+1}).
LlfLowerBound gen_llf_lower_bound(int m, int c, int k);

// Deadline-ordered family

struct DeadlineOrderedFamily {
    int m = 0;
    int n = 0;
    Time scale = 1;  // (m-1)^{n-m}
    std::vector<Instance> members;  // J_1 .. J_{n-m}
    /// Flow-oracle certificate per member: feasible on m machines.
    std::vector<bool> certified;
};

/// Throws GeneratorError when scaled values do not fit in 62 bits.
DeadlineOrderedFamily gen_deadline_ordered_family(int m, int n);

// 8/7 game

struct PhaseRecord {
    Time start = 0;
    Time residue_before = 0;  // W_A(t)
    Time due_at_check = 0;    // remaining work due t+3, observed at t+2
    std::optional<Time> residue_after;  // W_A(t+3) if the phase completed
    bool certified = false;
};

struct GameOutcome {
    std::string policy;
    int m = 0;
    Rational c;
    int budget = 0;
    bool forced_release = false;
    bool missed = false;
    std::optional<Miss> first_miss;
    std::vector<PhaseRecord> phases;
    /// 4m(1 - 7c/8)
    Rational growth_bound;
    bool growth_ok = true;
    bool all_certified = true;
    int phase_limit = 0;
    Instance instance;
};

/// Plays the adaptive adversary with p = 2 against `policy`, whose budget
/// should be floor(c m).
GameOutcome play_eight_sevenths(OnlinePolicy& policy, int m, const Rational& c);

// Random instances

enum class Profile { General, Agreeable, EqualP, UniformDeadline, Loose, Tight };

Profile parse_profile(const std::string& text);
std::string to_string(Profile profile);

struct RandomSpec {
    Profile profile = Profile::General;
    std::size_t n = 8;
    std::uint64_t seed = 1;
    Time horizon = 16;
    Time max_p = 6;
    Time p = 2;  // equal-p
    Rational alpha{1, 2};
};

/// mt19937_64 with a portable bounded mapping (rejection sampling), so
/// streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform integer in [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 engine_;
};

Instance gen_random(const RandomSpec& spec);

struct GeneratedInstance {
    Instance instance;
    Profile profile = Profile::General;
    int optimum = 0;
};

GeneratedInstance gen_random_annotated(const RandomSpec& spec);

}  // namespace machmin
