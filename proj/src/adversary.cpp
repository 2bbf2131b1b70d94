#include "machmin/adversary.hpp"

#include <algorithm>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "machmin/optimum.hpp"

namespace machmin {

using boost::multiprecision::cpp_int;

namespace {

constexpr int kMaxBits = 62;

Time checked(const cpp_int& v, const std::string& what)
{
    if (v < 0 || msb(v) >= kMaxBits)
        throw GeneratorError(what + " needs " + std::to_string(v <= 0 ? 0 : msb(v) + 1) +
                             " bits (limit " + std::to_string(kMaxBits) + ")");
    return static_cast<Time>(v);
}

cpp_int ipow(std::int64_t base, int e)
{
    cpp_int out = 1;
    for (int i = 0; i < e; ++i)
        out *= base;
    return out;
}

}  // namespace

LlfLowerBound gen_llf_lower_bound(int m, int c, int k)
{
    if (m < 2 || m % 2 != 0)
        throw GeneratorError("m must be even and positive (got " + std::to_string(m) + ")");
    if (c < 2)
        throw GeneratorError("c must be an integer >= 2 (got " + std::to_string(c) + ")");
    if (k < 1)
        throw GeneratorError("k must be >= 1 (got " + std::to_string(k) + ")");

    const Time horizon = checked(ipow(c, k + 3), "c^(k+3)");
    LlfLowerBound out;
    out.m = m;
    out.c = c;
    out.k = k;
    out.llf_machines = c * m / 2;
    out.x0 = checked(ipow(c, k + 2) * (c - 1), "x0");

    std::vector<Job> jobs;
    JobId id = 1;
    for (int r = 0; r < k; ++r) {
        const Time start = horizon - checked(ipow(c, k + 3 - r), "window");
        const Time tight_p = checked(ipow(c, k + 2 - r) * (c - 1), "tight p");
        for (int i = 0; i < m / 2; ++i)
            jobs.push_back({id++, start, horizon, tight_p});
        const Time x = checked(ipow(c, k - r), "x_{r+1}");
        for (int wave = 0; wave < c * (c - 1); ++wave) {
            const Time t = start + static_cast<Time>(wave) * c * x;
            for (int i = 0; i < c * m / 2; ++i)
                jobs.push_back({id++, t, t + c * x, x});
        }
    }
    out.instance = Instance(std::move(jobs));
    out.certified = feasible_preemptive(out.instance, m).feasible;
    if (!out.certified)
        throw GeneratorError("LLF family (m=" + std::to_string(m) + ", c=" + std::to_string(c) +
                             ", k=" + std::to_string(k) + ") is not feasible on m machines");
    return out;
}

DeadlineOrderedFamily gen_deadline_ordered_family(int m, int n)
{
    if (m < 2 || n <= m)
        throw GeneratorError("need 2 <= m < n (got m=" + std::to_string(m) + ", n=" +
                             std::to_string(n) + ")");
    DeadlineOrderedFamily fam;
    fam.m = m;
    fam.n = n;
    fam.scale = checked(ipow(m - 1, n - m), "(m-1)^(n-m)");
    const Time dbar = checked(ipow(m, n - m), "deadline m^(n-m)");

    std::vector<Time> p(static_cast<std::size_t>(n) + 1, 0);
    for (int j = 1; j <= m; ++j)
        p[static_cast<std::size_t>(j)] = fam.scale;
    for (int j = m + 1; j <= n; ++j)
        p[static_cast<std::size_t>(j)] = checked(ipow(m, j - m) * ipow(m - 1, n - j), "p_j");

    for (int k = 1; k <= n - m; ++k) {
        const Time dk = checked(ipow(m, k) * ipow(m - 1, n - m - k), "deadline dbar_k");
        std::vector<Job> jobs;
        for (int j = 1; j <= n; ++j)
            jobs.push_back({j, 0, j <= m + k ? dk : dbar, p[static_cast<std::size_t>(j)]});
        Instance inst(std::move(jobs));
        fam.certified.push_back(feasible_preemptive(inst, m).feasible);
        fam.members.push_back(std::move(inst));
    }
    return fam;
}

namespace {

Time outstanding(const SimView& view, Time min_deadline)
{
    Time w = 0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& s = view.state(i);
        if (s.remaining > 0 && view.now() < s.job.deadline && s.job.deadline >= min_deadline)
            w += s.remaining;
    }
    return w;
}

Time due_exactly(const SimView& view, Time deadline)
{
    Time w = 0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& s = view.state(i);
        if (s.remaining > 0 && s.job.deadline == deadline)
            w += s.remaining;
    }
    return w;
}

}  // namespace

GameOutcome play_eight_sevenths(OnlinePolicy& policy, int m, const Rational& c)
{
    if (m < 2 || m % 2 != 0)
        throw GeneratorError("m must be even and positive");
    GameOutcome out;
    out.policy = policy.name();
    out.m = m;
    out.c = c;
    out.budget = policy.budget();
    out.growth_bound = Rational(4 * m) * (Rational(1) - Rational(7) * c / Rational(8));
    out.phase_limit = static_cast<int>(ceil_times(c * Rational(3), m)) + 2;

    Simulator sim(policy);
    std::vector<Job> released;
    JobId id = 1;
    auto release = [&](Time r, Time d, int count) {
        for (int i = 0; i < count; ++i) {
            Job j{id++, r, d, 2};
            sim.add_job(j);
            released.push_back(j);
        }
    };
    auto certify = [&] { return feasible_preemptive(Instance(released), m).feasible; };

    Time t = 0;
    for (int phase = 0; phase < out.phase_limit; ++phase) {
        PhaseRecord rec;
        rec.start = t;
        rec.residue_before = outstanding(sim.view(), 0);
        release(t, t + 3, m);
        release(t, t + 6, m / 2);
        rec.certified = certify();
        sim.step();
        sim.step();
        rec.due_at_check = due_exactly(sim.view(), t + 3);
        if (Rational(rec.due_at_check) > Rational(2 * m) * (c - Rational(1))) {
            release(t + 2, t + 4, m);
            rec.certified = rec.certified && certify();
            out.forced_release = true;
            out.phases.push_back(rec);
            break;
        }
        sim.step();
        rec.residue_after = outstanding(sim.view(), 0);
        out.phases.push_back(rec);
        if (!sim.misses().empty())
            break;
        t += 3;
    }

    auto run = sim.finish();
    out.missed = !run.misses.empty();
    out.first_miss = run.first_miss;
    out.instance = run.instance;
    for (const auto& ph : out.phases) {
        out.all_certified = out.all_certified && ph.certified;
        // Growth is asserted only on phases that completed before any miss.
        const bool clean = !out.first_miss || out.first_miss->time > ph.start + 3;
        if (ph.residue_after && clean)
            out.growth_ok = out.growth_ok &&
                            Rational(*ph.residue_after - ph.residue_before) >= out.growth_bound;
    }
    return out;
}

// Random instances

Profile parse_profile(const std::string& text)
{
    if (text == "general")
        return Profile::General;
    if (text == "agreeable")
        return Profile::Agreeable;
    if (text == "equal-p")
        return Profile::EqualP;
    if (text == "uniform-d")
        return Profile::UniformDeadline;
    if (text == "loose")
        return Profile::Loose;
    if (text == "tight")
        return Profile::Tight;
    throw std::invalid_argument("unknown profile '" + text + "'");
}

std::string to_string(Profile profile)
{
    switch (profile) {
    case Profile::General:
        return "general";
    case Profile::Agreeable:
        return "agreeable";
    case Profile::EqualP:
        return "equal-p";
    case Profile::UniformDeadline:
        return "uniform-d";
    case Profile::Loose:
        return "loose";
    case Profile::Tight:
        return "tight";
    }
    return "?";
}

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo)
        throw std::invalid_argument("empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0)
        return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
}

Instance gen_random(const RandomSpec& spec)
{
    if (spec.n < 1)
        throw GeneratorError("n must be >= 1");
    if (spec.horizon < 1)
        throw GeneratorError("horizon must be >= 1");
    Rng rng(spec.seed);
    const Time H = spec.horizon;
    std::vector<Job> jobs;
    auto id_of = [](std::size_t i) { return static_cast<JobId>(i + 1); };

    switch (spec.profile) {
    case Profile::General:
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Time r = rng.uniform(0, H - 1);
            const Time d = rng.uniform(r + 1, H);
            jobs.push_back({id_of(i), r, d, rng.uniform(1, std::min(spec.max_p, d - r))});
        }
        break;
    case Profile::Agreeable: {
        std::vector<Time> rs;
        std::vector<Time> ds;
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Time r = rng.uniform(0, H - 1);
            rs.push_back(r);
            ds.push_back(rng.uniform(r + 1, H));
        }
        std::sort(rs.begin(), rs.end());
        std::sort(ds.begin(), ds.end());
        for (std::size_t i = 0; i < spec.n; ++i)
            jobs.push_back({id_of(i), rs[i], ds[i], rng.uniform(1, std::min(spec.max_p, ds[i] - rs[i]))});
        break;
    }
    case Profile::EqualP:
        if (spec.p < 1 || spec.p > H)
            throw GeneratorError("equal-p needs 1 <= p <= horizon");
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Time r = rng.uniform(0, H - spec.p);
            jobs.push_back({id_of(i), r, rng.uniform(r + spec.p, H), spec.p});
        }
        break;
    case Profile::UniformDeadline:
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Time r = rng.uniform(0, H - 1);
            jobs.push_back({id_of(i), r, H, rng.uniform(1, std::min(spec.max_p, H - r))});
        }
        break;
    case Profile::Loose: {
        if (spec.alpha <= Rational(0) || spec.alpha > Rational(1))
            throw GeneratorError("loose profile needs 0 < alpha <= 1");
        const Time w0 = ceil_rational(Rational(1) / spec.alpha);
        if (w0 > H)
            throw GeneratorError("horizon too short for alpha-loose jobs (needs " +
                                 std::to_string(w0) + ")");
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Time r = rng.uniform(0, H - w0);
            const Time d = rng.uniform(r + w0, H);
            const Time pmax = std::min(spec.max_p, floor_rational(spec.alpha * Rational(d - r)));
            jobs.push_back({id_of(i), r, d, rng.uniform(1, std::max<Time>(1, pmax))});
        }
        break;
    }
    case Profile::Tight:
        if (spec.alpha < Rational(0) || spec.alpha >= Rational(1))
            throw GeneratorError("tight profile needs 0 <= alpha < 1");
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Time r = rng.uniform(0, H - 1);
            const Time d = rng.uniform(r + 1, H);
            const Time pmin = floor_rational(spec.alpha * Rational(d - r)) + 1;
            jobs.push_back({id_of(i), r, d, rng.uniform(pmin, d - r)});
        }
        break;
    }
    return Instance(std::move(jobs));
}

GeneratedInstance gen_random_annotated(const RandomSpec& spec)
{
    GeneratedInstance out;
    out.instance = gen_random(spec);
    out.profile = spec.profile;
    out.optimum = optimum_preemptive(out.instance);
    return out;
}

}  // namespace machmin
