// Acceptance report: one PASS/FAIL line per criterion.
//
//   acceptance                          exit 1 if any criterion fails
//   acceptance --known-failures 7a,7b   exit 0 iff exactly those fail

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "machmin/adversary.hpp"
#include "machmin/composite.hpp"
#include "machmin/harness.hpp"
#include "machmin/logn.hpp"
#include "machmin/optimum.hpp"

using namespace machmin;

namespace {

// Pinned sizes and tolerances.
constexpr int kDensityInstances = 1000;
constexpr int kLooseInstances = 500;
constexpr int kFamilyInstances = 300;
constexpr int kDoubleStreams = 40;  // per pattern and factor
constexpr int kLognInstances = 500;
constexpr int kTransformInstances = 500;
const Rational kLaxityFloor(355, 1000);

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::set<std::string> g_failed;

void report(const std::string& id, const std::string& title, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = body();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass)
        g_failed.insert(id);
    std::printf("%s %-3s %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

RandomSpec spec_of(Profile profile, std::uint64_t seed, std::size_t n, Time horizon)
{
    RandomSpec spec;
    spec.profile = profile;
    spec.seed = seed;
    spec.n = n;
    spec.horizon = horizon;
    return spec;
}

int peak(const SimulationRun& run, const std::string& pool)
{
    auto it = run.pool_peaks.find(pool);
    return it == run.pool_peaks.end() ? 0 : it->second;
}

// every job has p > (d - r) / 2, deadlines follow releases
Instance tight_agreeable(std::uint64_t seed, std::size_t n)
{
    Rng rng(seed);
    std::vector<Time> rs;
    for (std::size_t i = 0; i < n; ++i)
        rs.push_back(rng.uniform(0, 10));
    std::sort(rs.begin(), rs.end());
    std::vector<Job> jobs;
    Time last_d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Time p = rng.uniform(2, 5);
        Time d = std::max(rs[i] + p + rng.uniform(0, p - 1), last_d);
        if (2 * p <= d - rs[i])
            continue;
        last_d = d;
        jobs.push_back({static_cast<JobId>(jobs.size() + 1), rs[i], d, p});
    }
    return Instance(jobs);
}

std::string ratio_text(const Rational& r)
{
    std::ostringstream os;
    os << to_string(r) << " (" << to_double(r) << ")";
    return os.str();
}

Outcome strong_density()
{
    int agree = 0;
    for (int i = 0; i < kDensityInstances; ++i) {
        auto spec = spec_of(Profile::General, 1000 + i, 1 + i % 8, 16);
        spec.max_p = 1 + i % 6;
        if (check_strong_density_theorem(gen_random(spec)))
            ++agree;
    }
    return {agree == kDensityInstances,
            std::to_string(agree) + "/" + std::to_string(kDensityInstances) + " instances agree"};
}

Outcome loose_edf()
{
    int ok = 0;
    int total = 0;
    std::string bad;
    for (Rational alpha : {Rational(1, 4), Rational(1, 3), Rational(1, 2)}) {
        for (int i = 0; i < kLooseInstances; ++i) {
            auto spec = spec_of(Profile::Loose, 2000 + i, 4 + i % 9, 24);
            spec.alpha = alpha;
            const Instance inst = gen_random(spec);
            const int m = optimum_preemptive(inst);
            EdfPolicy edf(loose_budget(alpha, m));
            const auto run = simulate(inst, edf);
            const auto opt = feasible_preemptive(inst, m);
            ++total;
            if (run.ok() && opt.witness && !first_load_violation(run, *opt.witness, m, alpha))
                ++ok;
            else if (bad.empty())
                bad = "; first failure alpha=" + to_string(alpha) + " seed=" + std::to_string(2000 + i);
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " runs miss-free with load inequality" + bad};
}

Outcome special_cases()
{
    struct Family {
        std::string name;
        std::function<bool(int)> check;  // seed index -> within bound
    };
    const std::vector<Family> families{
        {"llf@m uniform-d",
         [](int i) {
             const Instance inst = gen_random(spec_of(Profile::UniformDeadline, 3000 + i, 4 + i % 7, 14));
             LlfPolicy llf(optimum_preemptive(inst));
             return simulate(inst, llf).ok();
         }},
        {"edf@3m equal-p",
         [](int i) {
             auto spec = spec_of(Profile::EqualP, 3000 + i, 4 + i % 9, 18);
             spec.p = 1 + i % 4;
             const Instance inst = gen_random(spec);
             EdfPolicy edf(3 * optimum_preemptive(inst));
             return simulate(inst, edf).ok();
         }},
        {"equal-p semi @4m",
         [](int i) {
             auto spec = spec_of(Profile::EqualP, 3000 + i, 3 + i % 6, 16);
             spec.p = 1 + i % 4;
             const Instance inst = gen_random(spec);
             const int m = optimum_nonpreemptive_exact(inst);
             const auto run = equal_p_nonpreemptive_semi(inst, m);
             return run.ok() && accounted_machines(run) <= 4 * m;
         }},
        {"agreeable-p @18m",
         [](int i) {
             const Instance inst = gen_random(spec_of(Profile::Agreeable, 3000 + i, 4 + i % 9, 20));
             const int m = optimum_preemptive(inst);
             const auto run = agreeable_preemptive(inst, m);
             return run.ok() && accounted_machines(run) <= 18 * m;
         }},
        {"agreeable-np @9m",
         [](int i) {
             const Instance inst = gen_random(spec_of(Profile::Agreeable, 3000 + i, 3 + i % 6, 16));
             const int m = optimum_nonpreemptive_exact(inst);
             const auto run = agreeable_nonpreemptive(inst, m);
             return run.ok() && accounted_machines(run) <= 9 * m;
         }},
        {"uniform-np @ceil(5.25m)",
         [](int i) {
             const Instance inst = gen_random(spec_of(Profile::UniformDeadline, 3000 + i, 3 + i % 6, 14));
             const int m = optimum_nonpreemptive_exact(inst);
             const auto run = uniform_deadline_nonpreemptive(inst, m);
             return run.ok() && accounted_machines(run) <= ceil_times(Rational(21, 4), m);
         }},
        {"mediumfit tight agreeable @5m",
         [](int i) {
             const Instance inst = tight_agreeable(3000 + i, 3 + i % 6);
             const int m = optimum_nonpreemptive_exact(inst);
             const auto run = agreeable_nonpreemptive(inst, m, Rational(1, 2));
             return run.ok() && peak(run, "loose") == 0 && peak(run, "tight") <= 5 * m;
         }},
        {"earlyfit uniform-d @3m",
         [](int i) {
             const Instance inst = gen_random(spec_of(Profile::UniformDeadline, 3000 + i, 3 + i % 6, 14));
             const int m = optimum_nonpreemptive_exact(inst);
             const auto run = uniform_deadline_nonpreemptive(inst, m, Rational(1, 3));
             return run.ok() && peak(run, "tight") <= 3 * m;
         }},
    };
    bool pass = true;
    std::string detail;
    for (const auto& f : families) {
        int ok = 0;
        for (int i = 0; i < kFamilyInstances; ++i)
            ok += f.check(i) ? 1 : 0;
        pass = pass && ok == kFamilyInstances;
        detail += (detail.empty() ? "" : ", ") + f.name + " " + std::to_string(ok) + "/" +
                  std::to_string(kFamilyInstances);
    }
    return {pass, detail};
}

// Loose jobs (window 4p) whose release pattern drives m(t).
Instance stream(const std::string& pattern, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Job> jobs;
    auto add = [&](Time r, Time p) {
        jobs.push_back({static_cast<JobId>(jobs.size() + 1), r, r + 4 * p, p});
    };
    if (pattern == "constant") {
        for (Time t = 0; t < 40; ++t)
            for (std::int64_t k = rng.uniform(1, 2); k > 0; --k)
                add(t, rng.uniform(1, 3));
    } else if (pattern == "doubling") {
        for (int phase = 0; phase < 5; ++phase)
            for (int k = 0; k < (1 << phase); ++k)
                add(phase * 12 + rng.uniform(0, 2), rng.uniform(2, 3));
    } else {
        for (Time t = 0; t < 60; ++t) {
            const bool burst = rng.uniform(0, 9) == 0;
            for (std::int64_t k = burst ? rng.uniform(4, 12) : rng.uniform(0, 1); k > 0; --k)
                add(t, rng.uniform(1, 4));
        }
    }
    return Instance(jobs);
}

Outcome double_reduction()
{
    int ok = 0;
    int total = 0;
    int max_epochs = 0;
    for (const std::string pattern : {"constant", "doubling", "bursty"}) {
        for (int a : {1, 2, 4}) {
            for (int i = 0; i < kDoubleStreams; ++i) {
                const Instance inst = stream(pattern, 4000 + i);
                const auto dr = double_wrap(
                    inst, Rational(a), [a](int m) { return std::make_unique<EdfPolicy>(a * m); }, true,
                    preemptive_oracle());
                const int m_final = optimum_preemptive(inst);
                ++total;
                max_epochs = std::max<int>(max_epochs, dr.epochs.size());
                if (dr.check.ok() && accounted_machines(dr.run) == dr.check.opened_machines &&
                    Rational(dr.check.opened_machines) <= Rational(4 * a * m_final))
                    ++ok;
            }
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                             " traces within 4am with epoch inequality; max epochs " +
                             std::to_string(max_epochs)};
}

Outcome logn()
{
    int ok = 0;
    Rational worst_floor(1);
    Rational c_max(0);
    std::vector<Rational> cs;
    for (int i = 0; i < kLognInstances; ++i) {
        const std::size_t n = 8 + static_cast<std::size_t>(i) % 193;  // 8..200
        // odd seeds are all-tight
        const Profile profile = i % 2 ? Profile::Tight : Profile::General;
        auto spec = spec_of(profile, 5000 + i, n, std::max<Time>(24, static_cast<Time>(n / 2)));
        spec.max_p = 8;
        const Instance inst = gen_random(spec);
        const auto lr = logn_schedule(inst);
        const int m = optimum_preemptive(inst);
        worst_floor = std::min(worst_floor, lr.monitor.min_laxity_ratio);
        const Rational c = logn_constant(accounted_machines(lr.run), m, n);
        cs.push_back(c);
        c_max = std::max(c_max, c);
        if (lr.run.ok() && lr.monitor.ok() && lr.monitor.min_laxity_ratio >= kLaxityFloor)
            ++ok;
    }
    std::sort(cs.begin(), cs.end());
    const Rational p95 = cs[(cs.size() * 95 + 99) / 100 - 1];
    return {ok == kLognInstances, std::to_string(ok) + "/" + std::to_string(kLognInstances) +
                                      " miss-free with monitors clean; min laxity ratio " +
                                      ratio_text(worst_floor) + "; C max " + ratio_text(c_max) +
                                      " p95 " + ratio_text(p95)};
}

Outcome transforms()
{
    int ok = 0;
    int total = 0;
    for (int i = 0; i < kTransformInstances; ++i) {
        const Instance inst = gen_random(spec_of(Profile::General, 6000 + i, 3 + i % 8, 20));
        const int m = optimum_preemptive(inst);
        for (Rational g : {Rational(1, 2), Rational(1, 4)}) {
            for (auto kind : {TransformKind::RightShortened, TransformKind::LeftShortened}) {
                ++total;
                if (optimum_preemptive(transform(inst, {kind, g}).instance) <= ceil_rational(Rational(m) / g))
                    ++ok;
            }
        }
    }
    for (int i = 0; i < kTransformInstances; ++i) {
        const Instance inst = gen_random(spec_of(Profile::Tight, 7000 + i, 3 + i % 8, 20));
        const int m = optimum_preemptive(inst);
        for (Rational beta : {Rational(1, 2), Rational(1, 4)}) {
            ++total;
            if (optimum_preemptive(transform(inst, {TransformKind::ScaleLaxity, beta}).instance) <=
                ceil_rational(Rational(4 * m) / beta))
                ++ok;
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " transformed optima within bound"};
}

Outcome deadline_ordered()
{
    int members = 0;
    int certified = 0;
    int families_missed = 0;
    int families = 0;
    for (int n = 3; n <= 10; ++n) {
        const auto fam = gen_deadline_ordered_family(2, n);
        ++families;
        bool missed = false;
        for (std::size_t k = 0; k < fam.members.size(); ++k) {
            ++members;
            certified += fam.certified[k] ? 1 : 0;
            EdfPolicy edf(n - 2);
            missed = missed || !simulate(fam.members[k], edf).ok();
        }
        families_missed += missed ? 1 : 0;
    }
    return {certified == members && families_missed == families,
            std::to_string(certified) + "/" + std::to_string(members) + " members certified at m=2; EDF@n-2 misses in " +
                std::to_string(families_missed) + "/" + std::to_string(families) + " families"};
}

Outcome llf_family()
{
    bool pass = true;
    std::string detail;
    for (int k = 1; k <= 3; ++k) {
        const auto lb = gen_llf_lower_bound(2, 2, k);
        LlfPolicy llf(lb.llf_machines);
        const bool missed = !simulate(lb.instance, llf).ok();
        pass = pass && lb.certified && missed;
        detail += (detail.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) +
                  (lb.certified ? " certified" : " uncertified") + (missed ? " missed" : " no miss");
    }
    return {pass, detail + " (LLF on " + std::to_string(gen_llf_lower_bound(2, 2, 1).llf_machines) + " machines)"};
}

Outcome eight_sevenths()
{
    const int m = 4;
    const Rational c(9, 8);
    const int budget = static_cast<int>(floor_rational(c * Rational(m)));
    bool pass = true;
    std::string detail;
    for (int which = 0; which < 2; ++which) {
        std::unique_ptr<OnlinePolicy> p;
        if (which == 0)
            p = std::make_unique<EdfPolicy>(budget);
        else
            p = std::make_unique<LlfPolicy>(budget);
        const auto g = play_eight_sevenths(*p, m, c);
        const bool ok = g.missed && g.all_certified && g.growth_ok &&
                        static_cast<int>(g.phases.size()) <= g.phase_limit;
        pass = pass && ok;
        detail += (detail.empty() ? "" : ", ") + g.policy + " missed after " + std::to_string(g.phases.size()) +
                  " of " + std::to_string(g.phase_limit) + " phases, growth " + (g.growth_ok ? "ok" : "low");
    }
    return {pass, detail};
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    const std::string data = MACHMIN_TEST_DATA;
    Campaign c;
    c.spec.profile = Profile::Agreeable;
    c.spec.n = 8;
    c.spec.seed = 1;
    c.count = 20;
    c.policies = {"agreeable-p", "agreeable-np", "edf@m", "logn", "agreeable-p-online"};
    const std::string csv1 = to_csv(bench(c), false);
    c.threads = 4;
    const std::string csv2 = to_csv(bench(c), false);
    const std::string jsonl = to_jsonl(bench(c), false);

    const Instance inst = parse_instance(read_file(data + "/instance_small.txt"));
    const auto a = run_policy("llf", inst, RunOptions{.machines = 2});
    const auto b = run_policy("llf", inst, RunOptions{.machines = 2});
    const auto np = run_policy("edf-np", inst, RunOptions{.machines = 3});

    int same = 0;
    same += csv1 == csv2;
    same += csv1 == read_file(data + "/bench_agreeable.csv");
    same += jsonl == read_file(data + "/bench_agreeable.jsonl");
    same += serialize_trace(a.run.schedule) == serialize_trace(b.run.schedule);
    same += serialize_trace(a.run.schedule) == read_file(data + "/trace_llf2.txt");
    same += serialize_trace(np.run.starts) == read_file(data + "/trace_edfnp3.txt");
    return {same == 6, std::to_string(same) + "/6 outputs byte-identical to rerun and golden files"};
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<std::string> known;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::string(argv[i]) != "--known-failures") {
            std::fprintf(stderr, "usage: acceptance [--known-failures ID,ID,...]\n");
            return 2;
        }
        std::stringstream ss(argv[i + 1]);
        std::string id;
        while (std::getline(ss, id, ','))
            known.insert(id);
    }

    const auto t0 = std::chrono::steady_clock::now();
    report("1", "strong density equals flow optimum", strong_density);
    report("2", "loose EDF bound", loose_edf);
    report("3", "special-case budgets", special_cases);
    report("4", "double reduction", double_reduction);
    report("5", "log-n algorithm", logn);
    report("6", "laxity transforms", transforms);
    report("7a", "deadline-ordered family", deadline_ordered);
    report("7b", "LLF lower-bound family", llf_family);
    report("7c", "8/7 game", eight_sevenths);
    report("8", "determinism", determinism);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("total %.1fs, %zu failing\n", secs, g_failed.size());
    if (known.empty())
        return g_failed.empty() ? 0 : 1;
    return g_failed == known ? 0 : 1;
}
