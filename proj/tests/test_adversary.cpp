#include "doctest.h"

#include "machmin/adversary.hpp"
#include "machmin/optimum.hpp"

using namespace machmin;

TEST_CASE("LLF lower-bound family structure")
{
    const auto lb = gen_llf_lower_bound(2, 2, 1);
    CHECK(lb.certified);
    CHECK(lb.llf_machines == 2);
    CHECK(lb.x0 == 8);
    // round 0: one tight job with p = x0, then c(c-1) = 2 waves of c*m/2 = 2 loose jobs
    CHECK(lb.instance.size() == 1 + 2 * 2);
    CHECK(lb.instance[0] == Job{1, 0, 16, 8});

    for (int k = 1; k <= 4; ++k) {
        const auto g = gen_llf_lower_bound(2, 3, k);
        CHECK(g.certified);
        CHECK(feasible_preemptive(g.instance, 2).feasible);
        for (const auto& j : g.instance.jobs())
            CHECK(j.deadline <= g.instance.max_deadline());
    }
    // round-r tight jobs have p = x0 / c^r
    const auto g = gen_llf_lower_bound(2, 2, 3);
    Time expected = g.x0;
    for (const auto& j : g.instance.jobs()) {
        if (j.deadline == g.instance.max_deadline() && j.processing > 1 && j.processing == expected) {
            expected /= 2;
        }
    }
    CHECK(expected == g.x0 / 8);

    CHECK_THROWS_AS(gen_llf_lower_bound(3, 2, 1), GeneratorError);
    CHECK_THROWS_AS(gen_llf_lower_bound(2, 1, 1), GeneratorError);
    CHECK_THROWS_AS(gen_llf_lower_bound(2, 2, 0), GeneratorError);
    CHECK_THROWS_AS(gen_llf_lower_bound(2, 10, 30), GeneratorError);
}

TEST_CASE("LLF misses once the round count passes the sweep threshold")
{
    int previous = 0;
    for (int k = 1; k <= 6; ++k) {
        const auto lb = gen_llf_lower_bound(2, 2, k);
        LlfPolicy llf(lb.llf_machines);
        const auto run = simulate(lb.instance, llf);
        const int misses = static_cast<int>(run.misses.size());
        if (k <= 3)
            CHECK(misses == 0);
        else
            CHECK(misses > 0);
        CHECK(misses >= previous);
        previous = misses;
    }
}

TEST_CASE("deadline-ordered family")
{
    const auto fam = gen_deadline_ordered_family(2, 4);
    REQUIRE(fam.members.size() == 2);
    const Instance& j1 = fam.members[0];
    std::vector<Time> p;
    for (const auto& j : j1.jobs())
        p.push_back(j.processing);
    CHECK(p == std::vector<Time>{1, 1, 2, 4});
    CHECK(j1[0].deadline == 2);
    CHECK(j1[3].deadline == 4);
    CHECK(fam.scale == 1);

    for (int n = 3; n <= 10; ++n) {
        const auto f = gen_deadline_ordered_family(2, n);
        REQUIRE(f.certified.size() == static_cast<std::size_t>(n - 2));
        for (std::size_t k = 0; k < f.members.size(); ++k)
            CHECK(f.certified[k] == feasible_preemptive(f.members[k], 2).feasible);
        // the last member is the only one the flow oracle certifies
        CHECK(f.certified.back());
        EdfPolicy edf(n - 2);
        bool any = false;
        for (const auto& inst : f.members)
            any = any || !simulate(inst, edf).ok();
        if (n >= 4)
            CHECK(any);
    }
    CHECK_THROWS_AS(gen_deadline_ordered_family(3, 3), GeneratorError);
    CHECK_THROWS_AS(gen_deadline_ordered_family(3, 60), GeneratorError);
}

TEST_CASE("8/7 game against EDF and LLF")
{
    const Rational c(9, 8);
    const int m = 4;
    const int budget = static_cast<int>(floor_rational(c * Rational(m)));
    REQUIRE(budget == 4);
    for (int which = 0; which < 2; ++which) {
        std::unique_ptr<OnlinePolicy> p;
        if (which == 0)
            p = std::make_unique<EdfPolicy>(budget);
        else
            p = std::make_unique<LlfPolicy>(budget);
        const auto g = play_eight_sevenths(*p, m, c);
        CHECK(g.missed);
        CHECK(g.all_certified);
        CHECK(g.growth_ok);
        CHECK(static_cast<int>(g.phases.size()) <= g.phase_limit);
        CHECK(feasible_preemptive(g.instance, m).feasible);
    }
    EdfPolicy again(budget);
    CHECK(play_eight_sevenths(again, m, c).growth_bound == Rational(1, 4));
}

TEST_CASE("8/7 game against a generous budget")
{
    EdfPolicy big(8);
    const auto g = play_eight_sevenths(big, 4, Rational(2));
    CHECK_FALSE(g.missed);
    CHECK(g.all_certified);
}

TEST_CASE("random generators")
{
    RandomSpec spec;
    spec.profile = Profile::EqualP;
    spec.p = 3;
    spec.n = 5;
    spec.seed = 7;
    CHECK(gen_random(spec).jobs() == gen_random(spec).jobs());
    CHECK(gen_random(spec).is_equal_processing());

    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RandomSpec s;
        s.seed = seed;
        s.n = 12;
        s.horizon = 20;
        s.profile = Profile::Loose;
        const Instance loose = gen_random(s);
        for (const auto& j : loose.jobs())
            CHECK(classify(j, s.alpha) == Tightness::Loose);
        s.profile = Profile::Tight;
        const Instance tight = gen_random(s);
        for (const auto& j : tight.jobs())
            CHECK(classify(j, s.alpha) == Tightness::Tight);
        s.profile = Profile::Agreeable;
        CHECK(gen_random(s).is_agreeable());
        s.profile = Profile::UniformDeadline;
        CHECK(gen_random(s).is_uniform_deadline());
        s.profile = Profile::General;
        const auto annotated = gen_random_annotated(s);
        CHECK(annotated.optimum == optimum_preemptive(annotated.instance));
    }

    RandomSpec bad;
    bad.profile = Profile::Loose;
    bad.alpha = Rational(1, 40);
    bad.horizon = 16;
    CHECK_THROWS_AS(gen_random(bad), GeneratorError);
    CHECK(parse_profile("uniform-d") == Profile::UniformDeadline);
    CHECK_THROWS(parse_profile("weird"));
}

TEST_CASE("bounded draws are reproducible and in range")
{
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.uniform(-3, 5);
        CHECK(x == b.uniform(-3, 5));
        CHECK(x >= -3);
        CHECK(x <= 5);
    }
}
