#include "doctest.h"

#include <cmath>

#include "machmin/adversary.hpp"
#include "machmin/logn.hpp"
#include "machmin/optimum.hpp"

using namespace machmin;

TEST_CASE("safe reclassification threshold")
{
    const Job j{1, 0, 10, 6};
    const Rational half(1, 2);
    CHECK_FALSE(becomes_safe({j, 5, false}, 1, half));
    CHECK(becomes_safe({j, 4, false}, 2, half));
    CHECK(residue({j, 4, false}, 2) == Job{1, 2, 10, 4});
}

TEST_CASE("loose jobs never become critical")
{
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        RandomSpec spec;
        spec.profile = Profile::Loose;
        spec.seed = seed;
        spec.n = 12;
        spec.horizon = 24;
        const auto lr = logn_schedule(gen_random(spec));
        CHECK(lr.run.ok());
        for (const auto& rb : lr.monitor.rebuilds)
            CHECK(rb.critical == 0);
        CHECK(lr.run.pool_peaks.at("critical") == 0);
    }
}

TEST_CASE("build_groups")
{
    // window of the second (3) fits the laxity of the first (4)
    const std::vector<JobState> fits{{{1, 0, 8, 4}, 4, false}, {{2, 0, 3, 2}, 2, false}};
    CHECK(build_groups(fits, 0).size() == 1);
    const std::vector<JobState> zero{{{1, 0, 4, 4}, 4, false}, {{2, 1, 3, 2}, 2, false}};
    CHECK(build_groups(zero, 1).size() == 2);

    // scanned by decreasing deadline: the anchor is the last member added
    const std::vector<JobState> chain{
        {{1, 0, 20, 10}, 10, false}, {{2, 0, 9, 4}, 4, false}, {{3, 0, 4, 2}, 2, false}};
    const auto g = build_groups(chain, 0);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("split_group")
{
    std::vector<Job> five;
    for (int i = 0; i < 5; ++i)
        five.push_back({i + 1, 0, 10 - i, 1});  // deadlines 10..6
    const auto s = split_group(five, 2);
    REQUIRE(s.size() == 2);
    // ranks by increasing deadline: ids 5,4,3,2,1
    CHECK(s[0] == std::vector<std::size_t>{4, 2, 0});
    CHECK(s[1] == std::vector<std::size_t>{3, 1});
    CHECK(split_group(five, 9).size() == 5);
    const auto one = split_group(five, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 5);
}

TEST_CASE("choose_mu")
{
    CHECK(choose_mu(16, Rational(1, 2)) == 8);
    CHECK(choose_mu(1, Rational(1, 2)) == 1);
    CHECK(choose_mu(3, Rational(1, 2)) == 4);
    for (std::size_t n = 1; n <= 300; n += 7) {
        const int mu = choose_mu(n, Rational(1, 3));
        const double lhs = std::pow(2.0 / 3.0, mu) * double(n) * double(n);
        CHECK(lhs <= 1.0 + 1e-9);
        if (mu > 1)
            CHECK(std::pow(2.0 / 3.0, mu - 1) * double(n) * double(n) > 1.0 - 1e-9);
    }
}

TEST_CASE("logn schedule on random instances")
{
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RandomSpec spec;
        spec.seed = seed;
        spec.n = 20;
        spec.horizon = 30;
        spec.max_p = 10;
        const Instance inst = gen_random(spec);
        const auto lr = logn_schedule(inst);
        CHECK(lr.run.ok());
        CHECK(lr.run.validate().feasible);
        CHECK(lr.monitor.ok());
        CHECK(lr.monitor.min_laxity_ratio >= laxity_floor());
        for (const auto& rb : lr.monitor.rebuilds)
            CHECK(rb.ok);
    }
}

TEST_CASE("logn constant")
{
    CHECK(logn_constant(12, 2, 8) == Rational(2));
    CHECK(logn_constant(10, 1, 5) == Rational(10, 3));
}

TEST_CASE("transform examples")
{
    const Instance one({{1, 0, 12, 4}});
    auto r = transform(one, {TransformKind::ScaleLaxity, Rational(1, 2)});
    CHECK(r.scale == 1);
    CHECK(r.instance[0] == Job{1, 0, 12, 8});
    r = transform(one, {TransformKind::LeftPart, Rational(1, 2)});
    CHECK(r.instance[0] == Job{1, 0, 6, 4});
    r = transform(one, {TransformKind::RightPart, Rational(1, 2)});
    CHECK(r.instance[0] == Job{1, 6, 12, 4});
    r = transform(one, {TransformKind::RightShortened, Rational(1, 2)});
    CHECK(r.instance[0] == Job{1, 4, 12, 4});
    r = transform(one, {TransformKind::LeftShortened, Rational(1, 2)});
    CHECK(r.instance[0] == Job{1, 0, 8, 4});

    // odd laxity forces a pre-scale
    r = transform(Instance({{1, 0, 5, 2}}), {TransformKind::RightShortened, Rational(1, 2)});
    CHECK(r.scale == 2);
    CHECK(r.instance[0] == Job{1, 3, 10, 4});

    r = transform(Instance({{1, 0, 3, 3}, {2, 0, 8, 2}}), {TransformKind::LeftPart, Rational(1, 2)});
    CHECK(r.dropped == std::vector<JobId>{1});
    CHECK(r.instance.size() == 1);

    CHECK(parse_transform_kind("lshort") == TransformKind::LeftShortened);
    CHECK_THROWS(parse_transform_kind("middle"));
    CHECK_THROWS(transform(one, {TransformKind::ScaleLaxity, Rational(3, 2)}));
}

TEST_CASE("transform bounds")
{
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RandomSpec spec;
        spec.seed = seed;
        spec.n = 8;
        spec.horizon = 20;
        const Instance inst = gen_random(spec);
        const int m = optimum_preemptive(inst);
        for (Rational g : {Rational(1, 2), Rational(1, 4)}) {
            for (auto kind : {TransformKind::LeftShortened, TransformKind::RightShortened}) {
                const auto t = transform(inst, {kind, g});
                CHECK(optimum_preemptive(t.instance) <= ceil_rational(Rational(m) / g));
            }
            const auto b = transform(inst, {TransformKind::ScaleLaxity, g});
            CHECK(m <= optimum_preemptive(b.instance));
        }
    }
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        RandomSpec spec;
        spec.profile = Profile::Tight;
        spec.seed = seed;
        spec.n = 8;
        spec.horizon = 20;
        const Instance inst = gen_random(spec);
        const int m = optimum_preemptive(inst);
        for (Rational beta : {Rational(1, 2), Rational(1, 4)}) {
            const auto t = transform(inst, {TransformKind::ScaleLaxity, beta});
            CHECK(optimum_preemptive(t.instance) <= ceil_rational(Rational(4 * m) / beta));
        }
    }
}
