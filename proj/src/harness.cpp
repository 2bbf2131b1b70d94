#include "machmin/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace machmin {

namespace {

struct PolicyInfo {
    bool nonpreemptive = false;
    bool needs_m = false;        // semi-online: takes the optimum as input
    bool needs_budget = false;   // base rule run on an explicit budget
};

const std::map<std::string, PolicyInfo>& registry()
{
    static const std::map<std::string, PolicyInfo> table{
        {"edf", {false, false, true}},
        {"llf", {false, false, true}},
        {"edf-np", {true, false, true}},
        {"earlyfit", {true, false, false}},
        {"mediumfit", {true, false, false}},
        {"agreeable-p", {false, true, false}},
        {"agreeable-np", {true, true, false}},
        {"equalp-p", {false, true, false}},
        {"equalp-semi", {true, true, false}},
        {"uniform-p", {false, true, false}},
        {"uniform-np", {true, true, false}},
        {"logn", {false, false, false}},
        {"equalp-online", {false, false, false}},
        {"agreeable-p-online", {false, false, false}},
        {"agreeable-np-online", {true, false, false}},
        {"equalp-np-online", {true, false, false}},
        {"uniform-p-online", {false, false, false}},
        {"uniform-np-online", {true, false, false}},
    };
    return table;
}

struct ParsedName {
    std::string base;
    std::optional<Rational> factor;  // from "@<q>m"
};

ParsedName parse_name(const std::string& name)
{
    ParsedName out;
    const auto at = name.find('@');
    out.base = name.substr(0, at);
    if (!registry().count(out.base))
        throw std::invalid_argument("unknown policy '" + out.base + "'");
    if (at == std::string::npos)
        return out;
    std::string mult = name.substr(at + 1);
    if (mult.empty() || mult.back() != 'm')
        throw std::invalid_argument("budget suffix must look like @3m or @9/4m (got '" + mult + "')");
    mult.pop_back();
    out.factor = mult.empty() ? Rational(1) : parse_rational(mult);
    if (*out.factor <= Rational(0))
        throw std::invalid_argument("budget factor must be positive");
    if (!registry().at(out.base).needs_budget)
        throw std::invalid_argument("policy '" + out.base + "' does not take a budget");
    return out;
}

int compute_m(const Instance& instance, bool nonpreemptive, int cap)
{
    return nonpreemptive ? optimum_nonpreemptive_exact(instance, cap) : optimum_preemptive(instance);
}

PolicyResult from_run(SimulationRun run, int m)
{
    PolicyResult out;
    out.machines = accounted_machines(run);
    out.run = std::move(run);
    out.m = m;
    return out;
}

PolicyResult from_double(DoubleRun dr, int m)
{
    PolicyResult out = from_run(dr.run, m);
    out.doubling = std::move(dr);
    return out;
}

}  // namespace

std::vector<std::string> policy_names()
{
    std::vector<std::string> out;
    for (const auto& [name, info] : registry())
        out.push_back(name);
    return out;
}

bool is_nonpreemptive_policy(const std::string& name)
{
    return registry().at(parse_name(name).base).nonpreemptive;
}

int accounted_machines(const SimulationRun& run)
{
    const auto& peaks = run.pool_peaks;
    if (auto it = peaks.find("opened"); it != peaks.end())
        return it->second;
    if (peaks.empty())
        return run.machines_used;
    int total = 0;
    for (const auto& [key, value] : peaks) {
        if (key.find('/') != std::string::npos)
            continue;
        auto opened = peaks.find(key + "/opened");
        total += opened != peaks.end() ? opened->second : value;
    }
    return total;
}

PolicyResult run_policy(const std::string& name, const Instance& instance, const RunOptions& opts)
{
    const ParsedName parsed = parse_name(name);
    const PolicyInfo& info = registry().at(parsed.base);
    const std::string& b = parsed.base;
    const int cap = opts.nonpreemptive_cap;

    int m = opts.m.value_or(0);
    if (!opts.m && (info.needs_m || parsed.factor))
        m = compute_m(instance, info.nonpreemptive, cap);
    auto alpha_or = [&](Rational fallback) { return opts.alpha.value_or(fallback); };

    if (info.needs_budget) {
        int budget = 0;
        if (parsed.factor)
            budget = static_cast<int>(ceil_times(*parsed.factor, m));
        else if (opts.machines)
            budget = *opts.machines;
        else
            throw std::invalid_argument("policy '" + b + "' needs a machine budget");
        if (budget < 0)
            throw std::invalid_argument("machine budget must be non-negative");
        std::unique_ptr<OnlinePolicy> p;
        if (b == "edf")
            p = std::make_unique<EdfPolicy>(budget);
        else if (b == "llf")
            p = std::make_unique<LlfPolicy>(budget);
        else
            p = std::make_unique<NonpreemptiveEdfPolicy>(budget);
        return from_run(simulate(instance, *p), m);
    }
    if (b == "earlyfit") {
        EarlyFitPolicy p;
        return from_run(simulate(instance, p), m);
    }
    if (b == "mediumfit") {
        Time scale = 1;
        const Instance scaled = prescale_for_medium_fit(instance, scale);
        MediumFitPolicy p;
        auto run = simulate(scaled, p);
        run.scale = scale;
        return from_run(std::move(run), m);
    }
    if (b == "agreeable-p")
        return from_run(agreeable_preemptive(instance, m, alpha_or(Rational(1, 2))), m);
    if (b == "agreeable-np")
        return from_run(agreeable_nonpreemptive(instance, m, alpha_or(Rational(1, 2))), m);
    if (b == "equalp-p")
        return from_run(equal_p_preemptive(instance, m), m);
    if (b == "equalp-semi")
        return from_run(equal_p_nonpreemptive_semi(instance, m), m);
    if (b == "uniform-p")
        return from_run(uniform_deadline_preemptive(instance, m), m);
    if (b == "uniform-np")
        return from_run(uniform_deadline_nonpreemptive(instance, m, alpha_or(Rational(1, 3))), m);
    if (b == "logn") {
        auto lr = logn_schedule(instance, alpha_or(Rational(1, 2)));
        PolicyResult out = from_run(std::move(lr.run), m);
        out.logn = std::move(lr.monitor);
        return out;
    }
    if (b == "equalp-online")
        return from_run(equal_p_online(instance, alpha_or(Rational(3, 10))), m);
    if (b == "agreeable-p-online")
        return from_double(agreeable_preemptive_online(instance, alpha_or(Rational(1, 2))), m);
    if (b == "agreeable-np-online")
        return from_double(agreeable_nonpreemptive_online(instance, alpha_or(Rational(1, 3)),
                                                          nonpreemptive_oracle(cap)),
                           m);
    if (b == "equalp-np-online")
        return from_double(equal_p_nonpreemptive_online(instance, nonpreemptive_oracle(cap)), m);
    if (b == "uniform-p-online")
        return from_double(uniform_deadline_preemptive_online(instance), m);
    if (b == "uniform-np-online")
        return from_double(uniform_deadline_nonpreemptive_online(instance, alpha_or(Rational(1, 4)),
                                                                 nonpreemptive_oracle(cap)),
                           m);
    throw std::invalid_argument("unknown policy '" + name + "'");
}

// Bench

namespace {

std::string campaign_params(const RandomSpec& spec)
{
    std::ostringstream os;
    os << "horizon=" << spec.horizon;
    switch (spec.profile) {
    case Profile::EqualP:
        os << ";p=" << spec.p;
        break;
    case Profile::Loose:
    case Profile::Tight:
        os << ";max_p=" << spec.max_p << ";alpha=" << to_string(spec.alpha);
        break;
    default:
        os << ";max_p=" << spec.max_p;
        break;
    }
    return os.str();
}

struct InstanceOracles {
    std::optional<int> preemptive;
    std::optional<int> nonpreemptive;
    bool np_capped = false;
};

std::vector<BenchRow> bench_instance(const Campaign& c, std::size_t index)
{
    RandomSpec spec = c.spec;
    spec.seed = c.spec.seed + index;
    const Instance instance = gen_random(spec);

    InstanceOracles oracles;
    oracles.preemptive = optimum_preemptive(instance);
    auto np_optimum = [&]() -> std::optional<int> {
        if (!oracles.nonpreemptive && !oracles.np_capped) {
            try {
                oracles.nonpreemptive = optimum_nonpreemptive_exact(instance, c.nonpreemptive_cap);
            } catch (const OracleCapExceeded&) {
                oracles.np_capped = true;
            }
        }
        return oracles.nonpreemptive;
    };

    std::vector<BenchRow> rows;
    for (const auto& policy : c.policies) {
        BenchRow row;
        row.instance = index;
        row.profile = to_string(spec.profile);
        row.n = instance.size();
        row.policy = policy;
        row.params = "seed=" + std::to_string(spec.seed) + ";" + campaign_params(spec);

        const bool np = is_nonpreemptive_policy(policy);
        row.m_opt = np ? np_optimum() : oracles.preemptive;
        if (!row.m_opt) {
            row.status = "oracle-skipped";
            rows.push_back(std::move(row));
            continue;
        }

        RunOptions opts;
        opts.m = row.m_opt;
        opts.nonpreemptive_cap = c.nonpreemptive_cap;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            PolicyResult res = run_policy(policy, instance, opts);
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                              .count();
            row.machines = res.machines;
            row.first_miss = res.run.first_miss;
            if (*row.m_opt > 0)
                row.ratio = Rational(row.machines, *row.m_opt);
            row.status = row.first_miss ? "miss" : "ok";
            if (!row.first_miss) {
                const auto report = res.run.validate();
                if (!report.feasible)
                    throw std::logic_error("harness: run of " + policy + " on instance " +
                                           std::to_string(index) + " reported no miss but fails validation: " +
                                           report.summary());
            }
        } catch (const OracleCapExceeded&) {
            row.status = "oracle-skipped";
        } catch (const std::invalid_argument&) {
            row.status = "rejected";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string decimal(const Rational& q)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", to_double(q));
    return buf;
}

}  // namespace

BenchResult bench(const Campaign& campaign)
{
    for (const auto& p : campaign.policies)
        parse_name(p);

    std::vector<std::vector<BenchRow>> per_instance(campaign.count);
    const auto threads = static_cast<std::size_t>(std::max(1, campaign.threads));
    if (threads == 1 || campaign.count < 2) {
        for (std::size_t i = 0; i < campaign.count; ++i)
            per_instance[i] = bench_instance(campaign, i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < campaign.count; i += threads)
                        per_instance[i] = bench_instance(campaign, i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    BenchResult out;
    for (auto& rows : per_instance)
        for (auto& r : rows)
            out.rows.push_back(std::move(r));

    for (const auto& policy : campaign.policies) {
        PolicySummary s;
        s.policy = policy;
        for (const auto& r : out.rows) {
            if (r.policy != policy)
                continue;
            ++s.rows;
            if (r.status == "miss")
                ++s.misses;
            if (r.status == "oracle-skipped")
                ++s.skipped;
            if (r.ratio && (!s.max_ratio || *r.ratio > *s.max_ratio))
                s.max_ratio = r.ratio;
        }
        out.summary.push_back(std::move(s));
    }
    return out;
}

std::string to_csv(const BenchResult& result, bool timing)
{
    std::ostringstream os;
    os << "instance,profile,n,m_opt,policy,params,machines,first_miss,ratio,ratio_dec,status";
    if (timing)
        os << ",wall_ms";
    os << '\n';
    for (const auto& r : result.rows) {
        os << r.instance << ',' << r.profile << ',' << r.n << ','
           << (r.m_opt ? std::to_string(*r.m_opt) : "") << ',' << r.policy << ',' << r.params << ','
           << r.machines << ',';
        if (r.first_miss)
            os << r.first_miss->id << '@' << r.first_miss->time;
        os << ',' << (r.ratio ? to_string(*r.ratio) : "") << ',' << (r.ratio ? decimal(*r.ratio) : "")
           << ',' << r.status;
        if (timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
            os << ',' << buf;
        }
        os << '\n';
    }
    for (const auto& s : result.summary) {
        os << "summary,," << s.rows << ",," << s.policy << ",misses=" << s.misses
           << ";skipped=" << s.skipped << ",,," << (s.max_ratio ? to_string(*s.max_ratio) : "") << ','
           << (s.max_ratio ? decimal(*s.max_ratio) : "") << ",max";
        if (timing)
            os << ',';
        os << '\n';
    }
    return os.str();
}

std::string to_jsonl(const BenchResult& result, bool timing)
{
    using nlohmann::ordered_json;
    std::ostringstream os;
    for (const auto& r : result.rows) {
        ordered_json j;
        j["instance"] = r.instance;
        j["profile"] = r.profile;
        j["n"] = r.n;
        j["m_opt"] = r.m_opt ? ordered_json(*r.m_opt) : ordered_json(nullptr);
        j["policy"] = r.policy;
        j["params"] = r.params;
        j["machines"] = r.machines;
        j["first_miss"] = r.first_miss ? ordered_json{{"id", r.first_miss->id}, {"t", r.first_miss->time}}
                                       : ordered_json(nullptr);
        j["ratio"] = r.ratio ? ordered_json(to_string(*r.ratio)) : ordered_json(nullptr);
        j["status"] = r.status;
        if (timing)
            j["wall_ms"] = r.wall_ms;
        os << j.dump() << '\n';
    }
    for (const auto& s : result.summary) {
        ordered_json j;
        j["summary"] = s.policy;
        j["rows"] = s.rows;
        j["misses"] = s.misses;
        j["skipped"] = s.skipped;
        j["max_ratio"] = s.max_ratio ? ordered_json(to_string(*s.max_ratio)) : ordered_json(nullptr);
        os << j.dump() << '\n';
    }
    return os.str();
}

ConstantReport report_constants(const BenchResult& result)
{
    std::vector<Rational> values;
    for (const auto& r : result.rows) {
        if (r.policy.rfind("logn", 0) != 0 || !r.m_opt || *r.m_opt <= 0 || r.n < 2)
            continue;
        if (r.status != "ok" && r.status != "miss")
            continue;
        values.push_back(logn_constant(r.machines, *r.m_opt, r.n));
    }
    ConstantReport out;
    out.count = values.size();
    if (values.empty()) {
        out.text = "no rows: the campaign has no logn rows with a computed optimum\n";
        return out;
    }
    std::sort(values.begin(), values.end());
    out.max = values.back();
    // nearest-rank percentile
    const std::size_t rank = (95 * values.size() + 99) / 100;
    out.p95 = values[std::max<std::size_t>(rank, 1) - 1];
    std::ostringstream os;
    os << "rows=" << out.count << " C_max=" << to_string(*out.max) << " (" << decimal(*out.max)
       << ") C_p95=" << to_string(*out.p95) << " (" << decimal(*out.p95) << ")\n";
    out.text = os.str();
    return out;
}

VerifyResult verify(const Instance& instance, const Trace& trace, std::optional<bool> expect_preemptive)
{
    VerifyResult out;
    if (expect_preemptive && *expect_preemptive != trace.preemptive) {
        out.status = 2;
        out.report = std::string("format mismatch: trace is ") +
                     (trace.preemptive ? "preemptive" : "non-preemptive") + " but a " +
                     (*expect_preemptive ? "preemptive" : "non-preemptive") + " schedule was expected\n";
        return out;
    }
    const ValidationReport report = trace.preemptive
                                        ? validate_preemptive(instance, trace.preemptive_schedule)
                                        : validate_nonpreemptive(instance, trace.nonpreemptive_schedule);
    out.status = report.feasible ? 0 : 1;
    out.report = report.summary();
    return out;
}

}  // namespace machmin
