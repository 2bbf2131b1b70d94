#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "machmin/harness.hpp"

using namespace machmin;

namespace {

constexpr int kOk = 0;
constexpr int kMiss = 1;
constexpr int kUsage = 2;
constexpr int kCap = 3;

using Params = std::map<std::string, std::string>;

Params parse_params(const std::string& text)
{
    Params out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("bad parameter '" + item + "', expected key=value");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

std::int64_t param_int(const Params& p, const std::string& key, std::int64_t fallback)
{
    auto it = p.find(key);
    if (it == p.end())
        return fallback;
    std::size_t used = 0;
    const auto v = std::stoll(it->second, &used);
    if (used != it->second.size())
        throw std::invalid_argument("parameter " + key + " is not an integer");
    return v;
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

std::string online_name(const std::string& policy)
{
    static const std::map<std::string, std::string> table{
        {"agreeable-p", "agreeable-p-online"}, {"agreeable-np", "agreeable-np-online"},
        {"equalp-p", "equalp-online"},         {"equalp-semi", "equalp-np-online"},
        {"uniform-p", "uniform-p-online"},     {"uniform-np", "uniform-np-online"},
    };
    auto it = table.find(policy);
    if (it == table.end())
        throw std::invalid_argument("policy '" + policy + "' has no online variant");
    return it->second;
}

std::string miss_text(const std::optional<Miss>& miss)
{
    if (!miss)
        return "none";
    return "job " + std::to_string(miss->id) + " at t=" + std::to_string(miss->time);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"machmin: online machine minimization toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an instance");
    std::string family = "random";
    std::string params_text;
    std::uint64_t seed = 1;
    std::string gen_out;
    gen->add_option("--family", family, "random | llf-lb | dord")->check(CLI::IsMember({"random", "llf-lb", "dord"}));
    gen->add_option("--params", params_text,
                    "key=value list; random: profile,n,horizon,max_p,p,alpha; "
                    "llf-lb: m,c,k; dord: m,n,k");
    gen->add_option("--seed", seed);
    gen->add_option("-o,--output", gen_out);

    // run
    auto* run = app.add_subcommand("run", "Simulate a policy on an instance");
    std::string policy;
    std::optional<int> machines;
    std::optional<int> m_opt;
    std::string alpha_text;
    bool online = false;
    int cap = kDefaultNonpreemptiveCap;
    std::string run_file;
    run->add_option("--policy", policy)->required();
    run->add_option("--machines", machines, "budget for edf, llf, edf-np");
    run->add_option("--m", m_opt, "optimum for semi-online policies (computed if absent)");
    run->add_option("--alpha", alpha_text);
    run->add_flag("--online", online);
    run->add_option("--cap", cap, "job cap of the exact non-preemptive oracle");
    run->add_option("instance", run_file)->required();

    // opt
    auto* opt = app.add_subcommand("opt", "Compute the offline optimum");
    bool opt_np = false;
    bool opt_density = false;
    std::string opt_file;
    opt->add_flag("--preemptive", "flow-based optimum (default)");
    opt->add_flag("--nonpreemptive", opt_np);
    opt->add_flag("--strong-density", opt_density);
    opt->add_option("--cap", cap);
    opt->add_option("instance", opt_file)->required();

    // verify
    auto* ver = app.add_subcommand("verify", "Check a schedule trace against an instance");
    std::string ver_instance;
    std::string ver_trace;
    std::string expect;
    ver->add_option("instance", ver_instance)->required();
    ver->add_option("trace", ver_trace)->required();
    ver->add_option("--expect", expect, "preemptive | nonpreemptive")
        ->check(CLI::IsMember({"preemptive", "nonpreemptive"}));

    // bench
    auto* ben = app.add_subcommand("bench", "Run a seeded benchmark campaign");
    std::string profile = "general";
    std::size_t n = 8;
    std::size_t count = 10;
    Time horizon = 16;
    Time max_p = 6;
    Time p = 2;
    std::string policies_text = "edf@m";
    int threads = 1;
    bool timing = false;
    std::string format = "csv";
    std::string bench_out;
    bool constants = false;
    ben->add_option("--profile", profile, "general|agreeable|equal-p|uniform-d|loose|tight");
    ben->add_option("--n", n);
    ben->add_option("--count", count);
    ben->add_option("--seed", seed);
    ben->add_option("--horizon", horizon);
    ben->add_option("--max-p", max_p);
    ben->add_option("--p", p);
    ben->add_option("--alpha", alpha_text, "profile alpha for loose/tight");
    ben->add_option("--policies", policies_text, "comma-separated, e.g. edf@3m,agreeable-p,logn");
    ben->add_option("--threads", threads);
    ben->add_flag("--timing", timing, "add a wall_ms column (not byte-stable)");
    ben->add_option("--format", format)->check(CLI::IsMember({"csv", "jsonl"}));
    ben->add_option("--cap", cap);
    ben->add_option("-o,--output", bench_out);
    ben->add_flag("--constants", constants, "report the logn constant on stderr");

    // adversary
    auto* adv = app.add_subcommand("adversary", "Play the adaptive 8/7 adversary");
    std::string adv_policy = "edf";
    int adv_m = 4;
    std::string c_text = "9/8";
    std::string adv_out;
    adv->add_option("--policy", adv_policy, "edf | llf")->check(CLI::IsMember({"edf", "llf"}));
    adv->add_option("--m", adv_m);
    adv->add_option("--c", c_text);
    adv->add_option("-o,--output", adv_out, "write the released instance");

    // transform
    auto* tr = app.add_subcommand("transform", "Apply a laxity transform");
    std::string kind_text;
    std::string param_text = "1/2";
    std::string tr_file;
    tr->add_option("--kind", kind_text, "beta|left|right|lshort|rshort")->required();
    tr->add_option("--param", param_text);
    tr->add_option("instance", tr_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            const Params prm = parse_params(params_text);
            Instance inst;
            if (family == "random") {
                RandomSpec spec;
                spec.seed = seed;
                if (prm.count("profile"))
                    spec.profile = parse_profile(prm.at("profile"));
                spec.n = static_cast<std::size_t>(param_int(prm, "n", 8));
                spec.horizon = param_int(prm, "horizon", spec.horizon);
                spec.max_p = param_int(prm, "max_p", spec.max_p);
                spec.p = param_int(prm, "p", spec.p);
                if (prm.count("alpha"))
                    spec.alpha = parse_rational(prm.at("alpha"));
                inst = gen_random(spec);
            } else if (family == "llf-lb") {
                auto lb = gen_llf_lower_bound(static_cast<int>(param_int(prm, "m", 2)),
                                              static_cast<int>(param_int(prm, "c", 2)),
                                              static_cast<int>(param_int(prm, "k", 1)));
                std::cerr << "llf machines=" << lb.llf_machines << " certified=" << lb.certified << '\n';
                inst = lb.instance;
            } else {
                const int m = static_cast<int>(param_int(prm, "m", 2));
                const int nn = static_cast<int>(param_int(prm, "n", 6));
                auto fam = gen_deadline_ordered_family(m, nn);
                const auto k = param_int(prm, "k", nn - m);
                if (k < 1 || k > nn - m)
                    throw std::invalid_argument("k must lie in [1, n-m]");
                const auto idx = static_cast<std::size_t>(k - 1);
                std::cerr << "member J_" << k << " certified=" << fam.certified[idx] << '\n';
                inst = fam.members[idx];
            }
            emit(gen_out, serialize_instance(inst));
            return kOk;
        }

        if (*run) {
            const Instance inst = read_instance_file(run_file);
            RunOptions opts;
            opts.machines = machines;
            opts.m = m_opt;
            opts.nonpreemptive_cap = cap;
            if (!alpha_text.empty())
                opts.alpha = parse_rational(alpha_text);
            const std::string name = online ? online_name(policy) : policy;
            const PolicyResult res = run_policy(name, inst, opts);
            std::cout << (res.run.preemptive ? serialize_trace(res.run.schedule)
                                             : serialize_trace(res.run.starts));
            std::cerr << "policy=" << res.run.policy << " machines=" << res.machines
                      << " misses=" << res.run.misses.size() << " first_miss=" << miss_text(res.run.first_miss);
            if (res.run.scale != 1)
                std::cerr << " time_scale=" << res.run.scale;
            std::cerr << '\n';
            if (res.logn)
                std::cerr << "monitor ok=" << res.logn->ok()
                          << " min_laxity_ratio=" << to_string(res.logn->min_laxity_ratio)
                          << " max_h=" << res.logn->max_h << " max_mu=" << res.logn->max_mu << '\n';
            if (res.doubling)
                std::cerr << "epochs=" << res.doubling->epochs.size()
                          << " opened=" << res.doubling->check.opened_machines
                          << " double_check=" << res.doubling->check.ok() << '\n';
            return res.run.ok() ? kOk : kMiss;
        }

        if (*opt) {
            const Instance inst = read_instance_file(opt_file);
            if (opt_density) {
                const auto sd = strong_density_exact(inst);
                std::cout << to_string(sd.value) << '\n';
            } else if (opt_np) {
                std::cout << optimum_nonpreemptive_exact(inst, cap) << '\n';
            } else {
                std::cout << optimum_preemptive(inst) << '\n';
            }
            return kOk;
        }

        if (*ver) {
            const Instance inst = read_instance_file(ver_instance);
            std::ifstream in(ver_trace);
            if (!in)
                throw std::runtime_error("cannot read " + ver_trace);
            std::stringstream buf;
            buf << in.rdbuf();
            const Trace trace = parse_trace(buf.str());
            std::optional<bool> expected;
            if (!expect.empty())
                expected = expect == "preemptive";
            const auto res = verify(inst, trace, expected);
            std::cout << res.report;
            return res.status == 0 ? kOk : (res.status == 2 ? kUsage : kMiss);
        }

        if (*ben) {
            Campaign c;
            c.spec.profile = parse_profile(profile);
            c.spec.n = n;
            c.spec.seed = seed;
            c.spec.horizon = horizon;
            c.spec.max_p = max_p;
            c.spec.p = p;
            if (!alpha_text.empty())
                c.spec.alpha = parse_rational(alpha_text);
            c.count = count;
            c.threads = threads;
            c.timing = timing;
            c.nonpreemptive_cap = cap;
            std::stringstream ss(policies_text);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty())
                    c.policies.push_back(item);
            const BenchResult res = bench(c);
            emit(bench_out, format == "csv" ? to_csv(res, timing) : to_jsonl(res, timing));
            if (constants)
                std::cerr << report_constants(res).text;
            for (const auto& s : res.summary)
                if (s.misses > 0)
                    return kMiss;
            return kOk;
        }

        if (*adv) {
            const Rational c = parse_rational(c_text);
            const int budget = static_cast<int>(floor_rational(c * Rational(adv_m)));
            std::unique_ptr<OnlinePolicy> pol;
            if (adv_policy == "edf")
                pol = std::make_unique<EdfPolicy>(budget);
            else
                pol = std::make_unique<LlfPolicy>(budget);
            const GameOutcome g = play_eight_sevenths(*pol, adv_m, c);
            std::cout << "phase,start,residue_before,due_at_check,residue_after,certified\n";
            for (std::size_t i = 0; i < g.phases.size(); ++i) {
                const auto& ph = g.phases[i];
                std::cout << i << ',' << ph.start << ',' << ph.residue_before << ',' << ph.due_at_check << ','
                          << (ph.residue_after ? std::to_string(*ph.residue_after) : "") << ','
                          << ph.certified << '\n';
            }
            std::cout << "policy=" << g.policy << " budget=" << g.budget << " forced_release=" << g.forced_release
                      << " missed=" << g.missed << " first_miss=" << miss_text(g.first_miss)
                      << " growth_bound=" << to_string(g.growth_bound) << " growth_ok=" << g.growth_ok
                      << " certified=" << g.all_certified << " phase_limit=" << g.phase_limit << '\n';
            if (!adv_out.empty())
                write_text_file(adv_out, serialize_instance(g.instance));
            return g.missed ? kMiss : kOk;
        }

        if (*tr) {
            const Instance inst = read_instance_file(tr_file);
            const auto res = transform(inst, {parse_transform_kind(kind_text), parse_rational(param_text)});
            std::cout << serialize_instance(res.instance);
            std::cerr << "scale=" << res.scale << " dropped=" << res.dropped.size() << '\n';
            return kOk;
        }
    } catch (const OracleCapExceeded& e) {
        std::cerr << "oracle cap: " << e.what() << '\n';
        return kCap;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
