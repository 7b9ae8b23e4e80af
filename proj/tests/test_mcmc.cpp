#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <queue>

#include "fkrep/errors.hpp"
#include "fkrep/identities.hpp"
#include "fkrep/mcmc.hpp"
#include "fkrep/oracle.hpp"

using namespace fkrep;

namespace {

double empirical_tv(const std::map<uint64_t, long long>& counts, long long n,
                    const ExactDistribution& d)
{
    double tv = 0;
    for (uint64_t idx = 0; idx < d.size(); ++idx) {
        auto it = counts.find(idx);
        double emp = it == counts.end() ? 0.0 : double(it->second) / double(n);
        tv += std::fabs(emp - d.prob[idx]);
    }
    return tv / 2;
}

// 3 sigma allowance on top of a TV budget, from the oracle variances
double tv_slack(const ExactDistribution& d, long long n)
{
    double var = 0;
    for (double p : d.prob)
        var += p * (1 - p);
    return 1.5 * std::sqrt(var / double(n));
}

} // namespace

TEST_CASE("parameter conversions round-trip")
{
    CounterRng rng(1);
    for (int i = 0; i < 100; ++i) {
        double x = 0.01 + 0.98 * rng.next_unit();
        double q = 0.5 + 7.5 * rng.next_unit();
        double p = params::p_from_x(x, q);
        CHECK(std::fabs(params::x_from_p(p, q) - x) < 1e-15);
    }
    CHECK(params::p_from_x(0.5, 2.0) == doctest::Approx(2.0 / 3));
    CHECK(params::x_from_beta(params::beta_from_x(0.7)) == doctest::Approx(0.7));
    CHECK(params::sprinkle_rate(0.6) == doctest::Approx(1 - std::sqrt(1 - 0.36)));
}

TEST_CASE("parity quantiles: first terms at beta = 1")
{
    ParityQuantiles pq(1.0);
    CHECK(pq.f_even(0.5) == 0); // 1/cosh(1) ~ 0.648 > 0.5
    CHECK(pq.f_even(0.7) == 2);
    CHECK(pq.f_odd(0.1) == 1); // 1/sinh(1) ~ 0.851 > 0.1
    CHECK(pq.f_odd(0.9) == 3);
    CHECK(pq.even_cum.back() >= 1.0 - 1e-14);
    CHECK(pq.odd_cum.back() >= 1.0 - 1e-14);
    for (std::size_t i = 1; i < pq.even_cum.size(); ++i)
        CHECK(pq.even_cum[i] >= pq.even_cum[i - 1]);
}

TEST_CASE("detailed balance of the heat-bath step on every <= 4 edge graph")
{
    for (auto& [name, g] : oracle_family(4)) {
        INFO(name);
        const int m = g.edge_counti();
        for (bool conditioned : {false, true}) {
            std::optional<SourceSpec> cond;
            ExactDistribution pi = enumerate_measure(MeasureSpec::fk(g, 0.45, 2.0));
            if (conditioned) {
                if (g.vertex_count < 2)
                    continue;
                SourceSpec a = SourceSpec::from_vertices(g.vertex_count, {0, 1});
                cond = a;
                pi = condition_on(pi, sources_event(g, a));
            }
            FkChain chain(g, BoundaryCondition::free(), 0.45, 2.0, cond, 0);
            for (uint64_t idx = 0; idx < pi.size(); ++idx) {
                if (pi.prob[idx] == 0)
                    continue;
                for (int e = 0; e < m; ++e) {
                    uint64_t other = idx ^ (uint64_t(1) << e);
                    // transition prob for the single-edge heat-bath update
                    chain.set_config(BondConfig::from_index(idx, m));
                    double po = chain.conditional_open(e);
                    double p_fwd = (other >> e) & 1 ? po : 1 - po;
                    if (pi.prob[other] == 0) {
                        // the conditional must never leave the support
                        CHECK(p_fwd == 0.0);
                        continue;
                    }
                    chain.set_config(BondConfig::from_index(other, m));
                    double po2 = chain.conditional_open(e);
                    double p_bwd = (idx >> e) & 1 ? po2 : 1 - po2;
                    CHECK(std::fabs(pi.prob[idx] * p_fwd - pi.prob[other] * p_bwd) <
                          1e-12);
                }
            }
        }
    }
}

TEST_CASE("conditioned chain: support closed and irreducible via all-open")
{
    for (auto& [name, g] : oracle_family(4)) {
        if (g.vertex_count < 4)
            continue;
        INFO(name);
        const int m = g.edge_counti();
        SourceSpec a = SourceSpec::from_vertices(g.vertex_count, {0, 2});
        std::vector<uint64_t> support;
        for (uint64_t idx = 0; idx < (uint64_t(1) << m); ++idx)
            if (sources_feasible(g, BondConfig::from_index(idx, m), a))
                support.push_back(idx);
        if (support.empty())
            continue;

        // transitions with positive probability under single-edge updates
        FkChain chain(g, BoundaryCondition::free(), 0.5, 2.0, a, 0);
        std::map<uint64_t, std::vector<uint64_t>> edges_out;
        for (uint64_t idx : support) {
            for (int e = 0; e < m; ++e) {
                chain.set_config(BondConfig::from_index(idx, m));
                double po = chain.conditional_open(e);
                for (int bit : {0, 1}) {
                    double pr = bit ? po : 1 - po;
                    uint64_t to = bit ? idx | (uint64_t(1) << e)
                                      : idx & ~(uint64_t(1) << e);
                    if (pr > 0) {
                        // never leaves the conditioning event
                        CHECK(sources_feasible(g, BondConfig::from_index(to, m), a));
                        edges_out[idx].push_back(to);
                    }
                }
            }
        }
        // reachability from all-open covers the whole support
        std::set<uint64_t> seen{(uint64_t(1) << m) - 1};
        std::queue<uint64_t> q;
        q.push((uint64_t(1) << m) - 1);
        while (!q.empty()) {
            uint64_t cur = q.front();
            q.pop();
            for (uint64_t to : edges_out[cur])
                if (seen.insert(to).second)
                    q.push(to);
        }
        CHECK(seen.size() == support.size());
    }
}

TEST_CASE("isolated edge stationary law matches the two-term conditional")
{
    FiniteGraph p2 = make_path(2);
    FkChain chain(p2, BoundaryCondition::free(), 0.4, 3.0, std::nullopt, 0);
    CounterRng rng(2);
    long long open = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        chain.sweep(rng);
        open += chain.config().get(0);
    }
    double expect = 0.4 / (0.4 + 3.0 * 0.6);
    CHECK(std::fabs(open / double(n) - expect) < 0.005);
}

TEST_CASE("triangle with the other two edges open: conditional is p")
{
    FiniteGraph tri = make_cycle(3);
    FkChain chain(tri, BoundaryCondition::free(), 0.37, 2.0, std::nullopt, 0);
    BondConfig w(3, true);
    chain.set_config(w);
    CHECK(chain.conditional_open(0) == doctest::Approx(0.37));
    w.set(1, false);
    chain.set_config(w);
    CHECK(chain.conditional_open(1) ==
          doctest::Approx(0.37)); // endpoints joined through edges 0 and 2
    w.set(2, false);
    chain.set_config(w);
    CHECK(chain.conditional_open(1) == doctest::Approx(0.37 / (0.37 + 2 * 0.63)));
}

TEST_CASE("4-cycle law vs oracle over a million sweeps")
{
    FiniteGraph c4 = make_cycle(4);
    ExactDistribution pi = enumerate_measure(MeasureSpec::fk(c4, 0.5, 2.0));
    FkChain chain(c4, BoundaryCondition::free(), 0.5, 2.0, std::nullopt, 7);
    CounterRng rng(77);
    std::map<uint64_t, long long> counts;
    const int n = 1000000;
    for (int i = 0; i < 50; ++i)
        chain.sweep(rng);
    for (int i = 0; i < n; ++i) {
        chain.sweep(rng);
        ++counts[chain.config().to_index()];
    }
    CHECK(empirical_tv(counts, n, pi) < 0.02 + tv_slack(pi, n));
    // P[all open] = 1/41; sweeps are correlated, so allow a small margin on
    // top of the 3 sigma binomial band
    double pall = counts[15] / double(n);
    CHECK(std::fabs(pall - 1.0 / 41) < 3 * std::sqrt((1.0 / 41) * (40.0 / 41) / n) + 0.002);
}

TEST_CASE("conditioned 4-cycle matches the conditioned oracle table")
{
    FiniteGraph c4 = make_cycle(4);
    SourceSpec a = SourceSpec::from_vertices(4, {0, 2});
    ExactDistribution pi = condition_on(
        enumerate_measure(MeasureSpec::fk(c4, 0.5, 2.0)), sources_event(c4, a));
    Schedule sched{30, 3};
    FkSampler s(c4, BoundaryCondition::free(), 0.5, 2.0, a, sched, CounterRng(5));
    std::map<uint64_t, long long> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        ++counts[s.next_sample().to_index()];
    CHECK(empirical_tv(counts, n, pi) < 0.02 + tv_slack(pi, n));
}

TEST_CASE("near-saturated box: open fraction at p = 0.999")
{
    FiniteGraph g = build_box({2, 1, {}});
    Schedule sched{20, 2};
    FkSampler s(g, BoundaryCondition::free(), 0.999, 2.0, std::nullopt, sched,
                CounterRng(9));
    double mean = 0;
    for (int i = 0; i < 100; ++i)
        mean += double(s.next_sample().count()) / g.edges.size();
    CHECK(mean / 100 >= 0.99);
}

TEST_CASE("loop sampler on the triangle: no sources and a source pair")
{
    FiniteGraph tri = make_cycle(3);
    // x = 0.5: P[full] = x^3/(1+x^3) = 1/9
    SourceSpec none = SourceSpec::empty(3, 2);
    Schedule sched{20, 2};
    long long nfull = 0;
    const int n = 60000;
    CounterRng rng(13);
    for (int i = 0; i < n; ++i) {
        FlowConfig f = sample_loop(tri, 0.5, 2, none, BoundaryCondition::free(), sched,
                                   rng.split(uint64_t(i)));
        nfull += f.trace().count() == 3;
    }
    double expect = 1.0 / 9;
    CHECK(std::fabs(nfull / double(n) - expect) <
          3 * std::sqrt(expect * (1 - expect) / n) + 0.003);

    // sources {0,1}: oracle comparison of the whole law
    SourceSpec a = SourceSpec::from_vertices(3, {0, 1});
    ExactDistribution loop = enumerate_measure(MeasureSpec::loop(tri, 0.5, a));
    std::map<uint64_t, long long> counts;
    for (int i = 0; i < n; ++i) {
        FlowConfig f = sample_loop(tri, 0.5, 2, a, BoundaryCondition::free(), sched,
                                   CounterRng(14).split(uint64_t(i)));
        ++counts[f.trace().to_index()];
    }
    CHECK(empirical_tv(counts, n, loop) < 0.02 + tv_slack(loop, n));
}

TEST_CASE("q=3 flow sampler trace law on the 4-cycle")
{
    FiniteGraph c4 = make_cycle(4);
    SourceSpec none = SourceSpec::empty(4, 3);
    ExactDistribution flow =
        enumerate_measure(MeasureSpec::qflow(c4, 0.5, 3, none));
    ExactDistribution trace_law = flow_trace_marginal(flow);
    Schedule sched{20, 2};
    std::map<uint64_t, long long> counts;
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        FlowConfig f = sample_loop(c4, 0.5, 3, none, BoundaryCondition::free(), sched,
                                   CounterRng(15).split(uint64_t(i)));
        ++counts[f.trace().to_index()];
    }
    CHECK(empirical_tv(counts, n, trace_law) < 0.02 + tv_slack(trace_law, n));
}

TEST_CASE("current sampler: single edge with endpoint sources is odd")
{
    FiniteGraph p2 = make_path(2);
    SourceSpec a = SourceSpec::from_vertices(2, {0, 1});
    Schedule sched{10, 1};
    const double beta = 1.0;
    long long ones = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        CurrentConfig c =
            sample_current(p2, beta, a, sched, CounterRng(16).split(uint64_t(i)));
        CHECK(c.values[0] % 2 == 1);
        ones += c.values[0] == 1;
    }
    double expect = beta / std::sinh(beta); // beta^1/1! over sinh
    CHECK(std::fabs(ones / double(n) - expect) <
          3 * std::sqrt(expect * (1 - expect) / n) + 0.002);
}

TEST_CASE("sprinkling: identity at 0, saturation at 1, trace law in between")
{
    FiniteGraph tri = make_cycle(3);
    CounterRng rng(17);
    BondConfig w(3);
    w.set(1, true);
    CHECK(sprinkle(w, 0.0, rng) == w);
    CHECK(sprinkle(w, 1.0, rng).count() == 3);

    // trace of the current = loop sprinkled at 1 - sqrt(1-x^2)
    double x = 0.6, beta = params::beta_from_x(x);
    ExactDistribution pair = enumerate_measure(
        MeasureSpec::current_pair(tri, beta, SourceSpec::empty(3, 2)));
    ExactDistribution trace_law = current_trace_marginal(pair);
    Schedule sched{20, 2};
    std::map<uint64_t, long long> counts;
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        CounterRng r = CounterRng(18).split(uint64_t(i));
        FlowConfig f = sample_loop(tri, x, 2, SourceSpec::empty(3, 2),
                                   BoundaryCondition::free(), sched, r.split(1));
        CounterRng sr = r.split(2);
        BondConfig t = sprinkle(f.trace(), params::sprinkle_rate(x), sr);
        ++counts[t.to_index()];
    }
    CHECK(empirical_tv(counts, n, trace_law) < 0.02 + tv_slack(trace_law, n));
}

TEST_CASE("twin-chain diagnostic: fast coalescence off criticality")
{
    FiniteGraph g = build_box({2, 1, {}});
    // p = 0.999: measured once at 1-2 sweeps; frozen bound with 10x margin
    DiagnosticReport hot = convergence_diagnostic(g, BoundaryCondition::free(), 0.999,
                                                  2.0, std::nullopt, 200, 0.01,
                                                  CounterRng(19));
    CHECK(hot.monotone_regime);
    CHECK(hot.sandwich_ok);
    CHECK(hot.coalesced);
    CHECK(hot.coalesce_sweep <= 20);

    DiagnosticReport cold = convergence_diagnostic(g, BoundaryCondition::free(), 0.05,
                                                   2.0, std::nullopt, 200, 0.01,
                                                   CounterRng(20));
    CHECK(cold.coalesced);
    CHECK(cold.coalesce_sweep <= 30);

    // q < 1: sandwich unavailable, statistic agreement only
    DiagnosticReport sub = convergence_diagnostic(g, BoundaryCondition::free(), 0.5,
                                                  0.5, std::nullopt, 400, 0.02,
                                                  CounterRng(21));
    CHECK(!sub.monotone_regime);
    CHECK(sub.agree_sweep >= 0);

    // conditioned diagnostic runs and coalesces on a small box
    SourceSpec a = SourceSpec::empty(g.vertex_count, 2);
    a.labels[g.boundary[0]] = 1;
    a.labels[g.boundary[1]] = 1;
    DiagnosticReport cond = convergence_diagnostic(g, BoundaryCondition::free(), 0.8,
                                                   2.0, a, 400, 0.02, CounterRng(22));
    CHECK(!cond.monotone_regime);
    CHECK(cond.coalesced);
}

TEST_CASE("chain start states respect conditioning")
{
    FiniteGraph p3 = make_path(3);
    SourceSpec a = SourceSpec::from_vertices(3, {0, 2});
    FkChain chain(p3, BoundaryCondition::free(), 0.5, 2.0, a, 0);
    CHECK_THROWS_AS(chain.set_all_closed(), InfeasibleSourcesError);

    // sources in different components of the full graph: infeasible outright
    FiniteGraph two;
    two.vertex_count = 4;
    two.edges = {{0, 1}, {2, 3}};
    two.build_adjacency();
    SourceSpec bad = SourceSpec::from_vertices(4, {0, 2});
    CHECK_THROWS_AS(FkChain(two, BoundaryCondition::free(), 0.5, 2.0, bad, 0),
                    InfeasibleSourcesError);
}

TEST_CASE("wired chain matches the wired oracle (small path, exact law)")
{
    // boundary endpoints wired: the quotient is a 3-cycle plus a loop edge
    FiniteGraph p4 = make_path(4);
    ExactDistribution pi = enumerate_measure(
        MeasureSpec::fk(p4, 0.6, 2.0, BoundaryCondition::wired()));
    Schedule sched{30, 5};
    FkSampler s(p4, BoundaryCondition::wired(), 0.6, 2.0, std::nullopt, sched,
                CounterRng(23));
    std::map<uint64_t, long long> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        ++counts[s.next_sample().to_index()];
    CHECK(empirical_tv(counts, n, pi) < 0.02 + tv_slack(pi, n));
}

TEST_CASE("wired chain on a 12-edge box: exact single-edge marginals")
{
    // the full table is too fine for an empirical TV at this sample size;
    // per-edge marginals pin the law instead
    FiniteGraph g = build_box({2, 1, {}});
    ExactDistribution pi = enumerate_measure(
        MeasureSpec::fk(g, 0.6, 2.0, BoundaryCondition::wired()));
    std::vector<double> exact(g.edges.size(), 0.0);
    for (uint64_t idx = 0; idx < pi.size(); ++idx)
        for (int e = 0; e < g.edge_counti(); ++e)
            if ((idx >> e) & 1)
                exact[e] += pi.prob[idx];

    FkChain chain(g, BoundaryCondition::wired(), 0.6, 2.0, std::nullopt, 7);
    CounterRng rng(23);
    for (int i = 0; i < 100; ++i)
        chain.sweep(rng);
    std::vector<double> emp(g.edges.size(), 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        chain.sweep(rng);
        for (int e = 0; e < g.edge_counti(); ++e)
            emp[e] += chain.config().get(e);
    }
    for (int e = 0; e < g.edge_counti(); ++e)
        CHECK(std::fabs(emp[e] / n - exact[e]) < 0.01);
}
