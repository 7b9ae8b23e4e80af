#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "fkrep/coupling.hpp"
#include "fkrep/identities.hpp"

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

} // namespace

TEST_CASE("single-edge revelation: one uniform drives both participants")
{
    FiniteGraph p2 = make_path(2);
    ExactDistribution lo = enumerate_measure(MeasureSpec::bernoulli(p2, 0.3));
    ExactDistribution hi = enumerate_measure(MeasureSpec::bernoulli(p2, 0.7));
    CouplingPlan plan = CouplingPlan::make({&lo, &hi});
    // U = 0.5: the p=0.3 copy closes, the p=0.7 copy opens
    CHECK(plan.cond[0][0][0] == doctest::Approx(0.3));
    CHECK(plan.cond[1][0][0] == doctest::Approx(0.7));
    CounterRng rng(1);
    int lo_open = 0, hi_open = 0, n = 100000, ordered = 0;
    for (int i = 0; i < n; ++i) {
        auto out = explore(plan, rng);
        lo_open += out[0].get(0);
        hi_open += out[1].get(0);
        ordered += out[0].subset_of(out[1]);
    }
    CHECK(ordered == n);
    CHECK(std::fabs(lo_open / double(n) - 0.3) < 0.006);
    CHECK(std::fabs(hi_open / double(n) - 0.7) < 0.006);
}

TEST_CASE("explore marginals match the oracle tables")
{
    FiniteGraph c4 = make_cycle(4);
    ExactDistribution fk = enumerate_measure(MeasureSpec::fk(c4, 0.55, 2.0));
    SourceSpec a = SourceSpec::from_vertices(4, {0, 2});
    ExactDistribution cond = condition_on(fk, sources_event(c4, a));
    CouplingPlan plan = CouplingPlan::make({&fk, &cond});
    CounterRng rng(2);
    std::map<uint64_t, long long> h0, h1;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto out = explore(plan, rng);
        ++h0[out[0].to_index()];
        ++h1[out[1].to_index()];
    }
    CHECK(empirical_tv(h0, n, fk) < 0.02);
    CHECK(empirical_tv(h1, n, cond) < 0.02);
}

TEST_CASE("ordering guarantee for strongly dominating pairs, asserted on every draw")
{
    // (free fk, fk | F_A) on the 4-cycle and the 2x3 grid
    for (auto* make : {+[]() { return make_cycle(4); }, +[]() { return make_grid_2xk(3); }}) {
        FiniteGraph g = make();
        SourceSpec a = SourceSpec::from_vertices(g.vertex_count, {0, g.vertex_count - 1});
        ExactDistribution fk = enumerate_measure(MeasureSpec::fk(g, 0.5, 2.0));
        ExactDistribution cond = condition_on(fk, sources_event(g, a));
        REQUIRE(strongly_dominates(cond, fk));
        CouplingPlan plan = CouplingPlan::make({&fk, &cond});
        CounterRng rng(3);
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            auto out = explore(plan, rng);
            REQUIRE(out[0].subset_of(out[1]));
        }
    }
}

TEST_CASE("nested boxes under one exploration: ordered and disjoint-independent")
{
    // 3x3 box with the lower-left plaquette as the sub-box
    FiniteGraph big = build_box({2, 1, {}});
    ExactDistribution fk_big = enumerate_measure(MeasureSpec::fk(big, 0.6, 2.0));

    // edges of the sub-box: all edges with both endpoints in [-1,0]^2
    std::vector<int> sub_edges;
    for (std::size_t e = 0; e < big.edges.size(); ++e) {
        auto [u, v] = big.edges[e];
        bool inu = big.coord(u)[0] <= 0 && big.coord(u)[1] <= 0;
        bool inv = big.coord(v)[0] <= 0 && big.coord(v)[1] <= 0;
        if (inu && inv)
            sub_edges.push_back(int(e));
    }
    REQUIRE(sub_edges.size() == 4);
    FiniteGraph quad = make_cycle(4);
    // enumerate the sub-box fk on its own 4 edges, then embed
    ExactDistribution fk_small = enumerate_measure(MeasureSpec::fk(quad, 0.6, 2.0));
    ExactDistribution embedded = embed_closed(fk_small, sub_edges, big.edge_counti());

    CouplingPlan plan = CouplingPlan::make({&embedded, &fk_big});
    CounterRng rng(4);
    const int n = 50000;
    // the embedded sub-box never touches edges outside its own box
    int far_edge = -1;
    for (std::size_t e = 0; e < big.edges.size(); ++e) {
        auto [u, v] = big.edges[e];
        if (big.coord(u)[0] == 1 && big.coord(v)[0] == 1)
            far_edge = int(e);
    }
    REQUIRE(far_edge >= 0);
    long long joint[2][2] = {};
    for (int i = 0; i < n; ++i) {
        auto out = explore(plan, rng);
        REQUIRE(out[0].subset_of(out[1]));
        ++joint[out[0].get(sub_edges[0])][out[0].get(far_edge)];
    }
    // the embedded sub-box never opens the far edge
    CHECK(joint[0][1] == 0);
    CHECK(joint[1][1] == 0);
}

TEST_CASE("exploration of two disjoint boxes: independent coordinates")
{
    // two disjoint 4-cycles embedded into one 8-edge space
    FiniteGraph c4 = make_cycle(4);
    ExactDistribution fk = enumerate_measure(MeasureSpec::fk(c4, 0.5, 2.0));
    ExactDistribution left = embed_closed(fk, {0, 1, 2, 3}, 8);
    ExactDistribution right = embed_closed(fk, {4, 5, 6, 7}, 8);
    CouplingPlan plan = CouplingPlan::make({&left, &right});
    CounterRng rng(5);
    const int n = 100000;
    long long joint[2][2] = {};
    for (int i = 0; i < n; ++i) {
        auto out = explore(plan, rng);
        ++joint[out[0].get(0)][out[1].get(4)];
    }
    // chi-square with 1 dof on the 2x2 table
    double tot = n;
    double r1 = joint[1][0] + joint[1][1], c1 = joint[0][1] + joint[1][1];
    double chi2 = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double er = (a ? r1 : tot - r1) * (b ? c1 : tot - c1) / tot;
            double d = joint[a][b] - er;
            chi2 += d * d / er;
        }
    CHECK(chi2 < 10.83); // 0.1% critical value
}

TEST_CASE("law is invariant under the revelation order")
{
    FiniteGraph g = make_grid_2xk(3);
    SourceSpec a = SourceSpec::from_vertices(g.vertex_count, {0, 5});
    ExactDistribution fk = enumerate_measure(MeasureSpec::fk(g, 0.45, 2.0));
    ExactDistribution cond = condition_on(fk, sources_event(g, a));
    CouplingPlan p1 = CouplingPlan::make({&cond});
    std::vector<int> rev(g.edge_counti());
    for (int e = 0; e < g.edge_counti(); ++e)
        rev[e] = g.edge_counti() - 1 - e;
    CouplingPlan p2 = CouplingPlan::make({&cond}, rev);
    CounterRng r1(6), r2(7);
    std::map<uint64_t, long long> h1, h2;
    const int n = 80000;
    for (int i = 0; i < n; ++i) {
        ++h1[explore(p1, r1)[0].to_index()];
        ++h2[explore(p2, r2)[0].to_index()];
    }
    CHECK(empirical_tv(h1, n, cond) < 0.02);
    CHECK(empirical_tv(h2, n, cond) < 0.02);
}

TEST_CASE("grand coupling: CBC pair and parameter pair stay ordered every sweep")
{
    FiniteGraph g = build_box({2, 4, {}});
    {
        GrandSpec free{&g, BoundaryCondition::free(), 0.7, 2.0, std::nullopt, {}};
        GrandSpec wired{&g, BoundaryCondition::wired(), 0.7, 2.0, std::nullopt, {}};
        GrandResult res = grand_couple({free, wired}, g.edge_counti(), 60, CounterRng(8));
        CHECK(res.pairwise_ordered[0][1]); // free below wired throughout
    }
    {
        GrandSpec lo{&g, BoundaryCondition::free(), 0.4, 2.0, std::nullopt, {}};
        GrandSpec hi{&g, BoundaryCondition::free(), 0.7, 2.0, std::nullopt, {}};
        GrandResult res = grand_couple({lo, hi}, g.edge_counti(), 60, CounterRng(9));
        CHECK(res.pairwise_ordered[0][1]);
    }
}

TEST_CASE("grand coupling: ten nested boxes stay ordered along inclusions")
{
    // boxes of radius 1..10 inside the radius-10 edge space
    FiniteGraph big = build_box({2, 10, {}});
    std::vector<FiniteGraph> boxes;
    std::vector<GrandSpec> specs;
    std::vector<std::vector<int>> maps;
    for (int r = 1; r <= 10; ++r)
        boxes.push_back(build_box({2, r, {}}));
    for (int r = 1; r <= 10; ++r) {
        FiniteGraph& sub = boxes[r - 1];
        std::vector<int> e2full(sub.edges.size());
        for (std::size_t e = 0; e < sub.edges.size(); ++e) {
            auto [u, v] = sub.edges[e];
            std::vector<int> cu(sub.coord(u), sub.coord(u) + 2);
            std::vector<int> cv(sub.coord(v), sub.coord(v) + 2);
            int bu = big.vertex_at(cu), bv = big.vertex_at(cv);
            int found = -1;
            for (int i = big.adj_offset[bu]; i < big.adj_offset[bu + 1]; ++i)
                if (big.adj[i].to == bv)
                    found = big.adj[i].edge;
            REQUIRE(found >= 0);
            e2full[e] = found;
        }
        maps.push_back(e2full);
        specs.push_back(
            {&boxes[r - 1], BoundaryCondition::free(), 0.7, 2.0, std::nullopt, maps.back()});
    }
    int ordered = 0, replicas = 20;
    for (int rep = 0; rep < replicas; ++rep) {
        GrandResult res =
            grand_couple(specs, big.edge_counti(), 40, CounterRng(100 + rep));
        bool ok = true;
        for (int r = 0; r + 1 < 10; ++r)
            ok = ok && res.pairwise_ordered[r][r + 1];
        ordered += ok;
    }
    CHECK(ordered >= int(replicas * 0.99));
}
