#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fkrep/config.hpp"
#include "fkrep/rng.hpp"

using namespace fkrep;

namespace {

BondConfig bc_of(const FiniteGraph& g, std::initializer_list<int> open)
{
    BondConfig w(g.edges.size());
    for (int e : open)
        w.set(e, true);
    return w;
}

} // namespace

TEST_CASE("cluster counts on the 4-cycle")
{
    FiniteGraph c4 = make_cycle(4);
    CHECK(clusters(c4, BondConfig(4)).kappa == 4);
    CHECK(clusters(c4, bc_of(c4, {0})).kappa == 3);
    CHECK(clusters(c4, bc_of(c4, {0, 1, 2, 3})).kappa == 1);

    // all four vertices wired: a single class regardless of the bonds
    c4.boundary = {0, 1, 2, 3};
    CHECK(clusters(c4, BondConfig(4), BoundaryCondition::wired()).kappa == 1);

    CHECK_THROWS_AS(
        clusters(c4, BondConfig(4), BoundaryCondition::partition({{0, 7}})),
        std::invalid_argument);
}

TEST_CASE("partition boundary conditions merge only their classes")
{
    FiniteGraph p4 = make_path(4); // boundary = {0, 3}
    auto lab = clusters(p4, BondConfig(3), BoundaryCondition::partition({{0, 3}}));
    CHECK(lab.kappa == 3);

    FiniteGraph c4 = make_cycle(4);
    c4.boundary = {0, 1, 2, 3};
    auto lab2 =
        clusters(c4, BondConfig(4), BoundaryCondition::partition({{0, 2}, {1, 3}}));
    CHECK(lab2.kappa == 2);
}

TEST_CASE("flow sources: q=2 and q=3")
{
    FiniteGraph p3 = make_path(3);
    FlowConfig f = FlowConfig::zero(2, 2);
    f.values = {1, 0};
    SourceSpec s = flow_sources(p3, f);
    CHECK(s.labels == std::vector<int>{1, 1, 0});

    FiniteGraph tri = make_cycle(3);
    FlowConfig circ = FlowConfig::zero(3, 3);
    // edges (0,1),(1,2),(2,0): unit circulation
    circ.q = 3;
    circ.values = {1, 1, 1};
    SourceSpec c = flow_sources(tri, circ);
    CHECK(c.labels == std::vector<int>{0, 0, 0});

    FlowConfig path_flow = FlowConfig::zero(2, 3);
    path_flow.q = 3;
    path_flow.values = {1, 1}; // unit flow 0 -> 1 -> 2
    SourceSpec ps = flow_sources(p3, path_flow);
    CHECK(ps.labels == std::vector<int>{1, 0, 2});
}

TEST_CASE("source feasibility is the per-cluster criterion")
{
    FiniteGraph p3 = make_path(3);
    SourceSpec ends = SourceSpec::from_vertices(3, {0, 2});
    CHECK(sources_feasible(p3, bc_of(p3, {0, 1}), ends));
    CHECK(!sources_feasible(p3, bc_of(p3, {0}), ends));

    SourceSpec odd = SourceSpec::from_vertices(3, {0});
    CHECK_THROWS_AS(sources_feasible(p3, bc_of(p3, {0, 1}), odd),
                    std::invalid_argument);

    // q=3: cluster sums 2 and 1 are not zero
    SourceSpec q3 = SourceSpec::empty(3, 3);
    q3.labels = {2, 0, 1};
    CHECK(!sources_feasible(p3, bc_of(p3, {0}), q3));
    CHECK(sources_feasible(p3, bc_of(p3, {0, 1}), q3));
}

TEST_CASE("boundary-relaxed feasibility")
{
    FiniteGraph p5 = make_path(5); // boundary {0, 4}
    // |A| even, one interior cluster holding all of A
    SourceSpec a = SourceSpec::from_vertices(5, {1, 3});
    CHECK(sources_feasible_relaxed(p5, bc_of(p5, {1, 2}), a));
    // single source whose cluster touches the boundary
    SourceSpec one = SourceSpec::from_vertices(5, {1});
    CHECK(sources_feasible_relaxed(p5, bc_of(p5, {0}), one));
    // single source stranded in the interior
    CHECK(!sources_feasible_relaxed(p5, bc_of(p5, {1}), one));
}

TEST_CASE("unique crossing in the annulus")
{
    FiniteGraph g = build_box({2, 4, {}});
    BondConfig all(g.edges.size(), true);
    CHECK(unique_crossing(g, all, 2, 4));
    CHECK(!unique_crossing(g, BondConfig(g.edges.size()), 2, 4));

    // two disjoint fully-open radial corridors, east and west along y = 0
    BondConfig two(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        const int* cu = g.coord(u);
        const int* cv = g.coord(v);
        if (cu[1] == 0 && cv[1] == 0 && std::abs(cu[0]) >= 3 && std::abs(cv[0]) >= 3)
            two.set(e, true);
    }
    CHECK(!unique_crossing(g, two, 2, 4));

    // one corridor only: a unique crossing cluster
    BondConfig one(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        const int* cu = g.coord(u);
        const int* cv = g.coord(v);
        if (cu[1] == 0 && cv[1] == 0 && cu[0] >= 3 && cv[0] >= 3)
            one.set(e, true);
    }
    CHECK(unique_crossing(g, one, 2, 4));

    CHECK_THROWS_AS(unique_crossing(g, all, 4, 4), std::invalid_argument);
}

TEST_CASE("giant event on saturated and empty configurations")
{
    FiniteGraph g = build_box({2, 3, {}});
    BondConfig all(g.edges.size(), true);
    GiantResult res = giant_event(g, all, 0.2, 1.0, 1);
    CHECK(res.ok);
    CHECK(res.giant.size() == std::size_t(g.vertex_count));

    GiantResult none = giant_event(g, BondConfig(g.edges.size()), 0.2, 1.0, 1);
    CHECK(!none.ok);
    CHECK(none.giant.empty());
}

TEST_CASE("giant event third condition: stray middling clusters")
{
    FiniteGraph g = build_box({2, 3, {}});
    // hand-built configuration: a face-spanning giant plus a separate
    // cluster of size >= L0; conditions (i)-(iii) evaluated independently
    // from the cluster labelling below
    BondConfig w(g.edges.size());
    auto open_if = [&](auto pred) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            auto [u, v] = g.edges[e];
            if (pred(g.coord(u), g.coord(v)))
                w.set(e, true);
        }
    };
    // giant: everything with x <= 1, plus the row y = 0 reaching x = 3
    open_if([](const int* a, const int* b) {
        return (a[0] <= 1 && b[0] <= 1) || (a[1] == 0 && b[1] == 0);
    });
    // stray cluster: the column x = 3 without its y = 0 contact... the row
    // y=0 touches it, so carve the stray from the column x = 3, y >= 1
    // minus the edge (3,0)-(3,1)
    open_if([](const int* a, const int* b) {
        return a[0] == 3 && b[0] == 3 && a[1] >= 1 && b[1] >= 1;
    });

    ClusterLabeling lab = clusters(g, w);
    GiantResult res = giant_event(g, w, 0.25, 0.8, 3);
    // evaluated by direct check: the giant touches all faces through the
    // left block plus the y=0 row; density (49 - 6 - 2*... ) work it out via
    // the labelling instead of hardcoding
    int giant_root = lab.cluster_of[g.vertex_at({0, 0})];
    int gsize = lab.cluster_size[giant_root];
    bool density_ok = gsize >= (0.8 - 0.25) * g.vertex_count;
    int stray = 0;
    for (int v = 0; v < g.vertex_count; ++v)
        if (lab.cluster_of[v] != giant_root &&
            lab.cluster_size[lab.cluster_of[v]] >= 3)
            ++stray;
    bool stray_ok = stray <= 0.25 * g.vertex_count;
    CHECK(res.ok == (density_ok && stray_ok));
    if (res.ok)
        CHECK(int(res.giant.size()) == gsize);
}

TEST_CASE("current odd part and trace")
{
    CurrentConfig n;
    n.values = {0, 1, 2, 3};
    CHECK(odd_part(n).to_string() == "0101");
    CHECK(trace(n).to_string() == "0111");
    CHECK(odd_part(n).subset_of(trace(n)));
}

TEST_CASE("bond config algebra")
{
    BondConfig a = BondConfig::from_index(0b0101, 4); // 1010 as a string
    BondConfig b = BondConfig::from_index(0b0110, 4);
    CHECK((a | b).to_index() == 0b0111);
    CHECK((a & b).to_index() == 0b0100);
    CHECK((a ^ b).to_index() == 0b0011);
    CHECK(a.to_string() == "1010");
    BondConfig big(100);
    big.set(99, true);
    CHECK(big.count() == 1);
    CHECK_THROWS_AS(big.to_index(), std::invalid_argument);
    CHECK_THROWS_AS((void)(a | big), std::invalid_argument);
}

TEST_CASE("kappa drops by at most one per added edge")
{
    FiniteGraph g = make_grid_2xk(3);
    CounterRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        BondConfig w(g.edges.size());
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            if (rng.next_u64() & 1)
                w.set(e, true);
        int k0 = clusters(g, w).kappa;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (w.get(e))
                continue;
            BondConfig w2 = w;
            w2.set(e, true);
            int k1 = clusters(g, w2).kappa;
            CHECK(k0 - k1 >= 0);
            CHECK(k0 - k1 <= 1);
        }
    }
}

TEST_CASE("explored sources merge labels over revealed clusters")
{
    FiniteGraph p4 = make_path(4);
    SourceSpec a = SourceSpec::from_vertices(4, {0, 1, 2, 3});
    BondConfig xi(p4.edges.size());
    xi.set(0, true); // merge 0-1
    std::vector<int> cls;
    SourceSpec out = explored_sources(p4, xi, a, &cls);
    CHECK(cls[0] == cls[1]);
    int sum = 0;
    for (int v = 0; v < 4; ++v)
        sum += out.labels[v];
    CHECK(sum % 2 == 0);
    CHECK(out.labels[cls[0]] == 0); // two sources merged cancel
    CHECK(out.labels[2] == 1);
    CHECK(out.labels[3] == 1);
}
