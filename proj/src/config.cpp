#include "fkrep/config.hpp"

#include <algorithm>

namespace fkrep {

BondConfig odd_part(const CurrentConfig& n)
{
    BondConfig b(n.values.size());
    for (std::size_t e = 0; e < n.values.size(); ++e)
        if (n.values[e] & 1)
            b.set(e, true);
    return b;
}

BondConfig trace(const CurrentConfig& n)
{
    BondConfig b(n.values.size());
    for (std::size_t e = 0; e < n.values.size(); ++e)
        if (n.values[e] >= 1)
            b.set(e, true);
    return b;
}

ClusterLabeling clusters(const FiniteGraph& g, const BondConfig& w,
                         const BoundaryCondition& bc)
{
    if (w.size() != g.edges.size())
        throw std::invalid_argument("clusters: configuration does not index this graph");
    UnionFind uf(g.vertex_count);
    switch (bc.kind) {
    case BoundaryCondition::Free:
        break;
    case BoundaryCondition::Wired:
        for (std::size_t i = 1; i < g.boundary.size(); ++i)
            uf.unite(g.boundary[0], g.boundary[i]);
        break;
    case BoundaryCondition::Partition:
        for (const auto& cls : bc.classes) {
            for (int v : cls)
                if (!g.is_boundary(v))
                    throw std::invalid_argument(
                        "clusters: partition mentions non-boundary vertex");
            for (std::size_t i = 1; i < cls.size(); ++i)
                uf.unite(cls[0], cls[i]);
        }
        break;
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (w.get(e))
            uf.unite(g.edges[e].first, g.edges[e].second);

    ClusterLabeling lab;
    lab.cluster_of.resize(g.vertex_count);
    lab.cluster_size.assign(g.vertex_count, 0);
    for (int v = 0; v < g.vertex_count; ++v) {
        int r = uf.find(v);
        lab.cluster_of[v] = r;
        if (++lab.cluster_size[r] == 1)
            ++lab.kappa;
    }
    return lab;
}

SourceSpec flow_sources(const FiniteGraph& g, const FlowConfig& eta)
{
    SourceSpec s = SourceSpec::empty(g.vertex_count, eta.q);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        if (u == v)
            continue; // loop contributes eta + (-eta) = 0
        s.labels[u] = (s.labels[u] + eta.values[e]) % eta.q;
        s.labels[v] = (s.labels[v] + eta.q - eta.values[e]) % eta.q;
    }
    return s;
}

bool sources_feasible(const FiniteGraph& g, const BondConfig& w, const SourceSpec& a)
{
    if (!a.valid())
        throw std::invalid_argument("sources_feasible: source labels do not sum to 0 mod q");
    UnionFind uf(g.vertex_count);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (w.get(e))
            uf.unite(g.edges[e].first, g.edges[e].second);
    std::vector<int> sum(g.vertex_count, 0);
    for (int v = 0; v < g.vertex_count; ++v)
        sum[uf.find(v)] = (sum[uf.find(v)] + a.labels[v]) % a.q;
    for (int v = 0; v < g.vertex_count; ++v)
        if (uf.find(v) == v && sum[v] != 0)
            return false;
    return true;
}

bool sources_feasible_relaxed(const FiniteGraph& g, const BondConfig& w,
                              const SourceSpec& a)
{
    if (a.q != 2)
        throw std::invalid_argument("sources_feasible_relaxed: defined for q=2 only");
    UnionFind uf(g.vertex_count);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (w.get(e))
            uf.unite(g.edges[e].first, g.edges[e].second);
    std::vector<int> parity(g.vertex_count, 0);
    std::vector<uint8_t> touches(g.vertex_count, 0);
    for (int v = 0; v < g.vertex_count; ++v) {
        int r = uf.find(v);
        if (a.labels[v] && !g.is_boundary(v))
            parity[r] ^= 1;
        if (g.is_boundary(v))
            touches[r] = 1;
    }
    for (int v = 0; v < g.vertex_count; ++v)
        if (uf.find(v) == v && parity[v] && !touches[v])
            return false;
    return true;
}

bool unique_crossing(const FiniteGraph& g, const BondConfig& w, int inner, int outer)
{
    if (!g.box)
        throw std::invalid_argument("unique_crossing: graph carries no box metadata");
    if (!(0 <= inner && inner < outer && outer <= g.box->radius))
        throw std::invalid_argument("unique_crossing: need inner < outer <= box radius");

    // clusters of w restricted to the annulus (vertex norms in (inner, outer])
    UnionFind uf(g.vertex_count);
    auto in_ann = [&](int v) {
        int r = g.inf_norm(v);
        return r > inner && r <= outer;
    };
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (w.get(e) && in_ann(g.edges[e].first) && in_ann(g.edges[e].second))
            uf.unite(g.edges[e].first, g.edges[e].second);

    std::vector<uint8_t> hits_inner(g.vertex_count, 0), hits_outer(g.vertex_count, 0);
    for (int v = 0; v < g.vertex_count; ++v) {
        if (!in_ann(v))
            continue;
        int r = g.inf_norm(v);
        if (r == inner + 1)
            hits_inner[uf.find(v)] = 1;
        if (r == outer)
            hits_outer[uf.find(v)] = 1;
    }
    int crossings = 0;
    for (int v = 0; v < g.vertex_count; ++v)
        if (uf.find(v) == v && hits_inner[v] && hits_outer[v])
            ++crossings;
    return crossings == 1;
}

GiantResult giant_event(const FiniteGraph& g, const BondConfig& w, double eps,
                        double theta, int L0)
{
    if (!g.box)
        throw std::invalid_argument("giant_event: graph carries no box metadata");
    if (!(0 < theta && theta <= 1.0) || !(0 < eps && eps < theta) || L0 < 1)
        throw std::invalid_argument("giant_event: need 0 < eps < theta <= 1 and L0 >= 1");

    ClusterLabeling lab = clusters(g, w);
    const int d = g.dim, n = g.box->radius;

    // per cluster, bitmask of touched faces (axis a: bits 2a / 2a+1)
    std::vector<uint32_t> faces(g.vertex_count, 0);
    for (int v = 0; v < g.vertex_count; ++v) {
        const int* c = g.coord(v);
        int r = lab.cluster_of[v];
        for (int a = 0; a < d; ++a) {
            int off = g.box->center.empty() ? 0 : g.box->center[a];
            if (c[a] - off == -n)
                faces[r] |= 1u << (2 * a);
            if (c[a] - off == n)
                faces[r] |= 1u << (2 * a + 1);
        }
    }
    uint32_t all = (d >= 16) ? ~0u : ((1u << (2 * d)) - 1);
    int giant_root = -1;
    for (int v = 0; v < g.vertex_count; ++v)
        if (lab.cluster_of[v] == v && faces[v] == all)
            if (giant_root < 0 || lab.cluster_size[v] > lab.cluster_size[giant_root])
                giant_root = v;

    GiantResult res;
    double vol = double(g.vertex_count);
    if (giant_root < 0 || lab.cluster_size[giant_root] < (theta - eps) * vol)
        return res;
    long long stray = 0;
    for (int v = 0; v < g.vertex_count; ++v)
        if (lab.cluster_of[v] != giant_root && lab.cluster_size[lab.cluster_of[v]] >= L0)
            ++stray;
    if (double(stray) > eps * vol)
        return res;
    res.ok = true;
    for (int v = 0; v < g.vertex_count; ++v)
        if (lab.cluster_of[v] == giant_root)
            res.giant.push_back(v);
    return res;
}

SourceSpec explored_sources(const FiniteGraph& g, const BondConfig& xi,
                            const SourceSpec& a, std::vector<int>* class_of)
{
    UnionFind uf(g.vertex_count);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (xi.get(e))
            uf.unite(g.edges[e].first, g.edges[e].second);
    SourceSpec out = SourceSpec::empty(g.vertex_count, a.q);
    for (int v = 0; v < g.vertex_count; ++v) {
        int r = uf.find(v);
        out.labels[r] = (out.labels[r] + a.labels[v]) % a.q;
    }
    if (class_of) {
        class_of->resize(g.vertex_count);
        for (int v = 0; v < g.vertex_count; ++v)
            (*class_of)[v] = uf.find(v);
    }
    return out;
}

} // namespace fkrep
