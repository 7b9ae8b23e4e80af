#include "fkrep/cyclespace.hpp"

#include <algorithm>

#include "fkrep/errors.hpp"

namespace fkrep {

ForestBasis forest_basis(const FiniteGraph& g, const BondConfig& w)
{
    if (w.size() != g.edges.size())
        throw std::invalid_argument("forest_basis: configuration does not index this graph");
    ForestBasis b;
    b.graph = &g;
    b.open = w;
    b.parent.assign(g.vertex_count, -1);
    b.parent_edge.assign(g.vertex_count, -1);
    b.depth.assign(g.vertex_count, 0);
    b.component.assign(g.vertex_count, -1);
    b.order.reserve(g.vertex_count);

    std::vector<uint8_t> tree_edge(g.edges.size(), 0);
    std::vector<int> queue;
    for (int root = 0; root < g.vertex_count; ++root) {
        if (b.component[root] >= 0)
            continue;
        b.component[root] = root;
        queue.clear();
        queue.push_back(root);
        b.order.push_back(root);
        for (std::size_t h = 0; h < queue.size(); ++h) {
            int u = queue[h];
            for (int i = g.adj_offset[u]; i < g.adj_offset[u + 1]; ++i) {
                const auto& arc = g.adj[i];
                if (!w.get(arc.edge) || b.component[arc.to] >= 0)
                    continue;
                b.component[arc.to] = root;
                b.parent[arc.to] = u;
                b.parent_edge[arc.to] = arc.edge;
                b.depth[arc.to] = b.depth[u] + 1;
                tree_edge[arc.edge] = 1;
                queue.push_back(arc.to);
                b.order.push_back(arc.to);
            }
        }
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (w.get(e) && !tree_edge[e])
            b.non_tree.push_back(int(e));
    return b;
}

std::vector<int> ForestBasis::fundamental_cycle(int edge) const
{
    const FiniteGraph& g = *graph;
    std::vector<int> cyc{edge};
    auto [u, v] = g.edges[edge];
    if (u == v)
        return cyc;
    while (u != v) {
        if (depth[u] >= depth[v]) {
            cyc.push_back(parent_edge[u]);
            u = parent[u];
        } else {
            cyc.push_back(parent_edge[v]);
            v = parent[v];
        }
    }
    std::sort(cyc.begin(), cyc.end());
    return cyc;
}

BondConfig sample_even_subgraph(const ForestBasis& basis, CounterRng& rng)
{
    const FiniteGraph& g = *basis.graph;
    BondConfig out(g.edges.size());
    std::vector<int> deg(g.vertex_count, 0);
    for (int e : basis.non_tree)
        if (rng.next_u64() & 1) {
            out.set(e, true);
            auto [u, v] = g.edges[e];
            if (u != v) {
                deg[u] ^= 1;
                deg[v] ^= 1;
            }
        }
    // close up the tree leaf-to-root so that every degree is even
    for (auto it = basis.order.rbegin(); it != basis.order.rend(); ++it) {
        int v = *it;
        if (basis.parent[v] < 0)
            continue;
        if (deg[v]) {
            out.set(basis.parent_edge[v], true);
            deg[v] ^= 1;
            deg[basis.parent[v]] ^= 1;
        }
    }
    return out;
}

FlowConfig flow_representative(const ForestBasis& basis, const SourceSpec& a)
{
    const FiniteGraph& g = *basis.graph;
    const int q = a.q;
    FlowConfig eta = FlowConfig::zero(int(g.edges.size()), q);

    if (q == 2) {
        // pair up sources within each component in vertex order, toggling the
        // tree path between the two
        std::vector<std::vector<int>> per_comp(g.vertex_count);
        for (int v = 0; v < g.vertex_count; ++v)
            if (a.labels[v])
                per_comp[basis.component[v]].push_back(v);
        for (auto& vs : per_comp) {
            if (vs.size() & 1)
                throw InfeasibleSourcesError(
                    "flow_representative: odd source count in a cluster");
            for (std::size_t i = 0; i + 1 < vs.size(); i += 2) {
                int u = vs[i], v = vs[i + 1];
                while (u != v) {
                    if (basis.depth[u] >= basis.depth[v]) {
                        eta.values[basis.parent_edge[u]] ^= 1;
                        u = basis.parent[u];
                    } else {
                        eta.values[basis.parent_edge[v]] ^= 1;
                        v = basis.parent[v];
                    }
                }
            }
        }
        return eta;
    }

    // general q: zero on non-tree edges, solve tree edges leaf-to-root
    std::vector<int> need(a.labels);
    for (auto it = basis.order.rbegin(); it != basis.order.rend(); ++it) {
        int v = *it;
        int p = basis.parent[v];
        if (p < 0) {
            if (need[v] % q != 0)
                throw InfeasibleSourcesError(
                    "flow_representative: cluster labels do not cancel");
            continue;
        }
        int e = basis.parent_edge[v];
        int r = ((need[v] % q) + q) % q;
        // orientations are stored as (first, second); flow r out of v
        if (g.edges[e].first == v)
            eta.values[e] = (eta.values[e] + r) % q;
        else
            eta.values[e] = (eta.values[e] + q - r) % q;
        need[v] = 0;
        need[p] = (need[p] + r) % q;
    }
    return eta;
}

FlowConfig kernel_element(const ForestBasis& basis, const std::vector<int>& coeffs,
                          int q)
{
    const FiniteGraph& g = *basis.graph;
    if (coeffs.size() != basis.non_tree.size())
        throw std::invalid_argument("kernel_element: one coefficient per non-tree edge");
    std::vector<int> need(g.vertex_count, 0);
    FlowConfig ker = FlowConfig::zero(int(g.edges.size()), q);
    for (std::size_t i = 0; i < basis.non_tree.size(); ++i) {
        int e = basis.non_tree[i];
        int val = ((coeffs[i] % q) + q) % q;
        auto [u, v] = g.edges[e];
        if (u == v) {
            // antisymmetry pins a loop value to 2*val = 0; for q=2 this is a
            // free bit, beyond that open loops are not supported
            if (q != 2)
                throw std::invalid_argument("kernel_element: open loop edges need q=2");
            ker.values[e] = val;
            continue;
        }
        ker.values[e] = val;
        need[u] = (need[u] + q - val) % q; // outflow val at u must be cancelled
        need[v] = (need[v] + val) % q;
    }
    // forced tree completion with zero divergence, leaf to root
    for (auto it = basis.order.rbegin(); it != basis.order.rend(); ++it) {
        int v = *it;
        int p = basis.parent[v];
        if (p < 0)
            continue;
        int e = basis.parent_edge[v];
        int r = need[v] % q; // flow r out of v along the parent edge
        if (g.edges[e].first == v)
            ker.values[e] = (ker.values[e] + r) % q;
        else
            ker.values[e] = (ker.values[e] + q - r) % q;
        need[v] = 0;
        need[p] = (need[p] + r) % q;
    }
    return ker;
}

FlowConfig sample_sourced_flow(const ForestBasis& basis, const SourceSpec& a,
                               CounterRng& rng)
{
    const int q = a.q;
    FlowConfig eta = flow_representative(basis, a);
    std::vector<int> coeffs(basis.non_tree.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        coeffs[i] = int(rng.next_below(uint64_t(q)));
    FlowConfig ker = kernel_element(basis, coeffs, q);
    for (std::size_t e = 0; e < eta.values.size(); ++e)
        eta.values[e] = (eta.values[e] + ker.values[e]) % q;
    return eta;
}

SourceSpec quotient_sources(const FiniteGraph& g, const FiniteGraph& wired,
                            const SourceSpec& a)
{
    SourceSpec qa = SourceSpec::empty(wired.vertex_count, a.q);
    for (int v = 0; v < g.vertex_count; ++v)
        if (!g.is_boundary(v))
            qa.labels[wired.merge_map[v]] = (qa.labels[wired.merge_map[v]] + a.labels[v]) % a.q;
    int total = 0;
    for (int x : qa.labels)
        total = (total + x) % a.q;
    qa.labels[0] = (qa.labels[0] + a.q - total) % a.q; // merged vertex absorbs the deficit
    return qa;
}

FlowConfig sample_sourced_flow_relaxed(const FiniteGraph& g, const FiniteGraph& wired,
                                       const BondConfig& w, const SourceSpec& a,
                                       CounterRng& rng)
{
    if (a.q != 2)
        throw std::invalid_argument("sample_sourced_flow_relaxed: q=2 only");
    if (!sources_feasible_relaxed(g, w, a))
        throw InfeasibleSourcesError(
            "sample_sourced_flow_relaxed: an interior cluster has odd sources");
    SourceSpec qa = quotient_sources(g, wired, a);
    ForestBasis basis = forest_basis(wired, w);
    return sample_sourced_flow(basis, qa, rng);
}

} // namespace fkrep
