#pragma once

#include <vector>

#include "fkrep/bitconfig.hpp"
#include "fkrep/graph.hpp"

namespace fkrep {

// Z/qZ vertex labelling; q=2 encodes a vertex subset.
struct SourceSpec {
    int q = 2;
    std::vector<int> labels; // one entry per vertex, values in [0,q)

    static SourceSpec empty(int vertex_count, int q = 2)
    {
        SourceSpec s;
        s.q = q;
        s.labels.assign(vertex_count, 0);
        return s;
    }
    static SourceSpec from_vertices(int vertex_count, const std::vector<int>& vs)
    {
        SourceSpec s = empty(vertex_count, 2);
        for (int v : vs)
            s.labels[v] ^= 1;
        return s;
    }

    // sum of labels == 0 mod q (for q=2: even source count)
    bool valid() const
    {
        long long t = 0;
        for (int x : labels)
            t += x;
        return t % q == 0;
    }
    int support_size() const
    {
        int n = 0;
        for (int x : labels)
            n += x != 0;
        return n;
    }
    bool operator==(const SourceSpec& o) const { return q == o.q && labels == o.labels; }
};

// Z/qZ 1-form: one value per edge in the reference orientation (u,v) as
// stored in the graph; reading the reverse orientation negates.
struct FlowConfig {
    int q = 2;
    std::vector<int> values; // one entry per edge id, values in [0,q)

    static FlowConfig zero(int edge_count, int q)
    {
        FlowConfig f;
        f.q = q;
        f.values.assign(edge_count, 0);
        return f;
    }
    BondConfig trace() const
    {
        BondConfig b(values.size());
        for (std::size_t e = 0; e < values.size(); ++e)
            if (values[e])
                b.set(e, true);
        return b;
    }
    bool operator==(const FlowConfig& o) const { return q == o.q && values == o.values; }
};

// nonnegative integer per edge
struct CurrentConfig {
    std::vector<int> values;
};

BondConfig odd_part(const CurrentConfig& n);
BondConfig trace(const CurrentConfig& n);

// boundary condition = induced wiring of the boundary vertices
struct BoundaryCondition {
    enum Kind { Free, Wired, Partition } kind = Free;
    std::vector<std::vector<int>> classes; // Partition only; boundary vertices

    static BoundaryCondition free() { return {}; }
    static BoundaryCondition wired()
    {
        BoundaryCondition b;
        b.kind = Wired;
        return b;
    }
    static BoundaryCondition partition(std::vector<std::vector<int>> cls)
    {
        BoundaryCondition b;
        b.kind = Partition;
        b.classes = std::move(cls);
        return b;
    }
};

struct UnionFind {
    std::vector<int> parent, size;
    explicit UnionFind(int n) : parent(n), size(n, 1)
    {
        for (int i = 0; i < n; ++i)
            parent[i] = i;
    }
    int find(int x)
    {
        int r = x;
        while (parent[r] != r)
            r = parent[r];
        while (parent[x] != r) {
            int nx = parent[x];
            parent[x] = r;
            x = nx;
        }
        return r;
    }
    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (size[a] < size[b])
            std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
        return true;
    }
};

struct ClusterLabeling {
    std::vector<int> cluster_of;   // root id per vertex
    std::vector<int> cluster_size; // indexed by root id (0 elsewhere)
    int kappa = 0;                 // classes after boundary wiring
};

// Union-find labelling of (V, open edges), with boundary classes merged
// first. kappa = number of classes (every class meets G).
ClusterLabeling clusters(const FiniteGraph& g, const BondConfig& w,
                         const BoundaryCondition& bc = {});

// divergence of a flow: q=2 gives the odd-degree set of the trace
SourceSpec flow_sources(const FiniteGraph& g, const FlowConfig& eta);

// Event that a flow with the given sources exists inside w. Implemented as
// the per-cluster criterion: every cluster's label sum is 0 mod q. The
// equivalence with the existential definition is enforced by the oracle
// suite before anything downstream relies on it.
bool sources_feasible(const FiniteGraph& g, const BondConfig& w, const SourceSpec& a);

// Boundary-relaxed version (q=2): a flow may additionally pick up sources on
// the boundary, i.e. sources off the boundary must match a. True iff every
// cluster that does not touch the boundary has an even number of interior
// sources.
bool sources_feasible_relaxed(const FiniteGraph& g, const BondConfig& w,
                              const SourceSpec& a);

// Exactly one cluster of w restricted to the annulus (inner, outer] crosses
// from the inner to the outer vertex boundary.
bool unique_crossing(const FiniteGraph& g, const BondConfig& w, int inner, int outer);

struct GiantResult {
    bool ok = false;
    std::vector<int> giant; // vertex ids; empty unless ok
};

// Coarse-graining event: a cluster touches all 2d faces, has density at
// least theta - eps, and all vertices outside it in clusters of size >= L0
// number at most eps*|B|.
GiantResult giant_event(const FiniteGraph& g, const BondConfig& w, double eps,
                        double theta, int L0);

// quotient sources for a revealed configuration: the per-class label sums of
// a under the wiring induced by the open edges of xi (classes = V/xi)
SourceSpec explored_sources(const FiniteGraph& g, const BondConfig& xi,
                            const SourceSpec& a, std::vector<int>* class_of = nullptr);

} // namespace fkrep
