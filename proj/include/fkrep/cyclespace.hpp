#pragma once

#include <vector>

#include "fkrep/bitconfig.hpp"
#include "fkrep/config.hpp"
#include "fkrep/graph.hpp"
#include "fkrep/rng.hpp"

namespace fkrep {

// Spanning forest of (V, open edges) grown by BFS in edge-id order, plus the
// non-tree edges. |non-tree| = |w| - |V| + kappa(w), the cycle space
// dimension. Loop edges (wired quotients) are always non-tree.
struct ForestBasis {
    const FiniteGraph* graph = nullptr;
    BondConfig open;                // the configuration the basis was built for
    std::vector<int> parent;        // vertex -> parent vertex (-1 at roots)
    std::vector<int> parent_edge;   // vertex -> edge id to parent (-1 at roots)
    std::vector<int> depth;
    std::vector<int> order;         // vertices in BFS discovery order
    std::vector<int> non_tree;      // edge ids, ascending
    std::vector<int> component;     // vertex -> root vertex

    // fundamental cycle of a non-tree edge: the edge plus the tree paths to
    // the endpoints' meeting point
    std::vector<int> fundamental_cycle(int edge) const;
};

ForestBasis forest_basis(const FiniteGraph& g, const BondConfig& w);

// uniform element of the cycle space of w (q=2): XOR of a uniform subset of
// fundamental cycles, realised as uniform bits on non-tree edges plus the
// forced tree completion
BondConfig sample_even_subgraph(const ForestBasis& basis, CounterRng& rng);

// some flow inside w with the given divergence; throws InfeasibleSourcesError
// if a cluster's labels do not cancel
FlowConfig flow_representative(const ForestBasis& basis, const SourceSpec& a);

// the kernel element determined by one coefficient per non-tree edge; the
// coefficients biject with the divergence-free flows inside w
FlowConfig kernel_element(const ForestBasis& basis, const std::vector<int>& coeffs,
                          int q);

// uniform element of {eta <= w : sources(eta) = a}: representative plus a
// uniform kernel element
FlowConfig sample_sourced_flow(const ForestBasis& basis, const SourceSpec& a,
                               CounterRng& rng);

// Boundary-relaxed version (q=2): uniform over flows inside w whose interior
// sources equal a while boundary vertices are free (equivalently, a uniform
// sourced flow on the wired quotient, projected back). `wired` must be
// wire(g) for the graph the basis configuration lives on.
FlowConfig sample_sourced_flow_relaxed(const FiniteGraph& g, const FiniteGraph& wired,
                                       const BondConfig& w, const SourceSpec& a,
                                       CounterRng& rng);

// sources on the wired quotient: interior labels kept, merged vertex labelled
// with the deficit so that the total vanishes
SourceSpec quotient_sources(const FiniteGraph& g, const FiniteGraph& wired,
                            const SourceSpec& a);

} // namespace fkrep
