#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fkrep/errors.hpp"

namespace fkrep {

// Box [-n,n]^d, optionally shifted by a center offset.
struct BoxSpec {
    int dim = 2;
    int radius = 1;
    std::vector<int> center; // empty = origin

    std::int64_t vertex_count() const;
    std::int64_t edge_count() const;
};

// Finite graph with stable edge ids. Vertices are ordered lexicographically
// by coordinates when coordinates exist; edges by (min endpoint, axis).
struct FiniteGraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;
    int dim = 0;                      // 0 when the graph carries no coordinates
    std::vector<int> coords;          // dim entries per vertex, lex-ordered
    std::vector<int> boundary;        // sorted vertex ids
    std::optional<BoxSpec> box;       // set by build_box

    // wired-quotient bookkeeping (set by wire())
    std::vector<int> merge_map;       // parent vertex -> quotient vertex
    std::vector<uint8_t> loop_edge;   // edge joins a vertex to itself

    int edge_counti() const { return int(edges.size()); }
    bool is_boundary(int v) const;
    bool is_loop(int e) const { return !loop_edge.empty() && loop_edge[e]; }

    const int* coord(int v) const { return coords.data() + std::size_t(v) * dim; }
    int inf_norm(int v) const;
    // vertex id from coordinates; -1 if outside (requires coordinates)
    int vertex_at(const std::vector<int>& c) const;

    // adjacency in CSR form, neighbors sorted by edge id; self-loops omitted
    void build_adjacency();
    struct Arc {
        int to;
        int edge;
    };
    std::vector<int> adj_offset;
    std::vector<Arc> adj;
};

// box [-n,n]^d with nearest-neighbour edges; boundary = vertices with a neighbour
// outside the box in Z^d.
FiniteGraph build_box(const BoxSpec& spec);

// Merges all boundary vertices into one vertex (id 0). Edge ids are kept, so
// configuration spaces of g and wire(g) coincide; edges joining two boundary
// vertices become loops at the merged vertex and are flagged inert for
// connectivity but keep their ids.
FiniteGraph wire(const FiniteGraph& g);

// Annulus decomposition of a box of radius N: scale radii N_k = N - k*width,
// stopping at the configured inner radius. Annulus k (1-based) is the closed
// shell of vertices with inf-norm in [N_k, N_{k-1}]; tangential edges on the
// inner layer belong to annulus k+1, so annulus edge sets partition.
struct AnnulusPlan {
    int outer_radius = 0;
    int width = 1;
    int stop_radius = 0; // N_{k_fin} >= stop_radius
    int k_fin = 0;
    std::vector<int> radii; // radii[k] = N_k, k = 0..k_fin

    // default width ceil(ln N) (>=1), default stop ceil(3N/4)
    static AnnulusPlan make(int outer_radius);
    static AnnulusPlan make(int outer_radius, int width, int stop_radius);
};

struct Tile {
    std::vector<int> corner;   // lower corner coordinates
    int side = 0;
    std::vector<int> edge_ids; // sorted
};

struct Tiling {
    int side = 0;
    std::vector<Tile> tiles;
};

// Splits the box into aligned sub-boxes of side L placed at corner + i*L,
// dropping each tile's minimal-coordinate face edges on interior seams so
// that tiles are edge-disjoint.
Tiling dyadic_tiling(const FiniteGraph& g, int L);

// Greedy lexicographic maximal collection of edge-disjoint side-L boxes
// inside the k-th annulus shell of the plan.
Tiling annulus_tiling(const FiniteGraph& g, const AnnulusPlan& plan, int k, int L);

// small named graphs used throughout the test and oracle suites
FiniteGraph make_path(int n_vertices);
FiniteGraph make_cycle(int n_vertices);
FiniteGraph make_grid_2xk(int k);
FiniteGraph make_complete4();

} // namespace fkrep
