#include "fkrep/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace fkrep {

std::int64_t BoxSpec::vertex_count() const
{
    std::int64_t n = 1;
    for (int a = 0; a < dim; ++a)
        n *= 2 * std::int64_t(radius) + 1;
    return n;
}

std::int64_t BoxSpec::edge_count() const
{
    // d * (2n+1)^(d-1) * 2n
    std::int64_t side = 2 * std::int64_t(radius) + 1;
    std::int64_t faces = 1;
    for (int a = 0; a < dim - 1; ++a)
        faces *= side;
    return std::int64_t(dim) * faces * (side - 1);
}

bool FiniteGraph::is_boundary(int v) const
{
    return std::binary_search(boundary.begin(), boundary.end(), v);
}

int FiniteGraph::inf_norm(int v) const
{
    int m = 0;
    const int* c = coord(v);
    const int* center = box && !box->center.empty() ? box->center.data() : nullptr;
    for (int a = 0; a < dim; ++a) {
        int x = c[a] - (center ? center[a] : 0);
        m = std::max(m, std::abs(x));
    }
    return m;
}

int FiniteGraph::vertex_at(const std::vector<int>& c) const
{
    if (!box || int(c.size()) != dim)
        return -1;
    int n = box->radius;
    std::int64_t idx = 0;
    for (int a = 0; a < dim; ++a) {
        int off = box->center.empty() ? 0 : box->center[a];
        int x = c[a] - off;
        if (x < -n || x > n)
            return -1;
        idx = idx * (2 * n + 1) + (x + n);
    }
    return int(idx);
}

void FiniteGraph::build_adjacency()
{
    adj_offset.assign(vertex_count + 1, 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [u, v] = edges[e];
        if (u == v)
            continue;
        ++adj_offset[u + 1];
        ++adj_offset[v + 1];
    }
    for (int v = 0; v < vertex_count; ++v)
        adj_offset[v + 1] += adj_offset[v];
    adj.assign(adj_offset.back(), Arc{});
    std::vector<int> cursor(adj_offset.begin(), adj_offset.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [u, v] = edges[e];
        if (u == v)
            continue;
        adj[cursor[u]++] = Arc{v, int(e)};
        adj[cursor[v]++] = Arc{u, int(e)};
    }
}

FiniteGraph build_box(const BoxSpec& spec)
{
    if (spec.dim < 1 || spec.radius < 0)
        throw std::invalid_argument("build_box: dim must be >= 1 and radius >= 0");
    if (!spec.center.empty() && int(spec.center.size()) != spec.dim)
        throw std::invalid_argument("build_box: center offset has wrong dimension");
    std::int64_t nv = spec.vertex_count();
    std::int64_t ne = spec.edge_count();
    if (nv > (std::int64_t(1) << 31) || ne > (std::int64_t(1) << 31))
        throw CapacityError("build_box: box exceeds index capacity");

    FiniteGraph g;
    g.vertex_count = int(nv);
    g.dim = spec.dim;
    g.box = spec;
    g.coords.resize(std::size_t(nv) * spec.dim);

    const int d = spec.dim, n = spec.radius;
    std::vector<int> c(d, -n);
    for (std::int64_t v = 0; v < nv; ++v) {
        for (int a = 0; a < d; ++a) {
            int off = spec.center.empty() ? 0 : spec.center[a];
            g.coords[std::size_t(v) * d + a] = c[a] + off;
        }
        // lexicographic successor
        for (int a = d - 1; a >= 0; --a) {
            if (c[a] < n) {
                ++c[a];
                break;
            }
            c[a] = -n;
        }
    }

    g.edges.reserve(std::size_t(ne));
    std::vector<int> nb(d);
    for (int v = 0; v < g.vertex_count; ++v) {
        for (int a = 0; a < d; ++a) {
            nb.assign(g.coord(v), g.coord(v) + d);
            ++nb[a];
            int w = g.vertex_at(nb);
            if (w >= 0)
                g.edges.emplace_back(v, w);
        }
        if (g.inf_norm(v) == n)
            g.boundary.push_back(v);
    }
    g.build_adjacency();
    return g;
}

FiniteGraph wire(const FiniteGraph& g)
{
    if (g.boundary.empty())
        throw std::invalid_argument("wire: graph has no boundary vertices");

    FiniteGraph q;
    q.merge_map.assign(g.vertex_count, -1);
    for (int v : g.boundary)
        q.merge_map[v] = 0;
    int next = 1;
    for (int v = 0; v < g.vertex_count; ++v)
        if (q.merge_map[v] < 0)
            q.merge_map[v] = next++;
    q.vertex_count = next;
    q.dim = 0;
    q.boundary = {0};
    q.edges.reserve(g.edges.size());
    q.loop_edge.assign(g.edges.size(), 0);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        int u = q.merge_map[g.edges[e].first];
        int v = q.merge_map[g.edges[e].second];
        q.edges.emplace_back(u, v);
        if (u == v)
            q.loop_edge[e] = 1;
    }
    q.build_adjacency();
    return q;
}

AnnulusPlan AnnulusPlan::make(int outer_radius)
{
    int w = std::max(1, int(std::ceil(std::log(double(std::max(2, outer_radius))))));
    int stop = (3 * outer_radius + 3) / 4;
    return make(outer_radius, w, stop);
}

AnnulusPlan AnnulusPlan::make(int outer_radius, int width, int stop_radius)
{
    if (outer_radius < 1 || width < 1)
        throw std::invalid_argument("AnnulusPlan: outer radius and width must be >= 1");
    if (stop_radius < (outer_radius + 1) / 2)
        throw std::invalid_argument("AnnulusPlan: stop radius below outer/2");
    AnnulusPlan p;
    p.outer_radius = outer_radius;
    p.width = width;
    p.stop_radius = stop_radius;
    p.radii = {outer_radius};
    while (outer_radius - (p.k_fin + 1) * width >= stop_radius) {
        ++p.k_fin;
        p.radii.push_back(outer_radius - p.k_fin * width);
    }
    return p;
}

namespace {

// edge ids inside the vertex box [corner, corner+side]^d, optionally dropping
// the minimal-coordinate face along axes listed in trim_axis
std::vector<int> box_edge_ids(const FiniteGraph& g, const std::vector<int>& corner,
                              int side, const std::vector<uint8_t>& trim_axis)
{
    std::vector<int> ids;
    const int d = g.dim;
    auto inside = [&](const int* c) {
        for (int a = 0; a < d; ++a)
            if (c[a] < corner[a] || c[a] > corner[a] + side)
                return false;
        return true;
    };
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const int* cu = g.coord(g.edges[e].first);
        const int* cv = g.coord(g.edges[e].second);
        if (!inside(cu) || !inside(cv))
            continue;
        bool trimmed = false;
        for (int a = 0; a < d && !trimmed; ++a)
            if (!trim_axis.empty() && trim_axis[a] && cu[a] == corner[a] && cv[a] == corner[a])
                trimmed = true;
        if (!trimmed)
            ids.push_back(int(e));
    }
    return ids;
}

} // namespace

Tiling dyadic_tiling(const FiniteGraph& g, int L)
{
    if (!g.box)
        throw std::invalid_argument("dyadic_tiling: graph carries no box metadata");
    const int n = g.box->radius, d = g.dim;
    if (L < 1 || L > 2 * n)
        throw std::invalid_argument("dyadic_tiling: tile side exceeds region width");

    Tiling t;
    t.side = L;
    std::vector<int> lo(d), idx(d, 0);
    for (int a = 0; a < d; ++a)
        lo[a] = (g.box->center.empty() ? 0 : g.box->center[a]) - n;
    int per_axis = 2 * n / L + (2 * n % L ? 1 : 0);
    // scan aligned corners lexicographically; truncated tiles at the high end
    // are skipped (placement must fit inside the box)
    bool done = false;
    while (!done) {
        std::vector<int> corner(d);
        bool fits = true;
        for (int a = 0; a < d; ++a) {
            corner[a] = lo[a] + idx[a] * L;
            if (corner[a] + L > lo[a] + 2 * n)
                fits = false;
        }
        if (fits) {
            std::vector<uint8_t> trim(d, 0);
            for (int a = 0; a < d; ++a)
                trim[a] = idx[a] > 0;
            Tile tile;
            tile.corner = corner;
            tile.side = L;
            tile.edge_ids = box_edge_ids(g, corner, L, trim);
            t.tiles.push_back(std::move(tile));
        }
        for (int a = d - 1;; --a) {
            if (a < 0) {
                done = true;
                break;
            }
            if (++idx[a] < per_axis)
                break;
            idx[a] = 0;
        }
    }
    return t;
}

Tiling annulus_tiling(const FiniteGraph& g, const AnnulusPlan& plan, int k, int L)
{
    if (!g.box)
        throw std::invalid_argument("annulus_tiling: graph carries no box metadata");
    if (k < 1 || k > plan.k_fin)
        throw std::invalid_argument("annulus_tiling: annulus index out of range");
    if (L < 1 || L > plan.width)
        throw std::invalid_argument("annulus_tiling: tile side exceeds annulus width");

    const int d = g.dim;
    const int outer = plan.radii[k - 1], inner = plan.radii[k];
    Tiling t;
    t.side = L;
    std::vector<uint8_t> used(g.edges.size(), 0);
    std::vector<int> corner(d, -outer);
    // greedy maximal: lexicographic scan over corners, keep any tile that is
    // inside the closed shell and does not reuse an edge
    bool done = false;
    while (!done) {
        // shell fit: the farthest tile vertex has norm max_a max(|c_a|,|c_a+L|),
        // the nearest has norm max_a dist(0, [c_a, c_a+L])
        int hi_norm = 0, min_norm = 0;
        for (int a = 0; a < d; ++a) {
            hi_norm = std::max(hi_norm, std::max(std::abs(corner[a]), std::abs(corner[a] + L)));
            int close = (corner[a] <= 0 && corner[a] + L >= 0)
                            ? 0
                            : std::min(std::abs(corner[a]), std::abs(corner[a] + L));
            min_norm = std::max(min_norm, close);
        }
        bool inside = hi_norm <= outer && min_norm >= inner;
        if (inside) {
            std::vector<int> ids = box_edge_ids(g, corner, L, {});
            bool clash = false;
            for (int e : ids)
                if (used[e]) {
                    clash = true;
                    break;
                }
            if (!clash && !ids.empty()) {
                for (int e : ids)
                    used[e] = 1;
                Tile tile;
                tile.corner = corner;
                tile.side = L;
                tile.edge_ids = std::move(ids);
                t.tiles.push_back(std::move(tile));
            }
        }
        for (int a = d - 1;; --a) {
            if (a < 0) {
                done = true;
                break;
            }
            if (++corner[a] <= outer - L)
                break;
            corner[a] = -outer;
        }
    }
    return t;
}

FiniteGraph make_path(int n_vertices)
{
    FiniteGraph g;
    g.vertex_count = n_vertices;
    g.dim = 1;
    g.coords.resize(n_vertices);
    for (int v = 0; v < n_vertices; ++v)
        g.coords[v] = v;
    for (int v = 0; v + 1 < n_vertices; ++v)
        g.edges.emplace_back(v, v + 1);
    if (n_vertices >= 2)
        g.boundary = {0, n_vertices - 1};
    g.build_adjacency();
    return g;
}

FiniteGraph make_cycle(int n_vertices)
{
    FiniteGraph g;
    g.vertex_count = n_vertices;
    for (int v = 0; v < n_vertices; ++v)
        g.edges.emplace_back(v, (v + 1) % n_vertices);
    g.build_adjacency();
    return g;
}

FiniteGraph make_grid_2xk(int k)
{
    FiniteGraph g;
    g.vertex_count = 2 * k;
    g.dim = 2;
    g.coords.resize(std::size_t(2 * k) * 2);
    // vertex id = column*2 + row, lex order on (column, row)
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < 2; ++r) {
            g.coords[std::size_t(c * 2 + r) * 2 + 0] = c;
            g.coords[std::size_t(c * 2 + r) * 2 + 1] = r;
        }
    for (int c = 0; c < k; ++c) {
        int v0 = c * 2, v1 = c * 2 + 1;
        if (c + 1 < k) {
            g.edges.emplace_back(v0, v0 + 2);
            g.edges.emplace_back(v1, v1 + 2);
        }
        g.edges.emplace_back(v0, v1);
    }
    g.build_adjacency();
    return g;
}

FiniteGraph make_complete4()
{
    FiniteGraph g;
    g.vertex_count = 4;
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v)
            g.edges.emplace_back(u, v);
    g.build_adjacency();
    return g;
}

} // namespace fkrep
