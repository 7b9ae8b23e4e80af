#include "fkrep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fkrep/errors.hpp"

namespace fkrep {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

uint64_t ipow(uint64_t b, int e)
{
    uint64_t r = 1;
    while (e-- > 0)
        r *= b;
    return r;
}

// digits of idx in the given base, least significant digit = edge 0
inline int digit(uint64_t idx, int base, int e)
{
    for (int i = 0; i < e; ++i)
        idx /= base;
    return int(idx % base);
}

struct LogWeightTable {
    std::vector<double> logw; // may contain -inf
};

// normalise log-weights into probabilities; deterministic fixed-chunk
// reduction so that thread count never changes the result
ExactDistribution normalise(const FiniteGraph& g, IndexSpace space, int base,
                            std::vector<double>&& logw, bool parallel)
{
    ExactDistribution d;
    d.graph = &g;
    d.space = space;
    d.base = base;
    d.edge_count = g.edge_counti();
    const std::size_t n = logw.size();

    constexpr std::size_t kChunk = 4096;
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> chunk_max(nchunks, kNegInf);

#pragma omp parallel for schedule(static) if (parallel && nchunks > 1)
    for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
        double m = kNegInf;
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i)
            m = std::max(m, logw[i]);
        chunk_max[c] = m;
    }
    double mx = kNegInf;
    for (double m : chunk_max)
        mx = std::max(mx, m);
    if (mx == kNegInf)
        throw EmptySupportError("enumerate: measure has empty support");

    std::vector<long double> chunk_sum(nchunks, 0.0L);
#pragma omp parallel for schedule(static) if (parallel && nchunks > 1)
    for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
        long double s = 0.0L;
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i)
            if (logw[i] != kNegInf)
                s += expl((long double)(logw[i] - mx));
        chunk_sum[c] = s;
    }
    long double z = 0.0L;
    for (long double s : chunk_sum)
        z += s;
    d.log_z = mx + double(logl(z));

    d.prob.resize(n);
#pragma omp parallel for schedule(static) if (parallel && nchunks > 1)
    for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(nchunks); ++c) {
        std::size_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i)
            d.prob[i] = logw[i] == kNegInf
                            ? 0.0
                            : double(expl((long double)(logw[i] - mx)) / z);
    }
    logw.clear();
    return d;
}

std::vector<double> bernoulli_logw(const FiniteGraph& g, double p)
{
    const int m = g.edge_counti();
    if (m > 20)
        throw CapacityError("enumerate: bond state space beyond 20 edges");
    double lo = std::log(p), lc = std::log1p(-p);
    std::vector<double> w(std::size_t(1) << m);
    for (uint64_t idx = 0; idx < w.size(); ++idx)
        w[idx] = lo * std::popcount(idx) + lc * (m - std::popcount(idx));
    return w;
}

std::vector<double> fk_logw(const FiniteGraph& g, double p, double q,
                            const BoundaryCondition& bc, bool parallel)
{
    const int m = g.edge_counti();
    if (m > 20)
        throw CapacityError("enumerate: bond state space beyond 20 edges");
    if (!(p > 0 && p < 1) || !(q > 0))
        throw std::invalid_argument("fk: need p in (0,1) and q > 0");
    double ledge = std::log(p / (1 - p)), lq = std::log(q);
    std::vector<double> w(std::size_t(1) << m);
#pragma omp parallel for schedule(static) if (parallel && m >= 12)
    for (std::ptrdiff_t idx = 0; idx < std::ptrdiff_t(w.size()); ++idx) {
        ClusterLabeling lab = clusters(g, BondConfig::from_index(idx, m), bc);
        w[idx] = ledge * std::popcount(uint64_t(idx)) + lq * lab.kappa;
    }
    return w;
}

std::vector<double> loop_logw(const FiniteGraph& g, double x, const SourceSpec& a)
{
    const int m = g.edge_counti();
    if (m > 20)
        throw CapacityError("enumerate: bond state space beyond 20 edges");
    if (a.q != 2)
        throw std::invalid_argument("loop: sources must have q=2");
    if (!a.valid())
        throw EmptySupportError("loop: |A| odd, no configuration has these sources");
    double lx = std::log(x);
    std::vector<double> w(std::size_t(1) << m, kNegInf);
    std::vector<int> deg(g.vertex_count);
    for (uint64_t idx = 0; idx < w.size(); ++idx) {
        std::fill(deg.begin(), deg.end(), 0);
        for (int e = 0; e < m; ++e)
            if ((idx >> e) & 1) {
                auto [u, v] = g.edges[e];
                if (u != v) {
                    deg[u] ^= 1;
                    deg[v] ^= 1;
                }
            }
        bool ok = true;
        for (int v = 0; v < g.vertex_count && ok; ++v)
            ok = deg[v] == a.labels[v];
        if (ok)
            w[idx] = lx * std::popcount(idx);
    }
    return w;
}

std::vector<double> qflow_logw(const FiniteGraph& g, double x, int q,
                               const SourceSpec& a)
{
    const int m = g.edge_counti();
    if (q < 2)
        throw std::invalid_argument("qflow: modulus must be >= 2");
    double states = std::pow(double(q), m);
    if (states > double(1 << 24))
        throw CapacityError("enumerate: flow state space beyond 2^24");
    if (a.q != q)
        throw std::invalid_argument("qflow: source modulus mismatch");
    if (!a.valid())
        throw EmptySupportError("qflow: source labels do not sum to 0 mod q");
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (g.edges[e].first == g.edges[e].second && q != 2)
            throw std::invalid_argument("qflow: self-loops only supported for q=2");

    double lx = std::log(x);
    std::vector<double> w(ipow(q, m), kNegInf);
    std::vector<int> div(g.vertex_count);
    std::vector<int> val(m);
    for (uint64_t idx = 0; idx < w.size(); ++idx) {
        uint64_t t = idx;
        int open = 0;
        std::fill(div.begin(), div.end(), 0);
        for (int e = 0; e < m; ++e) {
            val[e] = int(t % q);
            t /= q;
            if (val[e]) {
                ++open;
                auto [u, v] = g.edges[e];
                if (u != v) {
                    div[u] = (div[u] + val[e]) % q;
                    div[v] = (div[v] + q - val[e]) % q;
                }
            }
        }
        bool ok = true;
        for (int v = 0; v < g.vertex_count && ok; ++v)
            ok = div[v] == a.labels[v];
        if (ok)
            w[idx] = lx * open;
    }
    return w;
}

// (odd part, trace) pairs with the per-edge factorisation
// weight = (cosh b - 1)^{|trace \ odd|} * sinh(b)^{|odd|}
std::vector<double> current_pair_logw(const FiniteGraph& g, double beta,
                                      const SourceSpec& a)
{
    const int m = g.edge_counti();
    double states = std::pow(3.0, m);
    if (states > double(1 << 24))
        throw CapacityError("enumerate: current pair space beyond 2^24");
    if (a.q != 2)
        throw std::invalid_argument("current: sources must have q=2");
    if (!a.valid())
        throw EmptySupportError("current: |A| odd, no current has these sources");
    if (!(beta > 0))
        throw std::invalid_argument("current: beta must be positive");

    double lev = std::log(std::cosh(beta) - 1.0);
    double lod = std::log(std::sinh(beta));
    std::vector<double> w(ipow(3, m), kNegInf);
    std::vector<int> deg(g.vertex_count);
    for (uint64_t idx = 0; idx < w.size(); ++idx) {
        uint64_t t = idx;
        double lw = 0;
        std::fill(deg.begin(), deg.end(), 0);
        for (int e = 0; e < m; ++e) {
            int dgt = int(t % 3);
            t /= 3;
            if (dgt == 1)
                lw += lev;
            else if (dgt == 2) {
                lw += lod;
                auto [u, v] = g.edges[e];
                if (u != v) {
                    deg[u] ^= 1;
                    deg[v] ^= 1;
                }
            }
        }
        bool ok = true;
        for (int v = 0; v < g.vertex_count && ok; ++v)
            ok = deg[v] == a.labels[v];
        if (ok)
            w[idx] = lw;
    }
    return w;
}

ExactDistribution enumerate_impl(const MeasureSpec& spec, bool parallel)
{
    const FiniteGraph& g = *spec.graph;
    switch (spec.family) {
    case Family::Bernoulli:
        if (!(spec.p >= 0 && spec.p <= 1))
            throw std::invalid_argument("bernoulli: p outside [0,1]");
        return normalise(g, IndexSpace::Bond, 2, bernoulli_logw(g, spec.p), parallel);
    case Family::FK:
        return normalise(g, IndexSpace::Bond, 2,
                         fk_logw(g, spec.p, spec.cluster_q, spec.bc, parallel), parallel);
    case Family::Loop:
        return normalise(g, IndexSpace::Bond, 2, loop_logw(g, spec.x, *spec.sources),
                         parallel);
    case Family::QFlow:
        return normalise(g, IndexSpace::Flow, spec.qmod,
                         qflow_logw(g, spec.x, spec.qmod, *spec.sources), parallel);
    case Family::CurrentPair:
        return normalise(g, IndexSpace::CurrentPair, 3,
                         current_pair_logw(g, spec.beta, *spec.sources), parallel);
    }
    throw std::logic_error("enumerate: unknown family");
}

} // namespace

MeasureSpec MeasureSpec::bernoulli(const FiniteGraph& g, double p)
{
    MeasureSpec s;
    s.family = Family::Bernoulli;
    s.graph = &g;
    s.p = p;
    return s;
}
MeasureSpec MeasureSpec::fk(const FiniteGraph& g, double p, double q, BoundaryCondition bc)
{
    MeasureSpec s;
    s.family = Family::FK;
    s.graph = &g;
    s.p = p;
    s.cluster_q = q;
    s.bc = std::move(bc);
    return s;
}
MeasureSpec MeasureSpec::loop(const FiniteGraph& g, double x, SourceSpec a)
{
    MeasureSpec s;
    s.family = Family::Loop;
    s.graph = &g;
    s.x = x;
    s.sources = std::move(a);
    return s;
}
MeasureSpec MeasureSpec::qflow(const FiniteGraph& g, double x, int q, SourceSpec a)
{
    MeasureSpec s;
    s.family = Family::QFlow;
    s.graph = &g;
    s.x = x;
    s.qmod = q;
    s.sources = std::move(a);
    return s;
}
MeasureSpec MeasureSpec::current_pair(const FiniteGraph& g, double beta, SourceSpec a)
{
    MeasureSpec s;
    s.family = Family::CurrentPair;
    s.graph = &g;
    s.beta = beta;
    s.sources = std::move(a);
    return s;
}

ExactDistribution enumerate_measure(const MeasureSpec& spec)
{
    return enumerate_impl(spec, true);
}
ExactDistribution enumerate_measure_serial(const MeasureSpec& spec)
{
    return enumerate_impl(spec, false);
}

ExactDistribution condition_on(const ExactDistribution& d,
                               const std::function<bool(uint64_t)>& event)
{
    ExactDistribution out = d;
    long double mass = 0;
    for (uint64_t i = 0; i < d.size(); ++i) {
        if (!event(i))
            out.prob[i] = 0;
        mass += out.prob[i];
    }
    if (mass <= 0)
        throw EmptySupportError("condition: event has zero mass");
    for (double& p : out.prob)
        p = double(p / mass);
    out.log_z = d.log_z + double(logl(mass));
    return out;
}

std::function<bool(uint64_t)> sources_event(const FiniteGraph& g, SourceSpec a)
{
    const int m = g.edge_counti();
    return [&g, a = std::move(a), m](uint64_t idx) {
        return sources_feasible(g, BondConfig::from_index(idx, m), a);
    };
}

double tv_distance(const ExactDistribution& a, const ExactDistribution& b)
{
    if (!a.same_index_space(b))
        throw std::invalid_argument("tv_distance: mismatched index spaces");
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::fabs(a.prob[i] - b.prob[i]);
    return double(s / 2);
}

double max_abs_diff(const ExactDistribution& a, const ExactDistribution& b)
{
    if (!a.same_index_space(b))
        throw std::invalid_argument("max_abs_diff: mismatched index spaces");
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.prob[i] - b.prob[i]));
    return m;
}

ExactDistribution marginal(const ExactDistribution& d, const std::vector<int>& edges)
{
    for (int e : edges)
        if (e < 0 || e >= d.edge_count)
            throw std::invalid_argument("marginal: edge outside index space");
    ExactDistribution out;
    out.graph = d.graph;
    out.space = d.space;
    out.base = d.base;
    out.edge_count = int(edges.size());
    out.log_z = d.log_z;
    out.prob.assign(ipow(d.base, int(edges.size())), 0.0);
    for (uint64_t idx = 0; idx < d.size(); ++idx) {
        if (d.prob[idx] == 0)
            continue;
        uint64_t sub = 0, mult = 1;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            sub += uint64_t(digit(idx, d.base, edges[k])) * mult;
            mult *= d.base;
        }
        out.prob[sub] += d.prob[idx];
    }
    return out;
}

ExactDistribution push_union(const ExactDistribution& a, const ExactDistribution& b)
{
    if (a.space != IndexSpace::Bond || b.space != IndexSpace::Bond ||
        a.edge_count != b.edge_count)
        throw std::invalid_argument("push_union: need bond measures on one edge set");
    ExactDistribution out = a;
    std::fill(out.prob.begin(), out.prob.end(), 0.0);
    for (uint64_t i = 0; i < a.size(); ++i) {
        if (a.prob[i] == 0)
            continue;
        for (uint64_t j = 0; j < b.size(); ++j)
            if (b.prob[j] != 0)
                out.prob[i | j] += a.prob[i] * b.prob[j];
    }
    return out;
}

ExactDistribution pushforward_bond(const ExactDistribution& d,
                                   const std::function<uint64_t(uint64_t)>& map)
{
    ExactDistribution out;
    out.graph = d.graph;
    out.space = IndexSpace::Bond;
    out.base = 2;
    out.edge_count = d.edge_count;
    out.log_z = d.log_z;
    out.prob.assign(std::size_t(1) << d.edge_count, 0.0);
    for (uint64_t i = 0; i < d.size(); ++i)
        if (d.prob[i] != 0)
            out.prob[map(i)] += d.prob[i];
    return out;
}

ExactDistribution current_odd_marginal(const ExactDistribution& d)
{
    if (d.space != IndexSpace::CurrentPair)
        throw std::invalid_argument("current_odd_marginal: not a current pair table");
    const int m = d.edge_count;
    return pushforward_bond(d, [m](uint64_t idx) {
        uint64_t out = 0;
        for (int e = 0; e < m; ++e) {
            if (idx % 3 == 2)
                out |= uint64_t(1) << e;
            idx /= 3;
        }
        return out;
    });
}

ExactDistribution current_trace_marginal(const ExactDistribution& d)
{
    if (d.space != IndexSpace::CurrentPair)
        throw std::invalid_argument("current_trace_marginal: not a current pair table");
    const int m = d.edge_count;
    return pushforward_bond(d, [m](uint64_t idx) {
        uint64_t out = 0;
        for (int e = 0; e < m; ++e) {
            if (idx % 3 >= 1)
                out |= uint64_t(1) << e;
            idx /= 3;
        }
        return out;
    });
}

ExactDistribution flow_trace_marginal(const ExactDistribution& d)
{
    if (d.space != IndexSpace::Flow)
        throw std::invalid_argument("flow_trace_marginal: not a flow table");
    const int m = d.edge_count;
    const int q = d.base;
    return pushforward_bond(d, [m, q](uint64_t idx) {
        uint64_t out = 0;
        for (int e = 0; e < m; ++e) {
            if (idx % q != 0)
                out |= uint64_t(1) << e;
            idx /= q;
        }
        return out;
    });
}

ExactDistribution embed_closed(const ExactDistribution& d,
                               const std::vector<int>& sub_to_full, int full_edges)
{
    if (d.space != IndexSpace::Bond)
        throw std::invalid_argument("embed_closed: bond measures only");
    if (int(sub_to_full.size()) != d.edge_count)
        throw std::invalid_argument("embed_closed: edge map size mismatch");
    ExactDistribution out;
    out.graph = d.graph;
    out.space = IndexSpace::Bond;
    out.base = 2;
    out.edge_count = full_edges;
    out.log_z = d.log_z;
    out.prob.assign(std::size_t(1) << full_edges, 0.0);
    for (uint64_t i = 0; i < d.size(); ++i) {
        if (d.prob[i] == 0)
            continue;
        uint64_t full = 0;
        for (int e = 0; e < d.edge_count; ++e)
            if ((i >> e) & 1)
                full |= uint64_t(1) << sub_to_full[e];
        out.prob[full] += d.prob[i];
    }
    return out;
}

namespace {

// Dinic max-flow with double capacities; adequate here because the networks
// are tiny and capacities are probabilities
struct MaxFlow {
    struct Edge {
        int to;
        double cap;
        int rev;
    };
    std::vector<std::vector<Edge>> adj;
    std::vector<int> level, it;

    explicit MaxFlow(int n) : adj(n), level(n), it(n) {}

    void add(int u, int v, double c)
    {
        adj[u].push_back({v, c, int(adj[v].size())});
        adj[v].push_back({u, 0.0, int(adj[u].size()) - 1});
    }

    bool bfs(int s, int t)
    {
        std::fill(level.begin(), level.end(), -1);
        std::vector<int> q{s};
        level[s] = 0;
        for (std::size_t h = 0; h < q.size(); ++h) {
            int u = q[h];
            for (const Edge& e : adj[u])
                if (e.cap > 1e-15 && level[e.to] < 0) {
                    level[e.to] = level[u] + 1;
                    q.push_back(e.to);
                }
        }
        return level[t] >= 0;
    }

    double dfs(int u, int t, double f)
    {
        if (u == t)
            return f;
        for (int& i = it[u]; i < int(adj[u].size()); ++i) {
            Edge& e = adj[u][i];
            if (e.cap > 1e-15 && level[e.to] == level[u] + 1) {
                double got = dfs(e.to, t, std::min(f, e.cap));
                if (got > 0) {
                    e.cap -= got;
                    adj[e.to][e.rev].cap += got;
                    return got;
                }
            }
        }
        return 0;
    }

    double run(int s, int t)
    {
        double flow = 0;
        while (bfs(s, t)) {
            std::fill(it.begin(), it.end(), 0);
            while (double f = dfs(s, t, std::numeric_limits<double>::infinity()))
                flow += f;
        }
        return flow;
    }
};

// core decision: does a monotone coupling of (hi, lo) exist, i.e. can all of
// hi's mass be routed to lo-configurations below it in the subset order
bool dominates_tables(const std::vector<double>& hi, const std::vector<double>& lo)
{
    const std::size_t n = hi.size();
    std::vector<int> hi_id(n, -1), lo_id(n, -1);
    int nodes = 2;
    for (std::size_t i = 0; i < n; ++i)
        if (hi[i] > 0)
            hi_id[i] = nodes++;
    for (std::size_t i = 0; i < n; ++i)
        if (lo[i] > 0)
            lo_id[i] = nodes++;
    MaxFlow mf(nodes);
    long double total = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (hi_id[i] >= 0) {
            mf.add(0, hi_id[i], hi[i]);
            total += hi[i];
        }
    for (std::size_t i = 0; i < n; ++i)
        if (lo_id[i] >= 0)
            mf.add(lo_id[i], 1, lo[i]);
    // arcs x -> y for y subset of x, enumerated via submask iteration
    for (std::size_t x = 0; x < n; ++x) {
        if (hi_id[x] < 0)
            continue;
        uint64_t sub = x;
        while (true) {
            if (lo_id[sub] >= 0)
                mf.add(hi_id[x], lo_id[sub], 2.0);
            if (sub == 0)
                break;
            sub = (sub - 1) & x;
        }
    }
    double flow = mf.run(0, 1);
    return flow >= double(total) - 1e-9;
}

} // namespace

bool dominates(const ExactDistribution& hi, const ExactDistribution& lo)
{
    if (!hi.same_index_space(lo) || hi.space != IndexSpace::Bond)
        throw std::invalid_argument("dominates: need bond measures on one edge set");
    if (hi.edge_count > 12)
        throw CapacityError("dominates: beyond 12 edges");
    return dominates_tables(hi.prob, lo.prob);
}

bool strongly_dominates(const ExactDistribution& hi, const ExactDistribution& lo)
{
    if (!hi.same_index_space(lo) || hi.space != IndexSpace::Bond)
        throw std::invalid_argument("strongly_dominates: need bond measures on one edge set");
    const int m = hi.edge_count;
    if (m > 8)
        throw CapacityError("strongly_dominates: beyond 8 edges");
    const uint64_t full = (uint64_t(1) << m) - 1;

    // for every conditioning subset E' and pair xi <= xi' with positive mass,
    // compare the conditionals on the remaining edges
    for (uint64_t mask = 0; mask <= full; ++mask) {
        std::vector<int> rest;
        for (int e = 0; e < m; ++e)
            if (!((mask >> e) & 1))
                rest.push_back(e);
        const std::size_t rn = std::size_t(1) << rest.size();
        // conditional tables indexed by the rest-space
        auto cond_slice = [&](const ExactDistribution& d, uint64_t fixed,
                         std::vector<double>& out) -> double {
            out.assign(rn, 0.0);
            long double mass = 0;
            for (std::size_t r = 0; r < rn; ++r) {
                uint64_t idx = fixed;
                for (std::size_t k = 0; k < rest.size(); ++k)
                    if ((r >> k) & 1)
                        idx |= uint64_t(1) << rest[k];
                out[r] = d.prob[idx];
                mass += out[r];
            }
            if (mass > 0)
                for (double& p : out)
                    p = double(p / mass);
            return double(mass);
        };
        std::vector<double> chi, clo;
        // enumerate xi' over submasks values on mask, and xi <= xi'
        uint64_t xi_hi = mask;
        while (true) {
            double mh = cond_slice(hi, xi_hi, chi);
            if (mh > 0) {
                uint64_t xi_lo = xi_hi;
                while (true) {
                    double ml = cond_slice(lo, xi_lo, clo);
                    if (ml > 0 && !dominates_tables(chi, clo))
                        return false;
                    if (xi_lo == 0)
                        break;
                    xi_lo = (xi_lo - 1) & xi_hi;
                }
            }
            if (xi_hi == 0)
                break;
            xi_hi = (xi_hi - 1) & mask;
        }
        if (mask == full)
            break;
    }
    return true;
}

void to_csv(const ExactDistribution& d, std::ostream& os)
{
    os << "# configuration index: digit e (base " << d.base
       << ", least significant first) is the state of edge e\n";
    os << "index,probability\n";
    char buf[64];
    for (uint64_t i = 0; i < d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%llu,%.17g\n", (unsigned long long)i, d.prob[i]);
        os << buf;
    }
}

} // namespace fkrep
