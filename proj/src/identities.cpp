#include "fkrep/identities.hpp"

#include <algorithm>
#include <cmath>

#include "fkrep/cyclespace.hpp"
#include "fkrep/mcmc.hpp"

namespace fkrep {

std::vector<std::pair<std::string, FiniteGraph>> oracle_family(int max_edges)
{
    std::vector<std::pair<std::string, FiniteGraph>> fam;
    for (int n = 2; n - 1 <= max_edges; ++n)
        fam.emplace_back("path" + std::to_string(n), make_path(n));
    for (int n = 3; n <= max_edges; ++n)
        fam.emplace_back("cycle" + std::to_string(n), make_cycle(n));
    for (int k = 2; 3 * k - 2 <= max_edges; ++k)
        fam.emplace_back("grid2x" + std::to_string(k), make_grid_2xk(k));
    if (max_edges >= 6)
        fam.emplace_back("k4", make_complete4());
    return fam;
}

std::vector<SourceSpec> all_valid_sources(const FiniteGraph& g, int q)
{
    std::vector<SourceSpec> out;
    const int nv = g.vertex_count;
    if (q == 2) {
        for (uint64_t mask = 0; mask < (uint64_t(1) << nv); ++mask) {
            if (std::popcount(mask) & 1)
                continue;
            SourceSpec a = SourceSpec::empty(nv, 2);
            for (int v = 0; v < nv; ++v)
                a.labels[v] = int((mask >> v) & 1);
            out.push_back(std::move(a));
        }
        return out;
    }
    uint64_t total = 1;
    for (int v = 0; v < nv; ++v)
        total *= uint64_t(q);
    for (uint64_t idx = 0; idx < total; ++idx) {
        SourceSpec a = SourceSpec::empty(nv, q);
        uint64_t t = idx;
        int sum = 0;
        for (int v = 0; v < nv; ++v) {
            a.labels[v] = int(t % q);
            sum += a.labels[v];
            t /= q;
        }
        if (sum % q == 0)
            out.push_back(std::move(a));
    }
    return out;
}

namespace {

struct Worst {
    double v = 0;
    void absorb(double x)
    {
#pragma omp critical(fkrep_worst)
        v = std::max(v, x);
    }
};

} // namespace

std::vector<IdentityCheck> coupling_identity_suite(int max_edges,
                                                   const std::vector<double>& xs,
                                                   double tol)
{
    std::vector<IdentityCheck> checks;
    for (auto& [name, g] : oracle_family(max_edges)) {
        for (double x : xs) {
            double p = params::p_from_x(x, 2.0);
            ExactDistribution bern = enumerate_measure(MeasureSpec::bernoulli(g, x));
            ExactDistribution fk = enumerate_measure(MeasureSpec::fk(g, p, 2.0));
            std::vector<SourceSpec> sources = all_valid_sources(g, 2);
            Worst worst;
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(sources.size()); ++i) {
                const SourceSpec& a = sources[i];
                ExactDistribution loop =
                    enumerate_measure_serial(MeasureSpec::loop(g, x, a));
                ExactDistribution lhs = condition_on(fk, sources_event(g, a));
                ExactDistribution rhs = push_union(loop, bern);
                worst.absorb(max_abs_diff(lhs, rhs));
            }
            checks.push_back({"coupling1/" + name + "/x=" + std::to_string(x),
                              worst.v <= tol, worst.v});
        }
    }
    return checks;
}

std::vector<IdentityCheck> current_identity_suite(int max_edges,
                                                  const std::vector<double>& xs,
                                                  double tol)
{
    std::vector<IdentityCheck> checks;
    for (auto& [name, g] : oracle_family(max_edges)) {
        for (double x : xs) {
            double beta = params::beta_from_x(x);
            ExactDistribution sprk = enumerate_measure(
                MeasureSpec::bernoulli(g, params::sprinkle_rate(x)));
            std::vector<SourceSpec> sources = all_valid_sources(g, 2);
            Worst worst_odd, worst_trace;
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(sources.size()); ++i) {
                const SourceSpec& a = sources[i];
                ExactDistribution pair =
                    enumerate_measure_serial(MeasureSpec::current_pair(g, beta, a));
                ExactDistribution loop =
                    enumerate_measure_serial(MeasureSpec::loop(g, x, a));
                worst_odd.absorb(max_abs_diff(current_odd_marginal(pair), loop));
                worst_trace.absorb(
                    max_abs_diff(current_trace_marginal(pair), push_union(loop, sprk)));
            }
            checks.push_back({"current-odd/" + name + "/x=" + std::to_string(x),
                              worst_odd.v <= tol, worst_odd.v});
            checks.push_back({"current-trace/" + name + "/x=" + std::to_string(x),
                              worst_trace.v <= tol, worst_trace.v});
        }
    }
    return checks;
}

std::vector<IdentityCheck> qflow_identity_suite(int max_edges,
                                                const std::vector<double>& xs,
                                                const std::vector<int>& qs, double tol)
{
    std::vector<IdentityCheck> checks;
    for (auto& [name, g] : oracle_family(max_edges)) {
        for (int q : qs) {
            for (double x : xs) {
                double p = params::p_from_x(x, double(q));
                ExactDistribution bern = enumerate_measure(MeasureSpec::bernoulli(g, x));
                ExactDistribution fk =
                    enumerate_measure(MeasureSpec::fk(g, p, double(q)));
                std::vector<SourceSpec> sources = all_valid_sources(g, q);
                Worst worst;
#pragma omp parallel for schedule(dynamic)
                for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(sources.size()); ++i) {
                    const SourceSpec& a = sources[i];
                    ExactDistribution flow =
                        enumerate_measure_serial(MeasureSpec::qflow(g, x, q, a));
                    ExactDistribution lhs = condition_on(fk, sources_event(g, a));
                    ExactDistribution rhs =
                        push_union(flow_trace_marginal(flow), bern);
                    worst.absorb(max_abs_diff(lhs, rhs));
                }
                checks.push_back({"qcoupling/" + name + "/q=" + std::to_string(q) +
                                      "/x=" + std::to_string(x),
                                  worst.v <= tol, worst.v});
            }
        }
    }
    return checks;
}

std::vector<IdentityCheck> wired_identity_suite(const std::vector<double>& xs,
                                                double tol)
{
    std::vector<IdentityCheck> checks;
    std::vector<std::pair<std::string, FiniteGraph>> fam;
    fam.emplace_back("path4", make_path(4));
    {
        FiniteGraph g = make_grid_2xk(3);
        // declare the outer ring as boundary (every vertex of the strip)
        for (int v = 0; v < g.vertex_count; ++v)
            g.boundary.push_back(v);
        fam.emplace_back("grid2x3", std::move(g));
    }
    {
        FiniteGraph b = build_box({2, 1, {}});
        fam.emplace_back("box2d1", std::move(b));
    }

    for (auto& [name, g] : fam) {
        FiniteGraph gw = wire(g);
        for (double x : xs) {
            double p = params::p_from_x(x, 2.0);
            // phi^1_G = phi_{G^1}: same edge ids, wired boundary condition
            // against the free measure of the quotient
            ExactDistribution wired_bc = enumerate_measure(
                MeasureSpec::fk(g, p, 2.0, BoundaryCondition::wired()));
            ExactDistribution quotient = enumerate_measure(MeasureSpec::fk(gw, p, 2.0));
            double d1 = max_abs_diff(wired_bc, quotient);
            checks.push_back({"wired-quotient/" + name + "/x=" + std::to_string(x),
                              d1 <= tol, d1});

            // loop on the quotient = even-subgraph average of the wired
            // measure = wired measure conditioned on nothing, pushed through
            // the uniform kernel: P[eta] = sum_w phi1[w] 1[eta even in G^1,
            // eta <= w] / #evens(w)
            ExactDistribution loopq = enumerate_measure(
                MeasureSpec::loop(gw, x, SourceSpec::empty(gw.vertex_count, 2)));
            std::vector<double> acc(loopq.prob.size(), 0.0);
            const int m = g.edge_counti();
            for (uint64_t w = 0; w < quotient.prob.size(); ++w) {
                if (quotient.prob[w] == 0)
                    continue;
                ForestBasis basis = forest_basis(gw, BondConfig::from_index(w, m));
                double share = quotient.prob[w] /
                               std::pow(2.0, double(basis.non_tree.size()));
                // enumerate the kernel through its non-tree coefficients
                const std::size_t ker = std::size_t(1) << basis.non_tree.size();
                for (std::size_t coeff = 0; coeff < ker; ++coeff) {
                    // rebuild the even subgraph for this coefficient choice
                    BondConfig eta(g.edges.size());
                    std::vector<int> deg(gw.vertex_count, 0);
                    for (std::size_t b = 0; b < basis.non_tree.size(); ++b)
                        if ((coeff >> b) & 1) {
                            int e = basis.non_tree[b];
                            eta.set(e, true);
                            auto [eu, ev] = gw.edges[e];
                            if (eu != ev) {
                                deg[eu] ^= 1;
                                deg[ev] ^= 1;
                            }
                        }
                    for (auto it = basis.order.rbegin(); it != basis.order.rend(); ++it) {
                        int v = *it;
                        if (basis.parent[v] < 0)
                            continue;
                        if (deg[v]) {
                            eta.set(basis.parent_edge[v], true);
                            deg[v] ^= 1;
                            deg[basis.parent[v]] ^= 1;
                        }
                    }
                    acc[eta.to_index()] += share;
                }
            }
            double d2 = 0;
            for (std::size_t i = 0; i < acc.size(); ++i)
                d2 = std::max(d2, std::fabs(acc[i] - loopq.prob[i]));
            checks.push_back({"wired-ueg/" + name + "/x=" + std::to_string(x),
                              d2 <= tol, d2});
        }
    }
    return checks;
}

std::vector<IdentityCheck> sources_equivalence_suite(int max_edges,
                                                     const std::vector<int>& qs)
{
    std::vector<IdentityCheck> checks;
    for (auto& [name, g] : oracle_family(max_edges)) {
        const int m = g.edge_counti();
        const int nv = g.vertex_count;
        for (int q : qs) {
            bool ok = true;
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t widx = 0; widx < std::ptrdiff_t(1) << m; ++widx) {
                BondConfig w = BondConfig::from_index(uint64_t(widx), m);
                // achievable divergences by exhaustive flow enumeration over
                // the open edges
                std::vector<int> open;
                for (int e = 0; e < m; ++e)
                    if (w.get(e))
                        open.push_back(e);
                uint64_t states = 1, nlab = 1;
                for (std::size_t k = 0; k < open.size(); ++k)
                    states *= uint64_t(q);
                for (int v = 0; v < nv; ++v)
                    nlab *= uint64_t(q);
                std::vector<uint8_t> achieved(nlab, 0);
                std::vector<int> div(nv);
                for (uint64_t s = 0; s < states; ++s) {
                    uint64_t t = s;
                    std::fill(div.begin(), div.end(), 0);
                    for (int e : open) {
                        int val = int(t % q);
                        t /= q;
                        auto [u, v] = g.edges[e];
                        if (u != v && val) {
                            div[u] = (div[u] + val) % q;
                            div[v] = (div[v] + q - val) % q;
                        }
                    }
                    uint64_t key = 0;
                    for (int v = nv - 1; v >= 0; --v)
                        key = key * q + uint64_t(div[v]);
                    achieved[key] = 1;
                }
                // count labelings passing the per-cluster criterion:
                // q^(V - kappa) by independence within clusters
                ClusterLabeling lab = clusters(g, w);
                uint64_t expect = 1;
                for (int k = 0; k < nv - lab.kappa; ++k)
                    expect *= uint64_t(q);
                uint64_t got = 0;
                for (uint8_t a : achieved)
                    got += a;
                bool this_ok = got == expect;
                // and every achieved labeling passes the criterion
                if (this_ok) {
                    for (uint64_t key = 0; key < nlab && this_ok; ++key) {
                        if (!achieved[key])
                            continue;
                        SourceSpec a = SourceSpec::empty(nv, q);
                        uint64_t t = key;
                        for (int v = 0; v < nv; ++v) {
                            a.labels[v] = int(t % q);
                            t /= q;
                        }
                        this_ok = sources_feasible(g, w, a);
                    }
                }
                if (!this_ok) {
#pragma omp critical(fkrep_srcok)
                    ok = false;
                }
            }
            checks.push_back({"sources-def/" + name + "/q=" + std::to_string(q), ok,
                              ok ? 0.0 : 1.0});
        }
    }
    return checks;
}

} // namespace fkrep
