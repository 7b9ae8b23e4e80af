#include "fkrep/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fkrep/cyclespace.hpp"
#include "fkrep/errors.hpp"
#include "fkrep/oracle.hpp"

namespace fkrep {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Runs `chains` independent conditioned/unconditioned fk chains, handing
// every thinned sample to `use(chain, sample, config)`. Chains get streams
// keyed by (seed, chain index) only, so results are worker-count invariant.
template <class UseSample>
long long run_chain_grid(const FiniteGraph& g, const BoundaryCondition& bc, double p,
                         double q, const std::optional<SourceSpec>& cond,
                         const ReplicaPlan& plan, uint64_t seed, UseSample&& use)
{
    const long long nchains = plan.chains();
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < nchains; ++c) {
        CounterRng rng = CounterRng(seed).split(0xc0a1).split(uint64_t(c));
        FkSampler sampler(g, bc, p, q, cond, plan.sched, rng);
        for (int s = 0; s < plan.samples_per_chain; ++s) {
            long long idx = c * plan.samples_per_chain + s;
            if (idx >= plan.replicas)
                break;
            BondConfig w = sampler.next_sample();
            use(c, idx, w);
        }
    }
    long long sweeps_per_chain =
        plan.sched.burnin + (long long)(plan.samples_per_chain - 1) * plan.sched.thin;
    return nchains * sweeps_per_chain * g.edge_counti();
}

} // namespace

SourcePattern parse_source_pattern(const std::string& s)
{
    if (s == "none")
        return SourcePattern::None;
    if (s == "alternating")
        return SourcePattern::Alternating;
    if (s == "dense")
        return SourcePattern::Dense;
    if (s == "random-even")
        return SourcePattern::RandomEven;
    throw std::invalid_argument("source_pattern: unknown pattern '" + s + "'");
}

SourceSpec boundary_sources(const FiniteGraph& g, SourcePattern pat, CounterRng rng)
{
    SourceSpec a = SourceSpec::empty(g.vertex_count, 2);
    for (int v : g.boundary) {
        bool take = false;
        switch (pat) {
        case SourcePattern::None:
            break;
        case SourcePattern::Alternating: {
            int s = 0;
            for (int ax = 0; ax < g.dim; ++ax)
                s += g.coord(v)[ax];
            take = (s & 1) == 0;
            break;
        }
        case SourcePattern::Dense:
            take = true;
            break;
        case SourcePattern::RandomEven:
            take = rng.next_u64() & 1;
            break;
        }
        if (take)
            a.labels[v] = 1;
    }
    if (a.support_size() & 1) {
        for (int v = g.vertex_count - 1; v >= 0; --v)
            if (a.labels[v]) {
                a.labels[v] = 0;
                break;
            }
    }
    return a;
}

std::vector<int> central_edges(const FiniteGraph& g)
{
    std::vector<int> origin(g.dim, 0);
    int v0 = g.vertex_at(origin);
    if (v0 < 0)
        throw std::invalid_argument("central_edges: box does not contain the origin");
    std::vector<int> es;
    for (int i = g.adj_offset[v0]; i < g.adj_offset[v0 + 1] && es.size() < 4; ++i)
        es.push_back(g.adj[i].edge);
    std::sort(es.begin(), es.end());
    return es;
}

ExperimentResult uc_given_sources(int d, double p, int N, SourcePattern pattern,
                                  const ReplicaPlan& plan, uint64_t seed)
{
    auto t0 = Clock::now();
    FiniteGraph g = build_box({d, N, {}});
    SourceSpec a = boundary_sources(g, pattern, CounterRng(seed).split(0xa0));
    std::vector<uint8_t> hit(plan.replicas, 0);
    long long work =
        run_chain_grid(g, BoundaryCondition::free(), p, 2.0, a, plan, seed,
                       [&](long long, long long idx, const BondConfig& w) {
                           hit[idx] = unique_crossing(g, w, N / 2, N);
                       });
    long long succ = 0;
    for (uint8_t h : hit)
        succ += h;
    BinomialEstimate be = binomial_estimate(succ, plan.replicas);

    ExperimentResult r;
    r.name = "uc_given_sources";
    r.params = {{"d", std::to_string(d)},
                {"p", fmt(p)},
                {"N", std::to_string(N)},
                {"pattern", std::to_string(int(pattern))}};
    r.estimate = be.estimate;
    r.ci = be.ci;
    r.replicas = plan.replicas;
    r.seed = seed;
    r.work_units = work;
    r.wall_ms = ms_since(t0);
    return r;
}

DensitySummary giant_touch_density(int d, double p, int n, const ReplicaPlan& plan,
                                   double theta, double eps, int L0, uint64_t seed)
{
    auto t0 = Clock::now();
    FiniteGraph g = build_box({d, n, {}});
    // A = the face x_0 = +n
    std::vector<int> face;
    for (int v : g.boundary)
        if (g.coord(v)[0] == n)
            face.push_back(v);

    DensitySummary out;
    out.fractions.assign(plan.replicas, 0.0);
    long long work = run_chain_grid(
        g, BoundaryCondition::free(), p, 2.0, std::nullopt, plan, seed,
        [&](long long, long long idx, const BondConfig& w) {
            GiantResult gr = giant_event(g, w, eps, theta, L0);
            if (!gr.ok) {
                out.fractions[idx] = 0.0;
                return;
            }
            std::vector<uint8_t> in_giant(g.vertex_count, 0);
            for (int v : gr.giant)
                in_giant[v] = 1;
            int touch = 0;
            for (int v : face)
                touch += in_giant[v];
            out.fractions[idx] = double(touch) / double(face.size());
        });

    std::vector<double> sorted = out.fractions;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    for (double gamma : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        long long cnt = 0;
        for (double f : out.fractions)
            cnt += f >= gamma;
        out.at_gamma.emplace_back(gamma, binomial_estimate(cnt, plan.replicas));
    }
    ExperimentResult& r = out.median_row;
    r.name = "giant_density";
    r.params = {{"d", std::to_string(d)}, {"p", fmt(p)}, {"n", std::to_string(n)},
                {"theta", fmt(theta)},    {"eps", fmt(eps)}, {"L0", std::to_string(L0)}};
    r.estimate = median;
    r.ci = {sorted.front(), sorted.back()};
    r.replicas = plan.replicas;
    r.seed = seed;
    r.work_units = work;
    r.wall_ms = ms_since(t0);
    return out;
}

namespace {

// one catching series: collapse annulus clusters meeting the previous source
// set to their lexicographically minimal inner-layer vertex
std::vector<int> catching_series(const FiniteGraph& g, const AnnulusPlan& plan,
                                 const BondConfig& w, const SourceSpec& a)
{
    std::vector<int> counts;
    std::vector<uint8_t> active(g.vertex_count, 0);
    int active_n = 0;
    for (int v = 0; v < g.vertex_count; ++v)
        if (a.labels[v]) {
            active[v] = 1;
            ++active_n;
        }
    counts.push_back(active_n);

    for (int k = 1; k <= plan.k_fin; ++k) {
        const int outer = plan.radii[k - 1], inner = plan.radii[k];
        // annulus edges: both endpoints in the closed shell, excluding
        // inner-layer tangential edges (they belong to the next annulus)
        UnionFind uf(g.vertex_count);
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (!w.get(e))
                continue;
            auto [u, v] = g.edges[e];
            int ru = g.inf_norm(u), rv = g.inf_norm(v);
            if (ru < inner || ru > outer || rv < inner || rv > outer)
                continue;
            if (ru == inner && rv == inner)
                continue;
            uf.unite(u, v);
        }
        // representative per surviving cluster: lexicographic scan of the
        // inner layer; vertex ids are lex-ordered by construction
        std::vector<int> rep(g.vertex_count, -1);
        std::vector<uint8_t> survives(g.vertex_count, 0);
        for (int v = 0; v < g.vertex_count; ++v)
            if (active[v]) {
                int r = g.inf_norm(v);
                if (r >= inner && r <= outer)
                    survives[uf.find(v)] = 1;
            }
        std::fill(active.begin(), active.end(), 0);
        active_n = 0;
        for (int v = 0; v < g.vertex_count; ++v) {
            if (g.inf_norm(v) != inner)
                continue;
            int root = uf.find(v);
            if (survives[root] && rep[root] < 0) {
                rep[root] = v;
                active[v] = 1;
                ++active_n;
            }
        }
        counts.push_back(active_n);
    }
    return counts;
}

} // namespace

CatchingResult catching_trace(int d, double p, int N, SourcePattern pattern,
                              const ReplicaPlan& plan, uint64_t seed)
{
    auto t0 = Clock::now();
    FiniteGraph g = build_box({d, N, {}});
    AnnulusPlan ann = AnnulusPlan::make(N);
    SourceSpec a = boundary_sources(g, pattern, CounterRng(seed).split(0xa0));

    CatchingResult out;
    out.replicas = plan.replicas;
    std::vector<std::vector<int>> series(plan.replicas);
    out.work_units = run_chain_grid(g, BoundaryCondition::free(), p, 2.0, a, plan, seed,
                                    [&](long long, long long idx, const BondConfig& w) {
                                        series[idx] = catching_series(g, ann, w, a);
                                    });
    out.mean_profile.assign(ann.k_fin + 1, 0.0);
    for (const auto& s : series) {
        for (std::size_t k = 0; k + 1 < s.size(); ++k)
            if (s[k + 1] > s[k])
                out.monotone_ok = false;
        for (std::size_t k = 0; k < s.size(); ++k)
            out.mean_profile[k] += s[k];
    }
    if (!out.monotone_ok)
        throw std::logic_error("catching_trace: per-replica monotonicity violated");
    for (double& m : out.mean_profile)
        m /= double(plan.replicas);

    // least-squares geometric fit of the mean profile
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int npt = 0;
        for (std::size_t k = 0; k < out.mean_profile.size(); ++k)
            if (out.mean_profile[k] > 0) {
                double x = double(k), y = std::log(out.mean_profile[k]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++npt;
            }
        double denom = npt * sxx - sx * sx;
        out.fit_rate = npt >= 2 && denom != 0 ? std::exp((npt * sxy - sx * sy) / denom) : 1.0;
    }

    double wall = ms_since(t0);
    for (std::size_t k = 0; k < out.mean_profile.size(); ++k) {
        ExperimentResult r;
        r.name = "catching";
        r.params = {{"d", std::to_string(d)},
                    {"p", fmt(p)},
                    {"N", std::to_string(N)},
                    {"pattern", std::to_string(int(pattern))},
                    {"k", std::to_string(k)}};
        r.estimate = out.mean_profile[k];
        // profile means are not proportions; record the sample range
        r.ci = {out.mean_profile[k], out.mean_profile[k]};
        r.replicas = plan.replicas;
        r.seed = seed;
        r.work_units = out.work_units;
        r.wall_ms = wall;
        out.rows.push_back(std::move(r));
    }
    return out;
}

namespace {

std::vector<long long> pattern_counts(const FiniteGraph& g, const std::vector<int>& ce,
                                      int d, double x, SourcePattern pat,
                                      const ReplicaPlan& plan, uint64_t seed,
                                      long long* work)
{
    SourceSpec a = boundary_sources(g, pat, CounterRng(seed).split(0xa0));
    double p = params::p_from_x(x, 2.0);
    std::vector<int> pat_of(plan.replicas, 0);
    *work = run_chain_grid(g, BoundaryCondition::free(), p, 2.0, a, plan, seed,
                           [&](long long c, long long idx, const BondConfig& w) {
                               ForestBasis basis = forest_basis(g, w);
                               CounterRng fr = CounterRng(seed)
                                                   .split(0xf10)
                                                   .split(uint64_t(c))
                                                   .split(uint64_t(idx));
                               FlowConfig eta = sample_sourced_flow(basis, a, fr);
                               int m = 0;
                               for (std::size_t b = 0; b < ce.size(); ++b)
                                   if (eta.values[ce[b]])
                                       m |= 1 << b;
                               pat_of[idx] = m;
                           });
    std::vector<long long> counts(std::size_t(1) << ce.size(), 0);
    for (int m : pat_of)
        ++counts[m];
    (void)d;
    return counts;
}

} // namespace

MixingResult mixing_gap(int d, double x, int N, SourcePattern a1, SourcePattern a2,
                        const ReplicaPlan& plan, uint64_t seed)
{
    auto t0 = Clock::now();
    FiniteGraph g = build_box({d, N, {}});
    std::vector<int> ce = central_edges(g);
    long long w1 = 0, w2 = 0;
    std::vector<long long> c1 =
        pattern_counts(g, ce, d, x, a1, plan, CounterRng(seed).split(1).key(), &w1);
    std::vector<long long> c2 =
        pattern_counts(g, ce, d, x, a2, plan, CounterRng(seed).split(2).key(), &w2);

    MixingResult out;
    double n = double(plan.replicas);
    double gap = 0, half = 0;
    for (std::size_t m = 0; m < c1.size(); ++m) {
        double p1 = c1[m] / n, p2 = c2[m] / n;
        out.probs1.push_back(p1);
        out.probs2.push_back(p2);
        double diff = std::fabs(p1 - p2);
        double se = 1.959964 * std::sqrt(p1 * (1 - p1) / n + p2 * (1 - p2) / n);
        if (diff > gap)
            gap = diff;
        half = std::max(half, se);
    }
    out.half_width = half;
    ExperimentResult& r = out.row;
    r.name = "mixing_gap";
    r.params = {{"d", std::to_string(d)},
                {"x", fmt(x)},
                {"N", std::to_string(N)},
                {"a1", std::to_string(int(a1))},
                {"a2", std::to_string(int(a2))}};
    r.estimate = gap;
    r.ci = {std::max(0.0, gap - half), std::min(1.0, gap + half)};
    r.replicas = plan.replicas;
    r.seed = seed;
    r.work_units = w1 + w2;
    r.wall_ms = ms_since(t0);
    return out;
}

double mixing_gap_oracle(const FiniteGraph& g, double x, const SourceSpec& a1,
                         const SourceSpec& a2)
{
    std::vector<int> ce = central_edges(g);
    ExactDistribution d1 = enumerate_measure(MeasureSpec::loop(g, x, a1));
    ExactDistribution d2 = enumerate_measure(MeasureSpec::loop(g, x, a2));
    ExactDistribution m1 = marginal(d1, ce);
    ExactDistribution m2 = marginal(d2, ce);
    double gap = 0;
    for (std::size_t i = 0; i < m1.size(); ++i)
        gap = std::max(gap, std::fabs(m1.prob[i] - m2.prob[i]));
    return gap;
}

ExperimentResult estimate_theta(int d, double p, int n, const ReplicaPlan& plan,
                                uint64_t seed)
{
    auto t0 = Clock::now();
    FiniteGraph g = build_box({d, n, {}});
    std::vector<double> dens(plan.replicas, 0.0);
    long long work = run_chain_grid(
        g, BoundaryCondition::wired(), p, 2.0, std::nullopt, plan, seed,
        [&](long long, long long idx, const BondConfig& w) {
            ClusterLabeling lab = clusters(g, w);
            int mx = 0;
            for (int v = 0; v < g.vertex_count; ++v)
                mx = std::max(mx, lab.cluster_size[v]);
            dens[idx] = double(mx) / double(g.vertex_count);
        });
    double mean = 0;
    for (double v : dens)
        mean += v;
    mean /= double(plan.replicas);

    ExperimentResult r;
    r.name = "theta";
    r.params = {{"d", std::to_string(d)}, {"p", fmt(p)}, {"n", std::to_string(n)}};
    r.estimate = mean;
    r.ci = {mean, mean};
    r.replicas = plan.replicas;
    r.seed = seed;
    r.work_units = work;
    r.wall_ms = ms_since(t0);
    return r;
}

ExperimentResult giant_frequency(int d, double p, int n, bool wired, double theta,
                                 double eps, int L0, const ReplicaPlan& plan,
                                 uint64_t seed)
{
    auto t0 = Clock::now();
    FiniteGraph g = build_box({d, n, {}});
    std::vector<uint8_t> hit(plan.replicas, 0);
    BoundaryCondition bc = wired ? BoundaryCondition::wired() : BoundaryCondition::free();
    long long work = run_chain_grid(g, bc, p, 2.0, std::nullopt, plan, seed,
                                    [&](long long, long long idx, const BondConfig& w) {
                                        hit[idx] = giant_event(g, w, eps, theta, L0).ok;
                                    });
    long long succ = 0;
    for (uint8_t h : hit)
        succ += h;
    BinomialEstimate be = binomial_estimate(succ, plan.replicas);

    ExperimentResult r;
    r.name = "giant_frequency";
    r.params = {{"d", std::to_string(d)},   {"p", fmt(p)},
                {"n", std::to_string(n)},   {"bc", wired ? "wired" : "free"},
                {"theta", fmt(theta)},      {"eps", fmt(eps)},
                {"L0", std::to_string(L0)}};
    r.estimate = be.estimate;
    r.ci = be.ci;
    r.replicas = plan.replicas;
    r.seed = seed;
    r.work_units = work;
    r.wall_ms = ms_since(t0);
    return r;
}

} // namespace fkrep
