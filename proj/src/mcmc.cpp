#include "fkrep/mcmc.hpp"

#include <algorithm>
#include <cmath>

#include "fkrep/cyclespace.hpp"
#include "fkrep/errors.hpp"

namespace fkrep {

namespace params {

double p_from_x(double x, double q)
{
    if (!(x > 0 && x < 1) || !(q > 0))
        throw std::invalid_argument("p_from_x: need x in (0,1), q > 0");
    return q * x / (1.0 + (q - 1.0) * x);
}

double x_from_p(double p, double q)
{
    if (!(p > 0 && p < 1) || !(q > 0))
        throw std::invalid_argument("x_from_p: need p in (0,1), q > 0");
    return p / (p + q * (1.0 - p));
}

double x_from_beta(double beta) { return std::tanh(beta); }
double beta_from_x(double x) { return std::atanh(x); }
double sprinkle_rate(double x) { return 1.0 - std::sqrt(1.0 - x * x); }

} // namespace params

FkChain::FkChain(const FiniteGraph& g, BoundaryCondition bc, double p, double q,
                 std::optional<SourceSpec> conditioning, uint64_t scan_seed)
    : g_(&g), p_(p), q_(q), config_(g.edges.size())
{
    if (!(p > 0 && p < 1) || !(q > 0))
        throw std::invalid_argument("FkChain: need p in (0,1) and q > 0");

    // quotient classes induced by the boundary wiring
    UnionFind uf(g.vertex_count);
    if (bc.kind == BoundaryCondition::Wired) {
        for (std::size_t i = 1; i < g.boundary.size(); ++i)
            uf.unite(g.boundary[0], g.boundary[i]);
    } else if (bc.kind == BoundaryCondition::Partition) {
        for (const auto& cls : bc.classes) {
            for (int v : cls)
                if (!g.is_boundary(v))
                    throw std::invalid_argument(
                        "FkChain: partition mentions non-boundary vertex");
            for (std::size_t i = 1; i < cls.size(); ++i)
                uf.unite(cls[0], cls[i]);
        }
    }
    qmap_.assign(g.vertex_count, -1);
    for (int v = 0; v < g.vertex_count; ++v) {
        int r = uf.find(v);
        if (qmap_[r] < 0)
            qmap_[r] = qn_++;
        qmap_[v] = qmap_[r];
    }
    qedges_.resize(g.edges.size());
    std::vector<int> deg(qn_ + 1, 0);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        int u = qmap_[g.edges[e].first], v = qmap_[g.edges[e].second];
        qedges_[e] = {u, v};
        if (u != v) {
            ++deg[u + 1];
            ++deg[v + 1];
        }
    }
    adj_off_.assign(qn_ + 1, 0);
    for (int v = 0; v < qn_; ++v)
        adj_off_[v + 1] = adj_off_[v] + deg[v + 1];
    adj_.assign(adj_off_.back(), {});
    std::vector<int> cur(adj_off_.begin(), adj_off_.end() - 1);
    for (std::size_t e = 0; e < qedges_.size(); ++e) {
        auto [u, v] = qedges_[e];
        if (u == v)
            continue;
        adj_[cur[u]++] = {v, int(e)};
        adj_[cur[v]++] = {u, int(e)};
    }

    if (conditioning) {
        if (int(conditioning->labels.size()) != g.vertex_count)
            throw std::invalid_argument("FkChain: conditioning labels size mismatch");
        if (!conditioning->valid())
            throw std::invalid_argument("FkChain: conditioning labels do not cancel");
        qmod_ = conditioning->q;
        labels_.assign(qn_, 0);
        for (int v = 0; v < g.vertex_count; ++v)
            labels_[qmap_[v]] = (labels_[qmap_[v]] + conditioning->labels[v]) % qmod_;
        cond_ = std::move(conditioning);
    }

    scan_.resize(g.edges.size());
    for (std::size_t e = 0; e < scan_.size(); ++e)
        scan_[e] = int(e);
    CounterRng sr(scan_seed);
    for (std::size_t i = scan_.size(); i > 1; --i)
        std::swap(scan_[i - 1], scan_[sr.next_below(i)]);

    mark_.assign(qn_, 0);
    set_all_open();
}

void FkChain::set_all_open()
{
    config_ = BondConfig(g_->edges.size(), true);
    if (cond_) {
        // all-open is feasible iff every quotient component's labels cancel
        UnionFind uf(qn_);
        for (auto [u, v] : qedges_)
            if (u != v)
                uf.unite(u, v);
        std::vector<int> sum(qn_, 0);
        for (int v = 0; v < qn_; ++v)
            sum[uf.find(v)] = (sum[uf.find(v)] + labels_[v]) % qmod_;
        for (int v = 0; v < qn_; ++v)
            if (uf.find(v) == v && sum[v] != 0)
                throw InfeasibleSourcesError(
                    "FkChain: sources infeasible even at the full configuration");
    }
}

void FkChain::set_all_closed()
{
    BondConfig w(g_->edges.size());
    set_config(w);
}

void FkChain::set_config(const BondConfig& w)
{
    if (w.size() != g_->edges.size())
        throw std::invalid_argument("FkChain: configuration size mismatch");
    if (cond_) {
        UnionFind uf(qn_);
        for (std::size_t e = 0; e < qedges_.size(); ++e)
            if (w.get(e) && qedges_[e].first != qedges_[e].second)
                uf.unite(qedges_[e].first, qedges_[e].second);
        std::vector<int> sum(qn_, 0);
        for (int v = 0; v < qn_; ++v)
            sum[uf.find(v)] = (sum[uf.find(v)] + labels_[v]) % qmod_;
        for (int v = 0; v < qn_; ++v)
            if (uf.find(v) == v && sum[v] != 0)
                throw InfeasibleSourcesError("FkChain: start state violates conditioning");
    }
    config_ = w;
}

FkChain::BfsResult FkChain::connected_off(int s, int t, int edge)
{
    // balanced bidirectional BFS on open edges excluding `edge`; when the
    // vertices are separated, the exhausted side is a full component and its
    // label sum decides split feasibility
    epoch_ += 2;
    const long long m0 = epoch_, m1 = epoch_ + 1;
    q0_.clear();
    q1_.clear();
    q0_.push_back(s);
    q1_.push_back(t);
    mark_[s] = m0;
    mark_[t] = m1;
    long long sum0 = labels_.empty() ? 0 : labels_[s];
    long long sum1 = labels_.empty() ? 0 : labels_[t];
    std::size_t h0 = 0, h1 = 0;

    while (true) {
        bool side0 = (q0_.size() - h0) <= (q1_.size() - h1);
        auto& q = side0 ? q0_ : q1_;
        auto& h = side0 ? h0 : h1;
        auto& sum = side0 ? sum0 : sum1;
        const long long own = side0 ? m0 : m1;
        const long long other = side0 ? m1 : m0;
        if (h >= q.size())
            return {false, sum};
        // expand one frontier layer of the smaller side
        std::size_t layer_end = q.size();
        for (; h < layer_end; ++h) {
            int u = q[h];
            for (int i = adj_off_[u]; i < adj_off_[u + 1]; ++i) {
                const auto& arc = adj_[i];
                if (arc.edge == edge || !config_.get(arc.edge))
                    continue;
                if (mark_[arc.to] == other)
                    return {true, 0};
                if (mark_[arc.to] == own)
                    continue;
                mark_[arc.to] = own;
                if (!labels_.empty())
                    sum += labels_[arc.to];
                q.push_back(arc.to);
            }
        }
    }
}

double FkChain::conditional_open(int edge, bool* forced_open)
{
    auto [u, v] = qedges_[edge];
    if (forced_open)
        *forced_open = false;
    if (u == v)
        return p_;
    BfsResult r = connected_off(u, v, edge);
    if (r.connected)
        return p_;
    if (cond_ && config_.get(edge) && r.side_sum % qmod_ != 0) {
        // closing would strand unmatched sources on one side
        if (forced_open)
            *forced_open = true;
        return 1.0;
    }
    return p_ / (p_ + q_ * (1.0 - p_));
}

void FkChain::step(int edge, double u)
{
    bool forced = false;
    double pe = conditional_open(edge, &forced);
    config_.set(edge, forced || u <= pe);
}

void FkChain::sweep(CounterRng& rng)
{
    for (int e : scan_)
        step(e, rng.next_unit());
}

void FkChain::sweep_with(const std::vector<double>& uniforms)
{
    for (std::size_t i = 0; i < scan_.size(); ++i)
        step(scan_[i], uniforms[i]);
}

double FkChain::open_fraction() const
{
    return config_.size() ? double(config_.count()) / double(config_.size()) : 0.0;
}

int FkChain::kappa() const
{
    UnionFind uf(qn_);
    int k = qn_;
    for (std::size_t e = 0; e < qedges_.size(); ++e)
        if (config_.get(e) && qedges_[e].first != qedges_[e].second)
            if (uf.unite(qedges_[e].first, qedges_[e].second))
                --k;
    return k;
}

FkSampler::FkSampler(const FiniteGraph& g, BoundaryCondition bc, double p, double q,
                     std::optional<SourceSpec> conditioning, Schedule s, CounterRng r)
    : chain(g, bc, p, q, conditioning, r.split(0x5ca7).key()),
      sched(s), rng(r.split(0xc4a15))
{
    if (sched.burnin < 0) {
        // default schedule: 200 sweeps or twice the measured coalescence
        // time, whichever is larger
        DiagnosticReport rep = convergence_diagnostic(g, std::move(bc), p, q,
                                                      std::move(conditioning),
                                                      sched.diag_budget, 0.01,
                                                      r.split(0xd1a9));
        int t = rep.coalesced ? rep.coalesce_sweep : sched.diag_budget;
        sched.burnin = std::max(200, 2 * t);
    }
}

BondConfig FkSampler::next_sample()
{
    if (!warmed) {
        burnin_used = sched.burnin;
        for (int i = 0; i < burnin_used; ++i)
            chain.sweep(rng);
        warmed = true;
    } else {
        for (int i = 0; i < sched.thin; ++i)
            chain.sweep(rng);
    }
    return chain.config();
}

BondConfig sample_fk(const FiniteGraph& g, BoundaryCondition bc, double p, double q,
                     std::optional<SourceSpec> conditioning, Schedule sched,
                     CounterRng rng)
{
    FkSampler s(g, std::move(bc), p, q, std::move(conditioning), sched, rng);
    return s.next_sample();
}

FlowConfig sample_loop(const FiniteGraph& g, double x, int q, const SourceSpec& a,
                       BoundaryCondition bc, Schedule sched, CounterRng rng)
{
    if (a.q != q)
        throw std::invalid_argument("sample_loop: source modulus mismatch");
    double p = params::p_from_x(x, double(q));
    BondConfig w = sample_fk(g, std::move(bc), p, double(q), a, sched, rng.split(1));
    ForestBasis basis = forest_basis(g, w);
    CounterRng flow_rng = rng.split(2);
    return sample_sourced_flow(basis, a, flow_rng);
}

ParityQuantiles::ParityQuantiles(double b) : beta(b)
{
    if (!(b > 0))
        throw std::invalid_argument("ParityQuantiles: beta must be positive");
    long double even_norm = std::cosh((long double)b);
    long double odd_norm = std::sinh((long double)b);
    long double term = 1.0L; // beta^0 / 0!
    long double cum = 0.0L;
    for (int n = 0;; n += 2) {
        cum += term;
        even_cum.push_back(double(cum / even_norm));
        if (1.0L - cum / even_norm < 1e-14L)
            break;
        term *= (long double)b * b / ((n + 1) * (n + 2));
    }
    term = (long double)b; // beta^1 / 1!
    cum = 0.0L;
    for (int n = 1;; n += 2) {
        cum += term;
        odd_cum.push_back(double(cum / odd_norm));
        if (1.0L - cum / odd_norm < 1e-14L)
            break;
        term *= (long double)b * b / ((n + 1) * (n + 2));
    }
}

int ParityQuantiles::f_even(double u) const
{
    auto it = std::lower_bound(even_cum.begin(), even_cum.end(), u);
    if (it == even_cum.end())
        --it; // truncated tail below 1e-14
    return 2 * int(it - even_cum.begin());
}

int ParityQuantiles::f_odd(double u) const
{
    auto it = std::lower_bound(odd_cum.begin(), odd_cum.end(), u);
    if (it == odd_cum.end())
        --it;
    return 2 * int(it - odd_cum.begin()) + 1;
}

CurrentConfig sample_current(const FiniteGraph& g, double beta, const SourceSpec& a,
                             Schedule sched, CounterRng rng)
{
    double x = params::x_from_beta(beta);
    FlowConfig eta = sample_loop(g, x, 2, a, BoundaryCondition::free(), sched, rng.split(3));
    ParityQuantiles pq(beta);
    CurrentConfig n;
    n.values.resize(g.edges.size());
    CounterRng u_rng = rng.split(4);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        double u = u_rng.next_unit();
        n.values[e] = eta.values[e] ? pq.f_odd(u) : pq.f_even(u);
    }
    return n;
}

BondConfig sprinkle(const BondConfig& w, double rate, CounterRng& rng)
{
    if (!(rate >= 0 && rate <= 1))
        throw std::invalid_argument("sprinkle: rate outside [0,1]");
    BondConfig out = w;
    for (std::size_t e = 0; e < w.size(); ++e)
        if (rate > 0 && rng.next_unit() < rate)
            out.set(e, true);
    return out;
}

DiagnosticReport convergence_diagnostic(const FiniteGraph& g, BoundaryCondition bc,
                                        double p, double q,
                                        std::optional<SourceSpec> conditioning,
                                        int budget, double tol, CounterRng rng)
{
    DiagnosticReport rep;
    rep.budget = budget;
    rep.monotone_regime = q >= 1.0 && !conditioning;

    uint64_t scan_seed = rng.split(0x5ca7).key();
    FkChain hi(g, bc, p, q, conditioning, scan_seed);
    FkChain lo(g, bc, p, q, conditioning, scan_seed);
    hi.set_all_open();
    if (conditioning) {
        // a feasible pseudo-random start: a short run from all-open driven by
        // an independent stream
        CounterRng warm = rng.split(0xfeed);
        for (int i = 0; i < 20; ++i)
            lo.sweep(warm);
    } else {
        lo.set_all_closed();
    }

    CounterRng steps = rng.split(0x57e9);
    std::vector<double> uniforms(g.edges.size());
    for (int s = 1; s <= budget; ++s) {
        for (auto& u : uniforms)
            u = steps.next_unit();
        hi.sweep_with(uniforms);
        lo.sweep_with(uniforms);
        if (rep.monotone_regime && !lo.config().subset_of(hi.config()))
            rep.sandwich_ok = false;
        if (rep.agree_sweep < 0 &&
            std::fabs(hi.open_fraction() - lo.open_fraction()) <= tol &&
            std::abs(hi.kappa() - lo.kappa()) <= std::max(1.0, tol * g.vertex_count))
            rep.agree_sweep = s;
        if (hi.config() == lo.config()) {
            rep.coalesced = true;
            rep.coalesce_sweep = s;
            break;
        }
    }
    return rep;
}

} // namespace fkrep
