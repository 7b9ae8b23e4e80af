#include "fkrep/coupling.hpp"

#include <algorithm>

#include "fkrep/errors.hpp"

namespace fkrep {

CouplingPlan CouplingPlan::make(std::vector<const ExactDistribution*> participants,
                                std::vector<int> order)
{
    if (participants.empty())
        throw std::invalid_argument("CouplingPlan: no participants");
    const int m = participants[0]->edge_count;
    for (const auto* d : participants) {
        if (d->space != IndexSpace::Bond || d->edge_count != m)
            throw std::invalid_argument(
                "CouplingPlan: participants must be bond measures on one edge space");
        if (m > 20)
            throw CapacityError("CouplingPlan: beyond 20 edges");
    }
    CouplingPlan plan;
    if (order.empty()) {
        order.resize(m);
        for (int e = 0; e < m; ++e)
            order[e] = e;
    }
    {
        std::vector<int> seen(m, 0);
        for (int e : order)
            if (e < 0 || e >= m || seen[e]++)
                throw std::invalid_argument("CouplingPlan: order must cover every edge once");
        if (int(order.size()) != m)
            throw std::invalid_argument("CouplingPlan: order must cover every edge once");
    }
    plan.order = order;
    plan.participants = participants;

    // prefix mass tables, folded from the full table; cond[j][prefix] is the
    // exact conditional P[edge order[j] open | first j edges = prefix]
    for (const auto* d : participants) {
        std::vector<double> mass(d->prob.size());
        for (uint64_t idx = 0; idx < d->prob.size(); ++idx) {
            uint64_t pidx = 0;
            for (int j = 0; j < m; ++j)
                pidx |= ((idx >> order[j]) & 1u) << j;
            mass[pidx] = d->prob[idx];
        }
        std::vector<std::vector<double>> cond(m);
        for (int j = m - 1; j >= 0; --j) {
            const std::size_t n = std::size_t(1) << j;
            cond[j].resize(n);
            std::vector<double> folded(n);
            for (std::size_t pre = 0; pre < n; ++pre) {
                double closed = mass[pre];
                double open = mass[pre | (uint64_t(1) << j)];
                double tot = closed + open;
                folded[pre] = tot;
                cond[j][pre] = tot > 0 ? open / tot : 0.0;
            }
            mass.swap(folded);
        }
        plan.cond.push_back(std::move(cond));
    }
    return plan;
}

std::vector<BondConfig> explore(const CouplingPlan& plan, CounterRng& rng)
{
    const int m = int(plan.order.size());
    const std::size_t np = plan.participants.size();
    std::vector<uint64_t> prefix(np, 0);
    for (int j = 0; j < m; ++j) {
        double u = rng.next_unit();
        for (std::size_t p = 0; p < np; ++p)
            if (u <= plan.cond[p][j][prefix[p]])
                prefix[p] |= uint64_t(1) << j;
    }
    std::vector<BondConfig> out;
    out.reserve(np);
    for (std::size_t p = 0; p < np; ++p) {
        BondConfig c(m);
        for (int j = 0; j < m; ++j)
            if ((prefix[p] >> j) & 1)
                c.set(plan.order[j], true);
        out.push_back(std::move(c));
    }
    return out;
}

GrandResult grand_couple(const std::vector<GrandSpec>& specs, int full_edges,
                         int sweeps, CounterRng rng)
{
    const std::size_t np = specs.size();
    std::vector<FkChain> chains;
    std::vector<std::vector<int>> full_to_sub(np);
    uint64_t scan_seed = rng.split(0x5ca7).key();

    // one shared scan over the full edge space; each chain updates only the
    // edges it owns
    std::vector<int> scan(full_edges);
    for (int e = 0; e < full_edges; ++e)
        scan[e] = e;
    CounterRng sr(scan_seed);
    for (std::size_t i = scan.size(); i > 1; --i)
        std::swap(scan[i - 1], scan[sr.next_below(i)]);

    chains.reserve(np);
    for (std::size_t i = 0; i < np; ++i) {
        const GrandSpec& s = specs[i];
        chains.emplace_back(*s.graph, s.bc, s.p, s.q, s.conditioning, /*scan seed*/ 0);
        full_to_sub[i].assign(full_edges, -1);
        if (s.edge_to_full.empty()) {
            if (s.graph->edge_counti() != full_edges)
                throw std::invalid_argument("grand_couple: edge map missing");
            for (int e = 0; e < full_edges; ++e)
                full_to_sub[i][e] = e;
        } else {
            for (std::size_t e = 0; e < s.edge_to_full.size(); ++e)
                full_to_sub[i][s.edge_to_full[e]] = int(e);
        }
    }

    GrandResult res;
    res.pairwise_ordered.assign(np, std::vector<bool>(np, true));
    auto embed = [&](std::size_t i) {
        BondConfig c(full_edges);
        const BondConfig& sub = chains[i].config();
        for (int f = 0; f < full_edges; ++f)
            if (full_to_sub[i][f] >= 0 && sub.get(full_to_sub[i][f]))
                c.set(f, true);
        return c;
    };

    CounterRng steps = rng.split(0x57e9);
    for (int s = 0; s < sweeps; ++s) {
        for (int f : scan) {
            double u = steps.next_unit();
            for (std::size_t i = 0; i < np; ++i)
                if (full_to_sub[i][f] >= 0)
                    chains[i].step(full_to_sub[i][f], u);
        }
        std::vector<BondConfig> embedded;
        embedded.reserve(np);
        for (std::size_t i = 0; i < np; ++i)
            embedded.push_back(embed(i));
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = 0; j < np; ++j)
                if (i != j && !embedded[i].subset_of(embedded[j]))
                    res.pairwise_ordered[i][j] = false;
    }
    for (std::size_t i = 0; i < np; ++i)
        res.configs.push_back(embed(i));
    return res;
}

} // namespace fkrep
