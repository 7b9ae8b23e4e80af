#pragma once

#include <vector>

#include "fkrep/mcmc.hpp"
#include "fkrep/oracle.hpp"
#include "fkrep/rng.hpp"

namespace fkrep {

// Sequential revelation with shared uniforms: every participant reveals each
// edge in the same fixed order, opening it when the shared uniform falls
// below its own exact conditional probability given the revealed past.
// Participants are bond measures on one edge index space (sub-measures are
// embedded with absent edges closed before building the plan).
struct CouplingPlan {
    std::vector<int> order;                    // revelation order, every edge once
    std::vector<const ExactDistribution*> participants;

    // conditional tables: cond[p][j] has one entry per prefix in {0,1}^j,
    // the probability that edge order[j] is open given the revealed prefix
    std::vector<std::vector<std::vector<double>>> cond;

    static CouplingPlan make(std::vector<const ExactDistribution*> participants,
                             std::vector<int> order = {});
};

// one draw: a configuration per participant, all driven by the same uniforms
std::vector<BondConfig> explore(const CouplingPlan& plan, CounterRng& rng);

// MCMC-scale surrogate: heat-bath chains driven by identical edge and
// uniform sequences. Each spec may live on a sub-box embedded in the full
// edge space via its edge map (absent edges stay closed).
struct GrandSpec {
    const FiniteGraph* graph = nullptr;
    BoundaryCondition bc;
    double p = 0.5;
    double q = 2.0;
    std::optional<SourceSpec> conditioning;
    std::vector<int> edge_to_full; // empty = identity
};

struct GrandResult {
    std::vector<BondConfig> configs; // in the full edge space
    // ordered_sweeps[i][j]: pair (i,j) was ordered (i below j) at every sweep
    std::vector<std::vector<bool>> pairwise_ordered;
};

GrandResult grand_couple(const std::vector<GrandSpec>& specs, int full_edges,
                         int sweeps, CounterRng rng);

} // namespace fkrep
