#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "fkrep/config.hpp"
#include "fkrep/graph.hpp"

namespace fkrep {

enum class Family { Bernoulli, FK, Loop, QFlow, CurrentPair };

// Bond: one bit per edge, index = sum bit_e 2^e.
// Flow: one Z/q digit per edge, index = sum digit_e q^e.
// CurrentPair: one base-3 digit per edge; 0 closed, 1 even >= 2, 2 odd.
enum class IndexSpace { Bond, Flow, CurrentPair };

struct MeasureSpec {
    Family family = Family::Bernoulli;
    const FiniteGraph* graph = nullptr;
    double p = 0.5;      // bernoulli / fk edge parameter
    double cluster_q = 2.0; // fk cluster weight (real)
    int qmod = 2;        // flow modulus
    double x = 0.5;      // loop / qflow edge weight
    double beta = 1.0;   // current inverse temperature
    BoundaryCondition bc;              // fk only
    std::optional<SourceSpec> sources; // loop / qflow / current

    static MeasureSpec bernoulli(const FiniteGraph& g, double p);
    static MeasureSpec fk(const FiniteGraph& g, double p, double q,
                          BoundaryCondition bc = {});
    static MeasureSpec loop(const FiniteGraph& g, double x, SourceSpec a);
    static MeasureSpec qflow(const FiniteGraph& g, double x, int q, SourceSpec a);
    static MeasureSpec current_pair(const FiniteGraph& g, double beta, SourceSpec a);
};

struct ExactDistribution {
    const FiniteGraph* graph = nullptr;
    IndexSpace space = IndexSpace::Bond;
    int base = 2;       // digits per edge: 2 (bond), qmod (flow), 3 (pair)
    int edge_count = 0;
    std::vector<double> prob; // normalised, one entry per configuration index
    double log_z = 0;         // log of the weight sum before normalisation

    std::size_t size() const { return prob.size(); }
    bool same_index_space(const ExactDistribution& o) const
    {
        return space == o.space && base == o.base && edge_count == o.edge_count;
    }
};

// Exact table of a measure; the parallel version and the serial reference
// produce bit-identical output.
ExactDistribution enumerate_measure(const MeasureSpec& spec);
ExactDistribution enumerate_measure_serial(const MeasureSpec& spec);

ExactDistribution condition_on(const ExactDistribution& d,
                               const std::function<bool(uint64_t)>& event);

// F_A as a predicate on bond-config indices
std::function<bool(uint64_t)> sources_event(const FiniteGraph& g, SourceSpec a);

double tv_distance(const ExactDistribution& a, const ExactDistribution& b);
double max_abs_diff(const ExactDistribution& a, const ExactDistribution& b);

ExactDistribution marginal(const ExactDistribution& d, const std::vector<int>& edge_subset);

// distribution of the union of independent samples (bond spaces)
ExactDistribution push_union(const ExactDistribution& a, const ExactDistribution& b);

// generic pushforward onto a bond space over the same edges
ExactDistribution pushforward_bond(const ExactDistribution& d,
                                   const std::function<uint64_t(uint64_t)>& map);

// odd-part / trace marginals of a CurrentPair table
ExactDistribution current_odd_marginal(const ExactDistribution& d);
ExactDistribution current_trace_marginal(const ExactDistribution& d);

// trace marginal of a flow table
ExactDistribution flow_trace_marginal(const ExactDistribution& d);

// lifts a measure on a sub-edge-set into a larger edge space, absent edges
// deterministically closed; sub_to_full[i] = full edge id of sub edge i
ExactDistribution embed_closed(const ExactDistribution& d,
                               const std::vector<int>& sub_to_full, int full_edges);

// Stochastic domination of bond measures decided by Strassen coupling
// feasibility (max-flow on the subset relation). |E| <= 12.
bool dominates(const ExactDistribution& hi, const ExactDistribution& lo);

// Strong version: every conditioning slice pair xi <= xi' on every edge
// subset again dominates. |E| <= 8.
bool strongly_dominates(const ExactDistribution& hi, const ExactDistribution& lo);

// csv export: header comment documents that bit i of the index is edge i
void to_csv(const ExactDistribution& d, std::ostream& os);

} // namespace fkrep
