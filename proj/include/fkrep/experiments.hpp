#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fkrep/mcmc.hpp"
#include "fkrep/stats.hpp"

namespace fkrep {

struct ExperimentResult {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    double estimate = 0;
    Interval ci;
    long long replicas = 0;
    uint64_t seed = 0;
    long long work_units = 0; // heat-bath edge updates (deterministic cost)
    double wall_ms = 0;       // measured; not part of the persistent record
};

enum class SourcePattern { None, Alternating, Dense, RandomEven };
SourcePattern parse_source_pattern(const std::string& s);

// boundary source set for a box; |A| is forced even by dropping the largest id
SourceSpec boundary_sources(const FiniteGraph& g, SourcePattern pat, CounterRng rng);

struct ReplicaPlan {
    long long replicas = 200;   // total measurements
    int samples_per_chain = 10; // thinned draws taken from each chain
    Schedule sched{200, 10};
    long long chains() const
    {
        return (replicas + samples_per_chain - 1) / samples_per_chain;
    }
};

// fraction of conditioned fk samples with a unique crossing of the annulus
// (N/2, N]
ExperimentResult uc_given_sources(int d, double p, int N, SourcePattern pattern,
                                  const ReplicaPlan& plan, uint64_t seed);

struct DensitySummary {
    ExperimentResult median_row;
    std::vector<double> fractions;                      // per measurement
    std::vector<std::pair<double, BinomialEstimate>> at_gamma; // P[frac >= g]
};

// distribution of the touched fraction of A under free boundary conditions;
// A = one full face of the box
DensitySummary giant_touch_density(int d, double p, int n, const ReplicaPlan& plan,
                                   double theta, double eps, int L0, uint64_t seed);

struct CatchingResult {
    std::vector<double> mean_profile; // mean |A^k|, k = 0..k_fin
    double fit_rate = 0;              // least-squares geometric contraction
    bool monotone_ok = true;
    long long replicas = 0;
    long long work_units = 0;
    std::vector<ExperimentResult> rows; // one per annulus index
};

// per-annulus surviving-source counts: clusters of each annulus shell are
// collapsed to their lexicographically minimal inner-boundary vertex
CatchingResult catching_trace(int d, double p, int N, SourcePattern pattern,
                              const ReplicaPlan& plan, uint64_t seed);

struct MixingResult {
    ExperimentResult row;                // estimate = gap
    double half_width = 0;               // joint CI half width
    std::vector<double> probs1, probs2;  // per-pattern estimates
};

// max over the 16 patterns of the central origin edges of the difference in
// loop-sample probabilities between two boundary source sets
MixingResult mixing_gap(int d, double x, int N, SourcePattern a1, SourcePattern a2,
                        const ReplicaPlan& plan, uint64_t seed);

// exact analogue on an oracle-sized box
double mixing_gap_oracle(const FiniteGraph& g, double x, const SourceSpec& a1,
                         const SourceSpec& a2);

// mean largest-cluster density under wired boundary
ExperimentResult estimate_theta(int d, double p, int n, const ReplicaPlan& plan,
                                uint64_t seed);

// frequency of the coarse-graining giant event
ExperimentResult giant_frequency(int d, double p, int n, bool wired, double theta,
                                 double eps, int L0, const ReplicaPlan& plan,
                                 uint64_t seed);

// central edges used by the mixing event family (first 4 edges at the origin)
std::vector<int> central_edges(const FiniteGraph& g);

} // namespace fkrep
