#pragma once

#include <optional>
#include <vector>

#include "fkrep/bitconfig.hpp"
#include "fkrep/config.hpp"
#include "fkrep/graph.hpp"
#include "fkrep/rng.hpp"

namespace fkrep {

// parameter conversions between the coupled models
namespace params {
// fk edge parameter giving loop/flow weight x at cluster weight q
double p_from_x(double x, double q);
// loop/flow weight of the fk model: x = p / (p + q(1-p))
double x_from_p(double p, double q);
double x_from_beta(double beta); // tanh
double beta_from_x(double x);    // artanh
double sprinkle_rate(double x);  // 1 - sqrt(1-x^2), the trace sprinkling rate
} // namespace params

struct Schedule {
    int burnin = -1; // <0: 200 or twice the measured coalescence time
    int thin = 10;
    int diag_budget = 600; // sweep budget when burnin is automatic
};

// Single-bond heat-bath dynamics for the random-cluster model with cluster
// weight q > 0 and an optional source-feasibility conditioning. Boundary
// conditions enter through the induced wiring of boundary vertices.
class FkChain {
  public:
    FkChain(const FiniteGraph& g, BoundaryCondition bc, double p, double q,
            std::optional<SourceSpec> conditioning, uint64_t scan_seed);

    void set_all_open();
    void set_all_closed(); // rejects conditioning unless sources are empty
    void set_config(const BondConfig& w);

    // exact conditional update of one edge driven by an external uniform
    void step(int edge, double u);
    void sweep(CounterRng& rng);
    // sweep driven by an external uniform stream (grand couplings)
    void sweep_with(const std::vector<double>& uniforms);

    const BondConfig& config() const { return config_; }
    const std::vector<int>& scan() const { return scan_; }
    const FiniteGraph& graph() const { return *g_; }
    bool conditioned() const { return cond_.has_value(); }
    double open_fraction() const;
    int kappa() const; // cluster count under the chain's wiring

    // conditional probability that the edge is open given the rest; used by
    // the step itself and by detailed-balance checks
    double conditional_open(int edge, bool* forced_open = nullptr);

  private:
    struct BfsResult {
        bool connected;
        long long side_sum; // label sum of the exhausted side when split
    };
    BfsResult connected_off(int u, int v, int edge);

    const FiniteGraph* g_;
    double p_, q_;
    std::optional<SourceSpec> cond_; // labels per quotient class
    int qmod_ = 2;

    // quotient view induced by the boundary condition
    std::vector<int> qmap_;             // vertex -> class id
    std::vector<std::pair<int, int>> qedges_; // edge id -> class endpoints
    int qn_ = 0;
    std::vector<int> adj_off_;
    std::vector<FiniteGraph::Arc> adj_;
    std::vector<int> labels_; // per class, conditioning labels

    BondConfig config_;
    std::vector<int> scan_;

    // BFS scratch
    std::vector<long long> mark_;
    long long epoch_ = 0;
    std::vector<int> q0_, q1_;
};

// draw after burn-in; one configuration per call to next_sample()
struct FkSampler {
    FkSampler(const FiniteGraph& g, BoundaryCondition bc, double p, double q,
              std::optional<SourceSpec> conditioning, Schedule sched, CounterRng rng);
    BondConfig next_sample();
    FkChain chain;
    Schedule sched;
    CounterRng rng;
    bool warmed = false;
    int burnin_used = 0;
};

BondConfig sample_fk(const FiniteGraph& g, BoundaryCondition bc, double p, double q,
                     std::optional<SourceSpec> conditioning, Schedule sched,
                     CounterRng rng);

// loop / q-flow sampler: conditioned fk chain + uniform sourced flow
FlowConfig sample_loop(const FiniteGraph& g, double x, int q, const SourceSpec& a,
                       BoundaryCondition bc, Schedule sched, CounterRng rng);

// parity-restricted Poisson quantile tables, truncated below 1e-14 tail
struct ParityQuantiles {
    double beta;
    std::vector<double> even_cum; // P[X <= 2k | X even]
    std::vector<double> odd_cum;  // P[X <= 2k+1 | X odd]

    explicit ParityQuantiles(double beta);
    int f_even(double u) const; // smallest even n with cumulative >= u
    int f_odd(double u) const;
};

CurrentConfig sample_current(const FiniteGraph& g, double beta, const SourceSpec& a,
                             Schedule sched, CounterRng rng);

BondConfig sprinkle(const BondConfig& w, double rate, CounterRng& rng);

struct DiagnosticReport {
    bool coalesced = false;
    int coalesce_sweep = -1;
    int agree_sweep = -1;     // summary statistics within tolerance
    bool sandwich_ok = true;  // ordered at every sweep (monotone regime only)
    bool monotone_regime = true; // q >= 1 and unconditioned
    int budget = 0;
};

// Twin chains from all-open / all-closed (or all-open / a re-seeded feasible
// state under conditioning) sharing the edge and uniform sequence.
DiagnosticReport convergence_diagnostic(const FiniteGraph& g, BoundaryCondition bc,
                                        double p, double q,
                                        std::optional<SourceSpec> conditioning,
                                        int budget, double tol, CounterRng rng);

} // namespace fkrep
