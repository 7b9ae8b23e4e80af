#pragma once

#include <string>
#include <vector>

#include "fkrep/oracle.hpp"

namespace fkrep {

struct IdentityCheck {
    std::string name;
    bool pass = false;
    double worst = 0; // largest deviation seen
};

// the small-graph family used by every exact suite: paths, cycles, 2xk
// grids and K4, filtered by edge count
std::vector<std::pair<std::string, FiniteGraph>> oracle_family(int max_edges);

// all source labelings with zero sum; q=2 lists all even vertex subsets
std::vector<SourceSpec> all_valid_sources(const FiniteGraph& g, int q);

// fk(p,2 given source feasibility) against loop(x,A) union bernoulli(x),
// p = 2x/(1+x)
std::vector<IdentityCheck> coupling_identity_suite(int max_edges,
                                                   const std::vector<double>& xs,
                                                   double tol);

// odd part of the current against loop(x,A); trace against
// loop(x,A) union bernoulli(1-sqrt(1-x^2)); beta = artanh x
std::vector<IdentityCheck> current_identity_suite(int max_edges,
                                                  const std::vector<double>& xs,
                                                  double tol);

// fk(p,q given source feasibility) against trace(qflow(x,q,A)) union bernoulli(x),
// x = p/(p + q(1-p))
std::vector<IdentityCheck> qflow_identity_suite(int max_edges,
                                                const std::vector<double>& xs,
                                                const std::vector<int>& qs, double tol);

// wired measure equals the free measure on the wired quotient, and the loop
// model on the quotient is the even-subgraph average of the wired measure
std::vector<IdentityCheck> wired_identity_suite(const std::vector<double>& xs,
                                                double tol);

// the per-cluster zero-sum criterion agrees with the existential definition
// of source feasibility, by exhaustive flow enumeration
std::vector<IdentityCheck> sources_equivalence_suite(int max_edges,
                                                     const std::vector<int>& qs);

} // namespace fkrep
