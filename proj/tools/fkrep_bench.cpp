// Benchmark of the OpenMP kernels against their serial reference:
//   - exact enumeration of an FK table on an 18-edge graph
//   - a replica batch of conditioned heat-bath chains
// Output also asserts that parallel and serial results agree exactly.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fkrep/experiments.hpp"
#include "fkrep/oracle.hpp"

using namespace fkrep;

namespace {

double ms(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

} // namespace

int main()
{
    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
#pragma omp single
    threads = omp_get_num_threads();
#endif
    std::printf("threads: %d\n", threads);

    {
        FiniteGraph g = make_grid_2xk(7); // 19 edges
        MeasureSpec spec = MeasureSpec::fk(g, 0.6, 2.0);
        auto t0 = std::chrono::steady_clock::now();
        ExactDistribution ser = enumerate_measure_serial(spec);
        double t_ser = ms(t0);
        t0 = std::chrono::steady_clock::now();
        ExactDistribution par = enumerate_measure(spec);
        double t_par = ms(t0);
        bool same = ser.prob == par.prob;
        std::printf("enumerate fk 2x7 grid (2^19 states): serial %.1f ms, omp %.1f ms, "
                    "speedup %.2fx, identical: %s\n",
                    t_ser, t_par, t_ser / t_par, same ? "yes" : "NO");
        if (!same)
            return 1;
    }

    {
        const int d = 2, N = 16;
        const double p = 0.8;
        ReplicaPlan plan;
        plan.replicas = 64;
        plan.samples_per_chain = 8;
        plan.sched = {100, 10};
        auto t0 = std::chrono::steady_clock::now();
        ExperimentResult r = uc_given_sources(d, p, N, SourcePattern::Alternating,
                                              plan, 12345);
        double t_par = ms(t0);
#ifdef _OPENMP
        omp_set_num_threads(1);
#endif
        t0 = std::chrono::steady_clock::now();
        ExperimentResult r1 = uc_given_sources(d, p, N, SourcePattern::Alternating,
                                               plan, 12345);
        double t_ser = ms(t0);
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
        bool same = r.estimate == r1.estimate;
        std::printf("replica batch (64 conditioned chains, box 33x33): serial %.1f ms, "
                    "omp %.1f ms, speedup %.2fx, estimates identical: %s\n",
                    t_ser, t_par, t_ser / t_par, same ? "yes" : "NO");
        if (!same)
            return 1;
    }
    return 0;
}
