#pragma once

#include <cstdint>
#include <stdexcept>

namespace fkrep {

struct Interval {
    double lo = 0, hi = 1;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval at nominal 95% (z = 1.959964)
Interval wilson_ci(long long successes, long long trials, double z = 1.959964);

struct BinomialEstimate {
    double estimate = 0;
    Interval ci;
    long long successes = 0;
    long long trials = 0;
};

BinomialEstimate binomial_estimate(long long successes, long long trials);

} // namespace fkrep
