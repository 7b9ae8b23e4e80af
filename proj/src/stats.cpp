#include "fkrep/stats.hpp"

#include <cmath>

namespace fkrep {

Interval wilson_ci(long long successes, long long trials, double z)
{
    if (trials <= 0 || successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_ci: bad counts");
    double n = double(trials), ph = double(successes) / n, z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (ph + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

BinomialEstimate binomial_estimate(long long successes, long long trials)
{
    BinomialEstimate e;
    e.successes = successes;
    e.trials = trials;
    e.estimate = trials > 0 ? double(successes) / double(trials) : 0.0;
    e.ci = wilson_ci(successes, trials);
    return e;
}

} // namespace fkrep
