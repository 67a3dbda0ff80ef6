#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "levy_euler/random.hpp"

namespace levy_euler::testing {

struct SampleStats
{
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;  // of the mean
};

inline SampleStats sample_stats(std::vector<double> const& v)
{
    SampleStats s;
    double const n = static_cast<double>(v.size());
    for (double x : v)
    {
        s.mean += x;
    }
    s.mean /= n;
    for (double x : v)
    {
        s.variance += (x - s.mean) * (x - s.mean);
    }
    s.variance /= n - 1.0;
    s.std_error = std::sqrt(s.variance / n);
    return s;
}

//! Asymptotic p-value of the two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double const na = static_cast<double>(a.size());
    double const nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    while (i < a.size() && j < b.size())
    {
        double const x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
        {
            ++i;
        }
        while (j < b.size() && b[j] <= x)
        {
            ++j;
        }
        dmax = std::max(dmax, std::abs(i / na - j / nb));
    }
    double const ne = na * nb / (na + nb);
    double const lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * dmax;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
    {
        double const term = std::exp(-2.0 * k * k * lambda * lambda);
        p += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-12)
        {
            break;
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

//! n draws of a scalar from streams (key, 0..n-1).
inline std::vector<double> draw(std::uint64_t key, std::size_t n,
                                std::function<double(RandomStream&)> const& f)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        RandomStream rng(key, i);
        out[i] = f(rng);
    }
    return out;
}

}  // namespace levy_euler::testing
