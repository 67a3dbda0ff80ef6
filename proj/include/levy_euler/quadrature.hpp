#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levy_euler {

//! Gauss-Legendre rule on [-1, 1].
struct GaussRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

//! Cached n-point Gauss-Legendre rule (Newton iteration on P_n).
GaussRule const& gauss_legendre(int n);

struct Integral
{
    double value = 0.0;
    double error = 0.0;
};

/*!
 * Globally adaptive Gauss-Kronrod integration with extrapolation of f over
 * [a, b], b may be +infinity.  Throws QuadratureError when the error
 * estimate exceeds max(abs_tol, rel_tol * |value|).
 */
Integral integrate_adaptive(std::function<double(double)> const& f, double a,
                            double b, double abs_tol, double rel_tol = 0.0,
                            std::size_t max_intervals = 1000);

//! Composite Gauss-Legendre over `panels` equal panels of [a, b].
double integrate_composite(std::function<double(double)> const& f, double a,
                           double b, int panels, int order);

//! Surface area |S^{d-1}| of the unit sphere in R^d.
double unit_sphere_area(int d);

/*!
 * Direction rule on S^{d-1}, d in {1, 2, 3}.
 *
 * The hemisphere variant covers one representative of each pair {θ, -θ} and
 * doubles its weights, so it integrates even integrands exactly as the full
 * rule does at half the cost.  Weights sum to |S^{d-1}|.
 */
struct SphereRule
{
    int dim = 0;
    std::vector<double> directions;  // row-major, size = count * dim
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    std::span<double const> direction(std::size_t i) const
    {
        return {directions.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

//! d = 1: {+1}; d = 2: midpoint trapezoid on [0, π); d = 3: Gauss-Legendre
//! in the polar cosine on [0, 1] times trapezoid in azimuth.
SphereRule hemisphere_rule(int d, int nodes);

//! Full-sphere counterpart of hemisphere_rule.
SphereRule sphere_rule(int d, int nodes);

}  // namespace levy_euler
