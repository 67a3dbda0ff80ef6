#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "levy_euler/levy_driver.hpp"
#include "levy_euler/model.hpp"
#include "levy_euler/stable.hpp"

namespace levy_euler {

//---------------------------------------------------------------------------//
// Declared far-field behaviour of an integrand u, used to bound the part of
// the jump integral beyond the outer cutoff.

//! |u| ≤ sup everywhere.
struct BoundedGrowth
{
    double sup = 1.0;
};

//! |u| ≤ sup and u = 0 outside the ball B(center, radius).
struct CompactSupportGrowth
{
    double sup = 1.0;
    std::vector<double> center;
    double radius = 1.0;
};

//! |u(y)| ≤ sup · exp(-rate |y - center|).
struct DecayingGrowth
{
    double sup = 1.0;
    std::vector<double> center;
    double rate = 1.0;
};

//! u(y) = amplitude · cos(⟨wavevector, y⟩ + φ) for some phase φ.
struct PlaneWaveGrowth
{
    double amplitude = 1.0;
    std::vector<double> wavevector;
};

//! |u(y)| ≤ constant · (1 + |y|^power).
struct PolynomialGrowth
{
    double constant = 1.0;
    double power = 1.0;
};

using GrowthClass = std::variant<BoundedGrowth, CompactSupportGrowth,
                                 DecayingGrowth, PlaneWaveGrowth, PolynomialGrowth>;

//! A scalar function together with its declared growth class.
struct DeclaredFunction
{
    std::function<double(std::span<double const>)> u;
    GrowthClass growth = BoundedGrowth{};
};

//! Plane-wave helper: amplitude · cos(⟨ξ, y⟩ + phase), declared as such.
DeclaredFunction declared_plane_wave(std::vector<double> xi,
                                     double amplitude = 1.0, double phase = 0.0);

//---------------------------------------------------------------------------//
/*!
 * Discretization of the singular jump integrals.
 *
 * Radially: a Taylor term on [0, inner_cutoff], octave panels up to
 * inner_radius, panels of width ≤ max_panel_width up to the outer cutoff,
 * and the declared-growth tail bound beyond.  outer_cutoff = 0 selects the
 * cutoff automatically by doubling until the tail bound is below
 * tolerance/4.  tolerance is absolute.
 */
struct QuadratureSpec
{
    double inner_radius = 1.0;
    int radial_nodes = 16;
    int angular_nodes = 512;
    double outer_cutoff = 0.0;
    double tolerance = 1e-6;
    double inner_cutoff = 1e-6;
    double max_panel_width = 1.0;
    double max_outer_cutoff = 1e7;
    //! Step of the directional second differences; 0 selects eps^{1/4}·scale.
    double fd_step = 0.0;
    //! Also evaluate with halved node counts and report the difference.
    bool estimate_error = true;
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;         // rule difference + tail bound
    double tail_bound = 0.0;
    double outer_cutoff = 0.0;
};

/*!
 * ∂^α u(x) = ∫ [(u(x+y) + u(x-y))/2 - u(x)] |y|^{-d-α} dy, α ∈ (0, 2).
 *
 * Throws DomainError when the declared growth makes the tail divergent and
 * QuadratureError when the tail bound cannot be pushed below tolerance.
 */
QuadratureResult frac_laplacian(DeclaredFunction const& u,
                                std::span<double const> x, double alpha,
                                QuadratureSpec const& quad = {});

/*!
 * The same operator in compensated form
 * ∫ [u(x+y) - u(x) - 1_{α≥1} 1_{|y|≤1} ⟨∇u(x), y⟩] |y|^{-d-α} dy over the
 * full sphere of directions; cross-check for frac_laplacian.
 */
QuadratureResult frac_laplacian_compensated(DeclaredFunction const& u,
                                            std::span<double const> x,
                                            double alpha,
                                            QuadratureSpec const& quad = {});

/*!
 * Principal part A_z u(x).
 *
 * α < 2: symmetrized jump integral with density
 * m(z, y) = |det b(z)|^{-1} |b(z)^{-1} y/|y||^{-d-α}; at α = 1 the drift
 * term ⟨a(z), ∇u(x)⟩ is added.  α = 2: k Σ D^{ij}(z) ∂²_{ij} u(x) with
 * D = b bᵀ and k = 1/2 under the standard Wiener normalization, k = 1 under
 * the exponent-limit one, by central differences.
 * Throws DegeneracyError when b(z) is singular.
 */
QuadratureResult apply_A(std::span<double const> z, CoefficientField const& field,
                         DeclaredFunction const& u, std::span<double const> x,
                         double alpha, QuadratureSpec const& quad = {},
                         WienerNormalization wiener = WienerNormalization::exponent_limit);

/*!
 * Subordinated part B_z u(x) = 1_{α∈(1,2]} ⟨a(z), ∇u(x)⟩
 * + ∫ [u(x + G(z)y) - u(x) - 1_{α∈(1,2]} 1_{|y|≤1} ⟨∇u(x), G(z)y⟩] π(dy).
 * Atoms are summed exactly; other laws use jump_expectation.
 */
double apply_B(std::span<double const> z, CoefficientField const& field,
               LevyMeasureSpec const& zspec, DeclaredFunction const& u,
               std::span<double const> x, double alpha);

//! Central-difference gradient, step eps^{1/3}·max(1, |x_i|).
std::vector<double> fd_gradient(std::function<double(std::span<double const>)> const& u,
                                std::span<double const> x);

//---------------------------------------------------------------------------//
//! Kernel w(x) = C_d exp(-1/(1 - |x|²)) on the unit ball, ∫ w = 1.
double mollifier_kernel(std::span<double const> x);
double mollifier_normalization(int d);

struct MollifierSpec
{
    double epsilon = 0.1;
    //! d = 1 adaptive tolerance; d ≥ 2 uses a fixed polar product rule.
    double tolerance = 1e-10;
    int radial_nodes = 32;
    int angular_nodes = 64;
};

//! f^ε(x) = ∫ f(x - y) w^ε(y) dy, w^ε(y) = ε^{-d} w(y/ε).
double mollify(std::function<double(std::span<double const>)> const& f,
               MollifierSpec const& spec, std::span<double const> x);

struct MollifierProbe
{
    std::vector<double> epsilons;
    std::vector<double> sup_error;         // sup |f^ε - f|
    std::vector<double> sup_frac_laplacian;  // sup |∂^α f^ε|
    double slope_sup_error = 0.0;
    double slope_frac_laplacian = 0.0;
    bool log_branch = false;                 // β = α
    double power_residual = 0.0;             // for sup |∂^α f^ε|
    double log_residual = 0.0;               // fit to c (1 - ln ε)
};

/*!
 * Sweeps ε, taking sups over the probe grid center + ε·{-2, -1.5, …, 2}
 * (the scale where f^ε departs from f), and fits log-log slopes.  When the
 * declared β of f equals α the log model c(1 - ln ε) is fitted as well.
 * Needs at least three ε values.  growth is the declared growth class of f;
 * compact supports are widened by ε.
 */
MollifierProbe mollifier_scaling_probe(TestFunction const& f,
                                       GrowthClass const& growth, double alpha,
                                       std::vector<double> const& epsilons,
                                       std::vector<double> const& center,
                                       QuadratureSpec quad = {});

}  // namespace levy_euler
