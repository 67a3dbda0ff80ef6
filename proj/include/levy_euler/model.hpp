#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace levy_euler {

inline constexpr double kSmooth = std::numeric_limits<double>::infinity();

//---------------------------------------------------------------------------//
/*!
 * Coefficients a: R^d → R^d, b: R^d → R^{d×d}, G: R^d → R^{d×m}.
 *
 * A single callback fills all three (row-major matrices) so that a shared
 * scalar profile is evaluated once per call.  Regularities are declared, and
 * kSmooth marks a C^∞ map.
 */
struct CoefficientField
{
    using Evaluator = std::function<void(std::span<double const> x,
                                         std::span<double> a,
                                         std::span<double> b,
                                         std::span<double> g)>;

    int dim = 1;
    int noise_dim = 1;
    Evaluator eval;

    double beta_a = kSmooth;
    double beta_b = kSmooth;
    double beta_g = kSmooth;
    double bound_a = 0.0;
    double bound_b = 0.0;
    double bound_g = 0.0;
    double c1 = 0.0;          // declared lower bound of |det b|
    bool drift_zero = false;  // a ≡ 0

    std::vector<double> a(std::span<double const> x) const;
    std::vector<double> b(std::span<double const> x) const;
    std::vector<double> g(std::span<double const> x) const;

    //! Field with every coefficient frozen at its value at x0.
    CoefficientField frozen_at(std::span<double const> x0) const;
};

//! Constant field from explicit row-major values.
CoefficientField constant_field(int dim, int noise_dim, std::vector<double> a,
                                std::vector<double> b, std::vector<double> g);

//---------------------------------------------------------------------------//
//! Scalar profile s(x) shared by the perturbed components of a builtin field.
struct ScalarProfile
{
    enum class Kind
    {
        zero,
        sine,         // sin(omega ⟨k, x⟩ + phase)
        tanh,         // tanh(⟨k, x⟩ + shift)
        weierstrass,  // Σ_{j<terms} base^{-jβ} cos(base^j ⟨k, x⟩ + phase)
    };

    Kind kind = Kind::zero;
    std::vector<double> wavevector;
    double omega = 1.0;
    double phase = 0.0;
    double shift = 0.0;
    double beta = 1.0;
    double base = 2.0;
    int terms = 12;

    double operator()(std::span<double const> x) const;
    //! sup |s|.
    double sup() const;
    //! Hölder regularity (kSmooth unless weierstrass).
    double regularity() const;
};

//! Sum Σ_{j<terms} base^{-jβ} cos(base^j t + phase).
double weierstrass_sum(double t, double base, double beta, int terms,
                       double phase);

/*!
 * Parameters of the builtin catalog.
 *
 * Each coefficient is base + amplitude · s(x).  Setting perturb_* false keeps
 * that coefficient at its base value (e.g. a constant G next to a perturbed
 * b).  Empty base vectors default to zero (a, G) or the identity (b).
 */
struct FieldParams
{
    int dim = 1;
    int noise_dim = 1;
    std::vector<double> a_base, b_base, g_base;
    std::vector<double> a_amplitude, b_amplitude, g_amplitude;
    bool perturb_a = true;
    bool perturb_b = true;
    bool perturb_g = true;
    ScalarProfile profile;
    //! Declared nondegeneracy witness; 0 means "use the certified bound".
    double c1 = 0.0;
};

/*!
 * Catalog: "constant", "sinusoidal", "affine-bounded" (tanh clamp),
 * "hoelder-perturbed" (Weierstrass profile of exponent profile.beta).
 *
 * The name selects the profile kind; other profile fields come from params.
 * Since det b(x) is a polynomial of degree d in the scalar s(x), the witness
 * c1 is certified by scanning s over [-sup s, sup s]; a sign change or a
 * declared c1 above the certified bound throws DomainError.
 */
CoefficientField builtin_field(std::string const& name, FieldParams params);

//---------------------------------------------------------------------------//
/*!
 * Scalar test function g or f.
 *
 * offset is an additive constant kept separate from the core so that weak
 * error estimates can drop it exactly.
 */
struct TestFunction
{
    std::string family;
    double declared_beta = kSmooth;
    double offset = 0.0;
    double sup_bound = 0.0;
    std::function<double(std::span<double const>)> core;

    double operator()(std::span<double const> x) const { return core(x) + offset; }
};

//! Σ w_i exp(-|x - c_i|² / (2 s_i²)); centers row-major.
TestFunction gaussian_mixture(int dim, std::vector<double> weights,
                              std::vector<double> centers,
                              std::vector<double> widths);
//! |x - c|^power · χ(|x - c|), χ = 1 on [0, r1], 0 beyond r2, C^∞ between.
TestFunction radial_power(std::vector<double> center, double power,
                          double r1 = 1.0, double r2 = 2.0);
//! Σ_{j<terms} base^{-jβ} cos(base^j ⟨k, x⟩ + phase).
TestFunction weierstrass_function(std::vector<double> wavevector, double base,
                                  double beta, int terms = 12,
                                  double phase = 0.0);
//! amplitude · cos(⟨ξ, x⟩ + phase).
TestFunction plane_wave(std::vector<double> wavevector, double amplitude = 1.0,
                        double phase = 0.0);
TestFunction constant_function(double value);

//! C^∞ cutoff: 1 for r ≤ r1, 0 for r ≥ r2.
double smooth_cutoff(double r, double r1, double r2);

//---------------------------------------------------------------------------//
struct Box
{
    std::vector<double> lower;
    std::vector<double> upper;
    int dim() const { return static_cast<int>(lower.size()); }
};

/*!
 * Per-level maxima of the Hölder (β < 1) or Zygmund (β = 1) difference
 * quotient over dyadic grids of the box: level j uses step
 * h = 2^{-j}(upper_i - lower_i) along each axis i, j = 1..levels.
 */
std::vector<double> holder_quotients_by_level(
    std::function<double(std::span<double const>)> const& f, double beta,
    Box const& domain, int levels);

//! Maximum of holder_quotients_by_level; nondecreasing in levels.
double holder_seminorm_estimate(
    std::function<double(std::span<double const>)> const& f, double beta,
    Box const& domain, int levels);

/*!
 * min |det b(x)| over a tensor grid with grid_points per axis (endpoints
 * included).  Throws DegeneracyError naming the worst point when the minimum
 * is zero or below field.c1.
 */
double nondegeneracy_check(CoefficientField const& field, Box const& domain,
                           int grid_points);

//! |det| of a row-major n x n matrix.
double abs_determinant(std::span<double const> m, int n);

}  // namespace levy_euler
