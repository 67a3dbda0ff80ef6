#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levy_euler/errors.hpp"
#include "levy_euler/generator.hpp"
#include "levy_euler/quadrature.hpp"

using namespace levy_euler;

namespace {
constexpr double kPi = std::numbers::pi;

DeclaredFunction gaussian_bump(std::vector<double> center)
{
    DeclaredFunction u;
    u.u = [center](std::span<double const> x) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            r2 += (x[i] - center[i]) * (x[i] - center[i]);
        }
        return std::exp(-0.5 * r2);
    };
    // e^{-r²/2} ≤ e^{1/2} e^{-r}
    u.growth = DecayingGrowth{std::exp(0.5), center, 1.0};
    return u;
}

DeclaredFunction square_bump()
{
    DeclaredFunction u;
    u.u = [](std::span<double const> x) { return std::exp(-x[0] * x[0]) * (1.0 + 0.5 * x[0]); };
    u.growth = DecayingGrowth{2.0, {0.0}, 0.5};
    return u;
}
}  // namespace

TEST_CASE("fractional Laplacian of constants and cosines")
{
    DeclaredFunction c;
    c.u = [](std::span<double const>) { return 3.0; };
    c.growth = BoundedGrowth{3.0};
    std::vector<double> const x0{0.4};
    CHECK(std::abs(frac_laplacian(c, x0, 1.2).value) <= 1e-6);

    auto const cosine = declared_plane_wave({1.0});
    std::vector<double> const zero{0.0};
    CHECK(frac_laplacian(cosine, zero, 1.0).value == doctest::Approx(-kPi).epsilon(1e-3));
}

TEST_CASE("polynomial growth beyond alpha is rejected")
{
    DeclaredFunction sq;
    sq.u = [](std::span<double const> x) { return x[0] * x[0]; };
    sq.growth = PolynomialGrowth{1.0, 2.0};
    std::vector<double> const x0{0.0};
    CHECK_THROWS_AS(frac_laplacian(sq, x0, 1.5), DomainError);
}

TEST_CASE("plane-wave identity")
{
    for (int d : {1, 2})
    {
        for (double alpha : {0.5, 1.0, 1.5})
        {
            std::vector<double> xi(d, 0.0);
            xi[0] = 1.3;
            if (d == 2)
            {
                xi[1] = -0.6;
            }
            double norm = 0.0;
            for (double v : xi)
            {
                norm += v * v;
            }
            norm = std::sqrt(norm);
            auto const u = declared_plane_wave(xi, 1.0, 0.3);
            std::vector<double> x(d, 0.2);
            double const expected = -char_exponent_constant(d, alpha).value
                                    * std::pow(norm, alpha) * u.u(x);
            QuadratureSpec q;
            q.tolerance = 1e-5 * std::abs(expected);
            auto const r = frac_laplacian(u, x, alpha, q);
            CHECK(r.value == doctest::Approx(expected).epsilon(1e-3));
        }
    }
}

TEST_CASE("symmetrized and compensated forms agree")
{
    for (double alpha : {0.6, 1.0, 1.5})
    {
        auto const u = square_bump();
        std::vector<double> const x0{0.3};
        double const a = frac_laplacian(u, x0, alpha).value;
        double const b = frac_laplacian_compensated(u, x0, alpha).value;
        CHECK(b == doctest::Approx(a).epsilon(1e-4));
    }
}

TEST_CASE("principal part A_z")
{
    auto const u = gaussian_bump({0.0, 0.0});
    std::vector<double> const x{0.3, -0.2};
    std::vector<double> const z{0.0, 0.0};
    for (double alpha : {0.7, 1.5})
    {
        auto const id = constant_field(2, 1, {0, 0}, {1, 0, 0, 1}, {0, 0});
        auto const two = constant_field(2, 1, {0, 0}, {2, 0, 0, 2}, {0, 0});
        double const f = frac_laplacian(u, x, alpha).value;
        CHECK(apply_A(z, id, u, x, alpha).value == doctest::Approx(f).epsilon(1e-6));
        CHECK(apply_A(z, two, u, x, alpha).value
              == doctest::Approx(std::pow(2.0, alpha) * f).epsilon(1e-6));
    }

    DeclaredFunction sq;
    sq.u = [](std::span<double const> y) { return y[0] * y[0] + y[1] * y[1]; };
    sq.growth = PolynomialGrowth{1.0, 2.0};
    auto const id = constant_field(2, 1, {0, 0}, {1, 0, 0, 1}, {0, 0});
    CHECK(apply_A(z, id, sq, x, 2.0, {}, WienerNormalization::standard).value
          == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(apply_A(z, id, sq, x, 2.0, {}, WienerNormalization::exponent_limit).value
          == doctest::Approx(4.0).epsilon(1e-6));

    auto const singular = constant_field(2, 1, {0, 0}, {1, 1, 1, 1}, {0, 0});
    CHECK_THROWS_AS(apply_A(z, singular, u, x, 1.5), DegeneracyError);
}

TEST_CASE("subordinated part B_z with atoms")
{
    auto const u = declared_plane_wave({1.0});
    std::vector<double> const x{0.4};
    std::vector<double> const z{0.0};
    LevyMeasureSpec spec;
    spec.rate = 2.0;
    spec.jump = AtomJumps{{{0.5}}, {1.0}};

    spec.driver_alpha = 0.5;
    auto const f0 = constant_field(1, 1, {0.0}, {1.0}, {1.0});
    CHECK(apply_B(z, f0, spec, u, x, 0.5)
          == doctest::Approx(2.0 * (std::cos(0.9) - std::cos(0.4))).epsilon(1e-12));

    spec.driver_alpha = 1.5;
    auto const f1 = constant_field(1, 1, {0.3}, {1.0}, {2.0});
    double const expected = 0.3 * -std::sin(0.4)
                            + 2.0 * (std::cos(1.4) - std::cos(0.4) + std::sin(0.4) * 1.0);
    CHECK(apply_B(z, f1, spec, u, x, 1.5) == doctest::Approx(expected).epsilon(1e-7));

    spec.rate = 0.0;
    auto const f2 = constant_field(1, 1, {0.0}, {1.0}, {1.0});
    CHECK(std::abs(apply_B(z, f2, spec, u, x, 1.5)) <= 1e-12);
}

TEST_CASE("mollifier")
{
    int const d = 1;
    std::vector<double> const zero{0.0};
    CHECK(mollifier_kernel(zero) == doctest::Approx(mollifier_normalization(d) * std::exp(-1.0)));
    std::vector<double> const out{1.0};
    CHECK(mollifier_kernel(out) == 0.0);

    MollifierSpec const spec{0.2};
    std::vector<double> const x{0.7};
    auto const c = [](std::span<double const>) { return 2.5; };
    auto const lin = [](std::span<double const> y) { return 3.0 * y[0] - 1.0; };
    auto const wave = [](std::span<double const> y) { return std::sin(5.0 * y[0]); };
    CHECK(mollify(c, spec, x) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(mollify(lin, spec, x) == doctest::Approx(1.1).epsilon(1e-10));
    auto const combo = [&](std::span<double const> y) { return 2.0 * wave(y) - lin(y); };
    CHECK(mollify(combo, spec, x)
          == doctest::Approx(2.0 * mollify(wave, spec, x) - mollify(lin, spec, x)).epsilon(1e-10));
    auto const above = [&](std::span<double const> y) { return wave(y) + 0.01; };
    CHECK(mollify(above, spec, x) >= mollify(wave, spec, x));

    MollifierSpec const spec2{0.2};
    std::vector<double> const x2{0.7, -0.1};
    auto const c2 = [](std::span<double const>) { return 1.0; };
    auto const lin2 = [](std::span<double const> y) { return y[0] + 2.0 * y[1]; };
    CHECK(mollify(c2, spec2, x2) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mollify(lin2, spec2, x2) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("mollifier scaling probe")
{
    std::vector<double> const eps{0.2, 0.1, 0.05, 0.025};
    std::vector<double> const center{0.0};

    SUBCASE("beta = 0.5, alpha = 1.5")
    {
        auto const f = radial_power({0.0}, 0.5);
        auto const p = mollifier_scaling_probe(f, CompactSupportGrowth{1.0, {0.0}, 2.0}, 1.5,
                                               eps, center);
        CHECK(std::abs(p.slope_sup_error - 0.5) <= 0.1);
        CHECK(std::abs(p.slope_frac_laplacian + 1.0) <= 0.15);
        CHECK_FALSE(p.log_branch);
    }
    SUBCASE("smooth f: no blow-up")
    {
        auto const f = gaussian_mixture(1, {1.0}, {0.0}, {1.0});
        auto const p = mollifier_scaling_probe(f, BoundedGrowth{1.0}, 1.5, eps, center);
        CHECK(p.slope_frac_laplacian >= -0.05);
    }
    SUBCASE("beta = alpha = 1: logarithmic growth")
    {
        auto const f = radial_power({0.0}, 1.0);
        auto const p = mollifier_scaling_probe(f, CompactSupportGrowth{1.0, {0.0}, 2.0}, 1.0,
                                               eps, center);
        CHECK(p.log_branch);
        CHECK(p.log_residual < p.power_residual);
    }
    auto const f = radial_power({0.0}, 0.5);
    CHECK_THROWS_AS(mollifier_scaling_probe(f, BoundedGrowth{}, 1.5, {0.1, 0.05}, center),
                    DomainError);
}

TEST_CASE("sphere rules")
{
    for (int d : {1, 2, 3})
    {
        auto const full = sphere_rule(d, 16);
        double area = 0.0;
        std::vector<double> mean(d, 0.0);
        for (std::size_t i = 0; i < full.size(); ++i)
        {
            area += full.weights[i];
            auto const t = full.direction(i);
            double n2 = 0.0;
            for (int k = 0; k < d; ++k)
            {
                mean[k] += full.weights[i] * t[k];
                n2 += t[k] * t[k];
            }
            CHECK(n2 == doctest::Approx(1.0).epsilon(1e-14));
        }
        CHECK(area == doctest::Approx(unit_sphere_area(d)).epsilon(1e-12));
        for (double m : mean)
        {
            CHECK(std::abs(m) <= 1e-12);
        }
        double harea = 0.0;
        for (double w : hemisphere_rule(d, 16).weights)
        {
            harea += w;
        }
        CHECK(harea == doctest::Approx(unit_sphere_area(d)).epsilon(1e-12));
    }
}

TEST_CASE("gradient by central differences")
{
    auto const f = [](std::span<double const> x) { return std::sin(x[0]) * x[1]; };
    std::vector<double> const x{0.3, 2.0};
    auto const g = fd_gradient(f, x);
    CHECK(g[0] == doctest::Approx(std::cos(0.3) * 2.0).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(std::sin(0.3)).epsilon(1e-8));
}
