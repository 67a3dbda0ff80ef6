#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levy_euler/errors.hpp"
#include "levy_euler/stable.hpp"
#include "support.hpp"

using namespace levy_euler;
using levy_euler::testing::draw;
using levy_euler::testing::ks_two_sample_pvalue;
using levy_euler::testing::sample_stats;

namespace {
constexpr std::size_t kN = 100000;

std::vector<double> increments(StableDriverSpec const& spec, double dt, std::uint64_t key,
                               std::vector<double> const& direction)
{
    StableIncrementSampler const s(spec);
    std::vector<double> out(spec.dim);
    return draw(key, kN, [&](RandomStream& rng) {
        s.sample(dt, rng, out);
        double p = 0.0;
        for (int i = 0; i < spec.dim; ++i)
        {
            p += direction[i] * out[i];
        }
        return p;
    });
}
}  // namespace

TEST_CASE("c_{d,alpha} against the closed form")
{
    CHECK(char_exponent_constant(1, 1.0).value == doctest::Approx(std::numbers::pi).epsilon(1e-9));
    for (int d : {1, 2, 3})
    {
        for (double a : {0.3, 0.5, 1.0, 1.5, 1.9})
        {
            auto const c = char_exponent_constant(d, a);
            CHECK(c.value > 0.0);
            CHECK(c.quad_error <= 1e-10 * c.value);
            CHECK(c.value == doctest::Approx(char_exponent_constant_closed_form(d, a)).epsilon(1e-8));
        }
    }
}

TEST_CASE("c_{1,alpha} approaches the Gaussian branch as alpha -> 2")
{
    // (2 - α) c_{1,α} → 1, the exponent of N(0, 2t) per unit |ξ|²
    double prev = 0.0;
    for (double a : {1.9, 1.99, 1.999})
    {
        double const scaled = (2.0 - a) * char_exponent_constant(1, a).value;
        CHECK(std::abs(scaled - 1.0) < std::abs(prev - 1.0) + (prev == 0.0 ? 1.0 : 0.0));
        prev = scaled;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("c_{2,0.5} is stable under a tighter tolerance")
{
    auto const c = char_exponent_constant(2, 0.5, 1e-10);
    auto const tight = char_exponent_constant(2, 0.5, 1e-12);
    CHECK(std::isfinite(c.value));
    CHECK(c.value > 0.0);
    CHECK(std::abs(c.value - tight.value) <= 1e-10 * c.value);
}

TEST_CASE("char_exponent_constant rejects alpha outside (0, 2)")
{
    CHECK_THROWS_AS(char_exponent_constant(1, 2.0), DomainError);
    CHECK_THROWS_AS(char_exponent_constant(1, 0.0), DomainError);
}

TEST_CASE("1-D stable variates")
{
    SUBCASE("alpha = 2 has variance 2")
    {
        auto const v = draw(1, kN, [](RandomStream& r) { return sample_stable_1d(2.0, 0.0, r); });
        auto const s = sample_stats(v);
        CHECK(std::abs(s.mean) < 4 * s.std_error);
        // var of the sample variance for a Gaussian: 2σ⁴/(n-1)
        CHECK(std::abs(s.variance - 2.0) < 4 * std::sqrt(2.0 * 4.0 / kN));
    }
    SUBCASE("alpha = 1 quartiles are -1 and +1")
    {
        auto v = draw(2, kN, [](RandomStream& r) { return sample_stable_1d(1.0, 0.0, r); });
        std::sort(v.begin(), v.end());
        // asymptotic quantile standard error sqrt(p(1-p)/n)/f(q), f(±1) = 1/(2π)
        double const se = std::sqrt(0.1875 / kN) * 2.0 * std::numbers::pi;
        CHECK(std::abs(v[kN / 4] + 1.0) < 4 * se);
        CHECK(std::abs(v[3 * kN / 4] - 1.0) < 4 * se);
    }
    SUBCASE("alpha = 0.5, skew = 1 is the Levy distribution")
    {
        auto const v = draw(3, kN, [](RandomStream& r) { return sample_stable_1d(0.5, 1.0, r); });
        for (double x : v)
        {
            REQUIRE(x > 0.0);
        }
        for (double x : {0.5, 1.0, 2.0, 5.0})
        {
            double const F = std::erfc(std::sqrt(1.0 / (2.0 * x)));
            double const emp = static_cast<double>(std::count_if(
                                   v.begin(), v.end(), [x](double y) { return y <= x; }))
                               / kN;
            CHECK(std::abs(emp - F) < 4 * std::sqrt(F * (1 - F) / kN));
        }
    }
    RandomStream rng(0, 0);
    CHECK_THROWS_AS(sample_stable_1d(2.5, 0.0, rng), DomainError);
    CHECK_THROWS_AS(sample_stable_1d(2.0, 0.5, rng), DomainError);
    CHECK_THROWS_AS(sample_stable_1d(0.0, 0.0, rng), DomainError);
}

TEST_CASE("positive stable variates: positivity and Laplace transform")
{
    for (double a : {0.25, 0.5, 0.75, 0.95})
    {
        auto const v = draw(4, 20000, [a](RandomStream& r) { return sample_positive_stable(a, r); });
        for (double x : v)
        {
            REQUIRE(x > 0.0);
        }
        for (double s : {0.5, 1.0, 2.0})
        {
            std::vector<double> e;
            for (double x : v)
            {
                e.push_back(std::exp(-s * x));
            }
            auto const st = sample_stats(e);
            CHECK(std::abs(st.mean - std::exp(-std::pow(s, a))) < 4 * st.std_error + 1e-12);
        }
    }
}

TEST_CASE("isotropic increments, Gaussian branch")
{
    StableDriverSpec spec{2.0, 2};
    StableIncrementSampler const s(spec);
    std::vector<double> x0(kN), x1(kN), cross(kN);
    std::vector<double> out(2);
    for (std::size_t i = 0; i < kN; ++i)
    {
        RandomStream rng(5, i);
        s.sample(0.25, rng, out);
        x0[i] = out[0];
        x1[i] = out[1];
        cross[i] = out[0] * out[1];
    }
    auto const s0 = sample_stats(x0);
    auto const s1 = sample_stats(x1);
    auto const sc = sample_stats(cross);
    double const var_se = 0.5 * std::sqrt(2.0 / kN);
    CHECK(std::abs(s0.variance - 0.5) < 4 * var_se);
    CHECK(std::abs(s1.variance - 0.5) < 4 * var_se);
    CHECK(std::abs(sc.mean) < 4 * sc.std_error);
    CHECK(std::abs(s0.mean) < 4 * s0.std_error);

    spec.wiener = WienerNormalization::standard;
    CHECK(StableIncrementSampler(spec).exponent_constant() == 0.5);
    auto const v = increments(spec, 0.25, 6, {1.0, 0.0});
    CHECK(std::abs(sample_stats(v).variance - 0.25) < 4 * 0.25 * std::sqrt(2.0 / kN));
}

TEST_CASE("isotropic increments, alpha = 1.5, d = 2: characteristic function")
{
    StableDriverSpec const spec{1.5, 2};
    double const expected = std::exp(-char_exponent_constant(2, 1.5).value);
    for (double angle : {0.0, 0.7, 1.9, 3.0})
    {
        std::vector<double> const dir{std::cos(angle), std::sin(angle)};
        auto const proj = increments(spec, 1.0, 7, dir);
        std::vector<double> c;
        for (double p : proj)
        {
            c.push_back(std::cos(p));
        }
        auto const st = sample_stats(c);
        CHECK(std::abs(st.mean - expected) < 3 * st.std_error);
    }
}

TEST_CASE("isotropy: rotated samples have the same projections")
{
    StableDriverSpec const spec{1.5, 2};
    double const t = 0.9;
    auto const a = increments(spec, 1.0, 8, {1.0, 0.0});
    auto const b = increments(spec, 1.0, 9, {std::cos(t), std::sin(t)});
    CHECK(ks_two_sample_pvalue(a, b) > 0.01);
}

TEST_CASE("self-similarity: U_{c dt} ~ c^{1/alpha} U_{dt}")
{
    for (double alpha : {0.7, 1.5})
    {
        StableDriverSpec const spec{alpha, 1};
        double const c = 3.0;
        auto const big = increments(spec, c * 0.2, 10, {1.0});
        auto small = increments(spec, 0.2, 11, {1.0});
        for (double& x : small)
        {
            x *= std::pow(c, 1.0 / alpha);
        }
        CHECK(ks_two_sample_pvalue(big, small) > 0.01);
    }
}

TEST_CASE("component means vanish")
{
    StableDriverSpec const spec{1.5, 3};
    for (int k = 0; k < 3; ++k)
    {
        std::vector<double> dir(3, 0.0);
        dir[k] = 1.0;
        // α > 1: finite mean; the CLT rate is slow, so compare through a bounded transform
        auto const v = increments(spec, 1.0, 12 + k, dir);
        std::vector<double> s;
        for (double x : v)
        {
            s.push_back(std::atan(x));
        }
        auto const st = sample_stats(s);
        CHECK(std::abs(st.mean) < 4 * st.std_error);
    }
}

TEST_CASE("sample_isotropic_increment rejects dt <= 0")
{
    RandomStream rng(0, 0);
    std::vector<double> out(1);
    CHECK_THROWS_AS(sample_isotropic_increment({1.5, 1}, 0.0, rng, out), DomainError);
    CHECK_THROWS_AS(sample_isotropic_increment({1.5, 1}, -1.0, rng, out), DomainError);
}
