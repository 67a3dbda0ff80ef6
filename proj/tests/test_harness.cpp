#include <bit>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levy_euler/errors.hpp"
#include "levy_euler/harness.hpp"

using namespace levy_euler;

namespace {
LevyMeasureSpec atom(double alpha, double rate, double y)
{
    LevyMeasureSpec z;
    z.rate = rate;
    z.jump = AtomJumps{{{y}}, {1.0}};
    z.driver_alpha = alpha;
    z.tail_moment_order = 2.0;
    return z;
}

Experiment constant_experiment(double alpha, double a, double b, double g, double rate,
                               double y, double x0, double T = 1.0)
{
    Experiment e;
    e.field = constant_field(1, 1, {a}, {b}, {g});
    e.driver = {alpha, 1};
    e.jumps = atom(alpha, rate, y);
    e.x0 = {x0};
    e.T = T;
    return e;
}

std::vector<WeakErrorPoint> synthetic(std::function<double(double)> const& e)
{
    std::vector<WeakErrorPoint> pts;
    for (int k = 3; k <= 7; ++k)
    {
        double const d = std::ldexp(1.0, -k);
        pts.push_back({d, e(d), 0.0, 1000, 0});
    }
    return pts;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }
}  // namespace

TEST_CASE("theoretical rates")
{
    CHECK(theoretical_rate(1.5, 0.75, 1.5, RateVariant::main, 1.0 / 16) == doctest::Approx(0.25));
    CHECK(theoretical_rate(2.0, 2.0, 2.0, RateVariant::main, std::exp(-1.0))
          == doctest::Approx(2.0 / std::numbers::e));
    CHECK(theoretical_rate(2.0, 1.0, 1.5, RateVariant::jump_diffusion, 1.0 / 64)
          == doctest::Approx(0.125));
    CHECK(theoretical_law(1.0, 1.5, 2.0, RateVariant::main).label == RateLabel::linear);
    CHECK(theoretical_law(1.8, 0.9, 0.9, RateVariant::heavy_tail).exponent == doctest::Approx(0.5));
    CHECK(theoretical_law(2.0, 2.5, 2.5, RateVariant::jump_diffusion).label == RateLabel::linear);
    CHECK(theoretical_law(2.0, 2.0, 2.0, RateVariant::jump_diffusion).label == RateLabel::log_linear);

    auto names = [](double a, double b, double m, RateVariant v) {
        try
        {
            theoretical_law(a, b, m, v);
        }
        catch (DomainError const& e)
        {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(names(1.5, 0.75, 2.5, RateVariant::main).find("0 < β ≤ μ < α + β") != std::string::npos);
    CHECK(names(1.5, 0.75, 0.5, RateVariant::main).find("0 < β ≤ μ < α + β") != std::string::npos);
    CHECK(names(1.5, 0.75, 1.6, RateVariant::heavy_tail).find("0 < β ≤ μ < α") != std::string::npos);
    CHECK(names(1.5, 0.75, 1.0, RateVariant::jump_diffusion).find("α = 2") != std::string::npos);
    CHECK(names(2.0, 1.0, 3.5, RateVariant::jump_diffusion).find("0 < μ < 3") != std::string::npos);
    CHECK(parse_variant("heavy-tail") == RateVariant::heavy_tail);
    CHECK_THROWS(parse_variant("other"));
}

TEST_CASE("expectations of trivial functionals")
{
    FieldParams p;
    p.a_amplitude = {0.5};
    p.b_amplitude = {0.3};
    Experiment e;
    e.field = builtin_field("sinusoidal", p);
    e.driver = {1.5, 1};
    e.jumps = atom(1.5, 1.0, 0.7);
    e.x0 = {0.2};
    e.T = 2.0;
    McOptions mc;
    mc.n_paths = 3000;
    auto const grid = TimeGrid::uniform(2.0, 16);

    Functional one{Functional::Kind::terminal, constant_function(1.0)};
    auto const t = estimate_expectation(one, e, grid, mc, 1);
    CHECK(t.mean == 1.0);
    CHECK(t.std_error == 0.0);
    CHECK(t.n_paths == 3000);

    Functional run{Functional::Kind::running, constant_function(1.0)};
    auto const r = estimate_expectation(run, e, grid, mc, 1);
    CHECK(r.mean == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.std_error <= 1e-14);

    auto const zero = constant_experiment(1.5, 0.0, 0.0, 0.0, 0.0, 1.0, 3.0);
    TestFunction id;
    id.core = [](std::span<double const> x) { return x[0]; };
    Functional ident{Functional::Kind::terminal, id};
    auto const z = estimate_expectation(ident, zero, TimeGrid::uniform(1.0, 4), mc, 1);
    CHECK(z.mean == 3.0);
    CHECK(z.std_error == 0.0);
}

TEST_CASE("weak error: constant coefficients are exact")
{
    auto const e = constant_experiment(1.5, 0.3, 1.0, 0.5, 1.0, 0.5, 0.1);
    auto const g = gaussian_mixture(1, {1.0}, {0.0}, {1.0});
    McOptions mc;
    mc.n_paths = 20000;
    auto const w = estimate_weak_error(g, e, 0.25, 1.0 / 64, mc, 3);
    CHECK(w.std_error > 0.0);
    CHECK(std::abs(w.estimate) <= 3 * w.std_error);

    auto const one = estimate_weak_error(constant_function(1.0), e, 0.25, 1.0 / 64, mc, 3);
    CHECK(one.estimate == 0.0);
    CHECK(one.std_error == 0.0);

    CHECK_THROWS_AS(estimate_weak_error(g, e, 0.25, 1.0 / 32, mc, 3), DomainError);
}

TEST_CASE("weak error: additive constants cancel bit-exactly")
{
    FieldParams p;
    p.a_amplitude = {0.5};
    p.b_base = {1.0};
    p.b_amplitude = {0.3};
    Experiment e;
    e.field = builtin_field("sinusoidal", p);
    e.driver = {1.5, 1};
    e.jumps = atom(1.5, 1.0, 0.7);
    e.x0 = {0.2};
    McOptions mc;
    mc.n_paths = 4000;
    auto g = gaussian_mixture(1, {1.0}, {0.0}, {1.0});
    auto shifted = g;
    shifted.offset = 12.5;
    auto const a = weak_error_sweep(g, e, {0.25, 0.125, 0.0625}, 1.0 / 256, mc, 7);
    auto const b = weak_error_sweep(shifted, e, {0.0625, 0.25, 0.125}, 1.0 / 256, mc, 7);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].delta == b[i].delta);
        CHECK(same_bits(a[i].estimate, b[i].estimate));
        CHECK(same_bits(a[i].std_error, b[i].std_error));
    }
    CHECK(a[0].delta > a[1].delta);
    CHECK(a[1].delta > a[2].delta);
}

TEST_CASE("fit_rate")
{
    auto const exact = fit_rate(synthetic([](double d) { return std::pow(d, 0.75); }));
    CHECK(exact.fitted_slope == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(exact.power_residual <= 1e-24);
    CHECK(exact.used.size() == 5);

    auto ll = [](double d) { return d * (1.0 + std::abs(std::log(d))); };
    auto const lin = fit_rate(synthetic(ll));
    CHECK(lin.fitted_slope > 0.5);
    CHECK(lin.fitted_slope < 1.0);
    CHECK(lin.loglinear_residual < lin.power_residual);
    auto const as_log = fit_rate(synthetic(ll), FitModel::log_linear);
    CHECK(as_log.model == FitModel::log_linear);

    auto two = synthetic([](double d) { return d; });
    two.resize(2);
    CHECK_THROWS_AS(fit_rate(two), DomainError);

    auto noisy = synthetic([](double d) { return std::pow(d, 0.5); });
    noisy[4].std_error = noisy[4].estimate;
    auto const dropped = fit_rate(noisy);
    CHECK(dropped.used.size() == 4);
    CHECK_FALSE(dropped.warnings.empty());

    auto base = synthetic([](double d) { return 0.3 * std::pow(d, 0.6) * (1.0 + 0.2 * std::sin(40 * d)); });
    auto scaled = base;
    for (auto& p : scaled)
    {
        p.estimate *= 1234.5;
    }
    CHECK(fit_rate(scaled).fitted_slope == doctest::Approx(fit_rate(base).fitted_slope).epsilon(1e-12));
}

TEST_CASE("envelope check")
{
    RateLaw const law{RateLabel::power_beta_over_alpha, 0.5};
    auto const ok = check_envelope(fit_rate(synthetic([](double d) { return 2.0 * std::pow(d, 0.7); })), law);
    CHECK(ok.ok);
    CHECK(ok.constant == doctest::Approx(2.0 * std::pow(0.125, 0.2)));
    auto const bad = check_envelope(fit_rate(synthetic([](double d) { return std::pow(d, 0.3); })), law);
    CHECK_FALSE(bad.ok);
    // negative errors are judged by magnitude
    auto const neg = check_envelope(fit_rate(synthetic([](double d) { return -std::pow(d, 0.9); })), law);
    CHECK(neg.ok);
}

TEST_CASE("reduction is bit-identical across worker counts")
{
    std::uint64_t const n = 10 * kBlockSize + 37;
    PathValueFactory const factory = [] {
        return [](std::uint64_t path) -> std::optional<double> {
            if (path % 977 == 5)
            {
                return std::nullopt;
            }
            RandomStream rng(123, path);
            return 1e3 + rng.normal() * std::exp(rng.normal());
        };
    };
    McOptions ref;
    ref.execution = Execution::serial_reference;
    ref.max_excluded_fraction = 0.01;
    auto const r = reduce_paths(n, factory, ref);
    CHECK(r.count + r.excluded == n);
    CHECK(r.excluded > 0);
    for (int w : {1, 2, 3, 4, 8})
    {
        McOptions par = ref;
        par.execution = Execution::parallel;
        par.workers = w;
        auto const p = reduce_paths(n, factory, par);
        CHECK(p.count == r.count);
        CHECK(p.excluded == r.excluded);
        CHECK(same_bits(p.mean, r.mean));
        CHECK(same_bits(p.m2, r.m2));
    }
}

TEST_CASE("Welford and Chan agree with the two-pass formulas")
{
    std::vector<double> v;
    RandomStream rng(5, 0);
    for (int i = 0; i < 5000; ++i)
    {
        v.push_back(rng.normal() + 10.0);
    }
    Moments a, b, all;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        (i < 1700 ? a : b).add(v[i]);
        all.add(v[i]);
    }
    auto const m = Moments::merge(a, b);
    double mean = 0.0;
    for (double x : v)
    {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
    {
        ss += (x - mean) * (x - mean);
    }
    CHECK(m.mean == doctest::Approx(mean).epsilon(1e-13));
    CHECK(m.m2 == doctest::Approx(ss).epsilon(1e-11));
    CHECK(all.m2 == doctest::Approx(ss).epsilon(1e-11));
    CHECK(m.std_error_of_mean() == doctest::Approx(std::sqrt(ss / 4999.0 / 5000.0)).epsilon(1e-11));
}

TEST_CASE("excluded fraction above the threshold is an error")
{
    auto const e = constant_experiment(2.0, 1e13, 1.0, 0.0, 0.0, 1.0, 0.0);
    McOptions mc;
    mc.n_paths = 100;
    Functional g{Functional::Kind::terminal, constant_function(1.0)};
    CHECK_THROWS_AS(estimate_expectation(g, e, TimeGrid::uniform(1.0, 2), mc, 1), Error);
}

TEST_CASE("one-step check")
{
    auto const e = constant_experiment(2.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.5);
    McOptions mc;
    mc.n_paths = 100000;

    auto const c = one_step_check(constant_function(2.0), e, 0.125, mc, 1);
    CHECK(c.max_over_s == 0.0);
    CHECK(c.s_fractions.size() == 4);

    auto const f = gaussian_mixture(1, {1.0}, {0.0}, {1.0});
    auto const sweep = one_step_sweep(f, e, {0.125, 0.0625, 0.03125, 0.015625, 0.0078125}, mc, 2);
    CHECK(sweep.theory_exponent == 1.0);
    CHECK(sweep.fitted_slope >= 0.85);
    for (auto const& lvl : sweep.levels)
    {
        CHECK(lvl.max_over_s > 3 * lvl.stderr_at_max);
    }
}

TEST_CASE("generator consistency")
{
    McOptions mc;
    mc.n_paths = 20000;
    SUBCASE("constant u")
    {
        auto const e = constant_experiment(1.5, 0.0, 1.0, 1.0, 1.0, 0.5, 0.0);
        DeclaredFunction u;
        u.u = [](std::span<double const>) { return 4.0; };
        u.growth = BoundedGrowth{4.0};
        auto const g = generator_consistency_check(u, e, {1e-3}, mc, 1);
        CHECK(std::abs(g.quadrature) <= 1e-5);
        CHECK(g.mc_estimate[0] == 0.0);
        CHECK(g.within_three_pooled);
    }
    SUBCASE("atomic jumps, alpha = 0.5")
    {
        mc.n_paths = 200000;
        auto const e = constant_experiment(0.5, 0.0, 1.0, 1.0, 2.0, 0.5, 0.0);
        auto const u = declared_plane_wave({1.0});
        auto const g = generator_consistency_check(u, e, {1e-3}, mc, 4);
        double const expected = -char_exponent_constant(1, 0.5).value + 2.0 * (std::cos(0.5) - 1.0);
        CHECK(g.quadrature == doctest::Approx(expected).epsilon(1e-5));
        CHECK(g.within_three_pooled);
    }
}
