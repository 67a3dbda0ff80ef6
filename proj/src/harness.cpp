#include "levy_euler/harness.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <omp.h>
#include <sstream>

#include "levy_euler/errors.hpp"

namespace levy_euler {

//---------------------------------------------------------------------------//
std::string to_string(RateVariant v)
{
    switch (v)
    {
        case RateVariant::main:
            return "main";
        case RateVariant::heavy_tail:
            return "heavy-tail";
        case RateVariant::jump_diffusion:
            return "jump-diffusion";
    }
    return "main";
}

std::string to_string(RateLabel l)
{
    switch (l)
    {
        case RateLabel::power_beta_over_alpha:
            return "power(beta/alpha)";
        case RateLabel::power_min_over_alpha:
            return "power(min(beta,mu)/alpha)";
        case RateLabel::log_linear:
            return "log-linear";
        case RateLabel::linear:
            return "linear";
    }
    return "linear";
}

RateVariant parse_variant(std::string const& s)
{
    if (s == "main")
    {
        return RateVariant::main;
    }
    if (s == "heavy-tail")
    {
        return RateVariant::heavy_tail;
    }
    if (s == "jump-diffusion")
    {
        return RateVariant::jump_diffusion;
    }
    throw DomainError("unknown variant '" + s + "' (main | heavy-tail | jump-diffusion)");
}

double RateLaw::operator()(double delta) const
{
    if (label == RateLabel::log_linear)
    {
        return delta * (1.0 + std::abs(std::log(delta)));
    }
    return std::pow(delta, exponent);
}

RateLaw main_rate_law(double alpha, double beta)
{
    if (beta < alpha)
    {
        return {RateLabel::power_beta_over_alpha, beta / alpha};
    }
    if (beta == alpha)
    {
        return {RateLabel::log_linear, 1.0};
    }
    return {RateLabel::linear, 1.0};
}

namespace {
[[noreturn]] void violated(std::string const& hypothesis, std::string const& detail)
{
    throw DomainError("hypothesis " + hypothesis + " violated: " + detail);
}

std::string num(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace

RateLaw theoretical_law(double alpha, double beta, double mu, RateVariant variant)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
    {
        violated("0 < α ≤ 2", "α = " + num(alpha));
    }
    switch (variant)
    {
        case RateVariant::main: {
            std::string const h = "0 < β ≤ μ < α + β";
            if (!(beta > 0.0))
            {
                violated(h, "β = " + num(beta) + " ≤ 0");
            }
            if (!(beta <= mu))
            {
                violated(h, "β = " + num(beta) + " > μ = " + num(mu));
            }
            if (!(mu < alpha + beta))
            {
                violated(h, "μ = " + num(mu) + " ≥ α + β = " + num(alpha + beta));
            }
            if (!(beta < 3.0))
            {
                violated("β < 3", "β = " + num(beta));
            }
            return main_rate_law(alpha, beta);
        }
        case RateVariant::heavy_tail: {
            std::string const h = "0 < β ≤ μ < α";
            if (!(beta > 0.0))
            {
                violated(h, "β = " + num(beta) + " ≤ 0");
            }
            if (!(beta <= mu))
            {
                violated(h, "β = " + num(beta) + " > μ = " + num(mu));
            }
            if (!(mu < alpha))
            {
                violated(h, "μ = " + num(mu) + " ≥ α = " + num(alpha));
            }
            return {RateLabel::power_min_over_alpha, std::min(beta, mu) / alpha};
        }
        case RateVariant::jump_diffusion: {
            if (alpha != 2.0)
            {
                violated("α = 2", "α = " + num(alpha));
            }
            if (!(mu > 0.0 && mu < 3.0))
            {
                violated("0 < μ < 3", "μ = " + num(mu));
            }
            if (!(beta > 0.0))
            {
                violated("β > 0", "β = " + num(beta));
            }
            if (mu < 2.0)
            {
                return {RateLabel::power_min_over_alpha, std::min(beta, mu) / 2.0};
            }
            if (mu == 2.0 && beta == 2.0)
            {
                return {RateLabel::log_linear, 1.0};
            }
            if (mu > 2.0 && beta > 2.0)
            {
                return {RateLabel::linear, 1.0};
            }
            // combinations outside the table: main law at β ∧ μ
            return main_rate_law(2.0, std::min(beta, mu));
        }
    }
    return {};
}

double theoretical_rate(double alpha, double beta, double mu,
                        RateVariant variant, double delta)
{
    if (!(delta > 0.0))
    {
        throw DomainError("theoretical_rate: delta must be > 0");
    }
    return theoretical_law(alpha, beta, mu, variant)(delta);
}

//---------------------------------------------------------------------------//
void Moments::add(double x)
{
    ++count;
    double const d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
}

Moments Moments::merge(Moments const& a, Moments const& b)
{
    Moments out;
    out.excluded = a.excluded + b.excluded;
    if (a.count == 0 || b.count == 0)
    {
        Moments const& src = a.count == 0 ? b : a;
        out.count = src.count;
        out.mean = src.mean;
        out.m2 = src.m2;
        return out;
    }
    double const na = static_cast<double>(a.count);
    double const nb = static_cast<double>(b.count);
    double const n = na + nb;
    double const delta = b.mean - a.mean;
    out.count = a.count + b.count;
    out.mean = a.mean + delta * (nb / n);
    out.m2 = a.m2 + b.m2 + delta * delta * (na * nb / n);
    return out;
}

double Moments::std_error_of_mean() const
{
    if (count < 2)
    {
        return 0.0;
    }
    double const n = static_cast<double>(count);
    return std::sqrt(m2 / (n - 1.0) / n);
}

namespace {
Moments tree_merge(std::vector<Moments> const& blocks, std::size_t lo,
                   std::size_t hi)
{
    std::size_t const n = hi - lo;
    if (n == 0)
    {
        return {};
    }
    if (n == 1)
    {
        return blocks[lo];
    }
    std::size_t split = 1;
    while (split * 2 < n)
    {
        split *= 2;
    }
    return Moments::merge(tree_merge(blocks, lo, lo + split),
                          tree_merge(blocks, lo + split, hi));
}

void fold(Moments& acc, std::optional<double> const& v)
{
    if (v)
    {
        acc.add(*v);
    }
    else
    {
        ++acc.excluded;
    }
}
}  // namespace

Moments reduce_paths(std::uint64_t n, PathValueFactory const& factory,
                     McOptions const& opts)
{
    std::uint64_t const nblocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Moments> blocks(nblocks);
    if (opts.execution == Execution::serial_reference)
    {
        PathValue value = factory();
        std::vector<std::optional<double>> values(n);
        for (std::uint64_t p = 0; p < n; ++p)
        {
            values[p] = value(p);
        }
        for (std::uint64_t b = 0; b < nblocks; ++b)
        {
            std::uint64_t const end = std::min(n, (b + 1) * kBlockSize);
            for (std::uint64_t p = b * kBlockSize; p < end; ++p)
            {
                fold(blocks[b], values[p]);
            }
        }
        return tree_merge(blocks, 0, nblocks);
    }

    int const workers = opts.workers > 0 ? opts.workers : omp_get_max_threads();
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel num_threads(workers)
    {
        PathValue value;
        try
        {
            value = factory();
        }
        catch (...)
        {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure)
            {
                failure = std::current_exception();
            }
        }
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b)
        {
            if (!value)
            {
                continue;
            }
            try
            {
                Moments acc;
                std::uint64_t const end = std::min<std::uint64_t>(n, (b + 1) * kBlockSize);
                for (std::uint64_t p = b * kBlockSize; p < end; ++p)
                {
                    fold(acc, value(p));
                }
                blocks[b] = acc;
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                {
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure)
    {
        std::rethrow_exception(failure);
    }
    return tree_merge(blocks, 0, nblocks);
}

//---------------------------------------------------------------------------//
namespace {
Estimate finish(Moments const& m, McOptions const& mc)
{
    Estimate e;
    e.n_paths = m.count + m.excluded;
    e.excluded = m.excluded;
    e.mean = m.mean;
    e.std_error = m.std_error_of_mean();
    if (e.n_paths > 0
        && static_cast<double>(e.excluded) / static_cast<double>(e.n_paths)
               > mc.max_excluded_fraction)
    {
        std::ostringstream os;
        os << "excluded (exploded) paths " << e.excluded << " of " << e.n_paths
           << " exceed the configured fraction " << mc.max_excluded_fraction;
        throw Error(os.str());
    }
    return e;
}

int steps_for(double T, double delta, char const* what)
{
    if (!(delta > 0.0))
    {
        throw DomainError(std::string(what) + " must be > 0");
    }
    double const n = T / delta;
    long long const r = std::llround(n);
    if (r < 1 || std::abs(static_cast<double>(r) * delta - T) > 1e-9 * T)
    {
        std::ostringstream os;
        os << what << " = " << delta << " does not divide T = " << T;
        throw DomainError(os.str());
    }
    return static_cast<int>(r);
}
}  // namespace

Estimate estimate_expectation_keyed(Functional const& functional,
                                    Experiment const& exp, TimeGrid const& grid,
                                    McOptions const& mc, std::uint64_t key)
{
    if (mc.n_paths < 2)
    {
        throw DomainError("estimate_expectation: n_paths must be >= 2");
    }
    EulerScheme const scheme(exp.field, exp.driver, exp.jumps, grid);
    bool const running = functional.kind == Functional::Kind::running;
    auto const& fn = functional.fn;
    auto const& x0 = exp.x0;
    PathValueFactory factory = [&]() -> PathValue {
        auto ws = std::make_shared<EulerScheme::Workspace>(scheme.make_workspace());
        return [&, ws](std::uint64_t path) -> std::optional<double> {
            RandomStream rng(key, path);
            PathResult r = scheme.simulate(x0, running ? &fn : nullptr, rng, *ws);
            if (r.exploded)
            {
                return std::nullopt;
            }
            return running ? r.running_integral : fn(r.terminal);
        };
    };
    return finish(reduce_paths(mc.n_paths, factory, mc), mc);
}

Estimate estimate_expectation(Functional const& functional, Experiment const& exp,
                              TimeGrid const& grid, McOptions const& mc,
                              std::uint64_t seed)
{
    return estimate_expectation_keyed(
        functional, exp, grid, mc,
        derive_key(seed, "rate/level", static_cast<std::uint64_t>(grid.steps())));
}

namespace {
WeakErrorPoint combine(double delta, Estimate const& coarse, Estimate const& ref)
{
    WeakErrorPoint p;
    p.delta = delta;
    p.estimate = coarse.mean - ref.mean;
    p.std_error = std::sqrt(coarse.std_error * coarse.std_error
                            + ref.std_error * ref.std_error);
    p.n_paths = coarse.n_paths;
    p.excluded = coarse.excluded + ref.excluded;
    return p;
}

}  // namespace

std::vector<WeakErrorPoint> weak_error_sweep(TestFunction const& g,
                                             Experiment const& exp,
                                             std::vector<double> const& deltas,
                                             double delta_ref, McOptions const& mc,
                                             std::uint64_t seed)
{
    return weak_error_sweep(Functional{Functional::Kind::terminal, g}, exp, deltas,
                            delta_ref, mc, seed);
}

std::vector<WeakErrorPoint> weak_error_sweep(Functional const& functional,
                                             Experiment const& exp,
                                             std::vector<double> const& deltas,
                                             double delta_ref, McOptions const& mc,
                                             std::uint64_t seed)
{
    int const n_ref = steps_for(exp.T, delta_ref, "delta_ref");
    for (double d : deltas)
    {
        steps_for(exp.T, d, "delta");
        if (!(delta_ref <= d / 16.0))
        {
            std::ostringstream os;
            os << "delta_ref = " << delta_ref << " must be <= delta/16 for delta = " << d;
            throw DomainError(os.str());
        }
    }
    Functional fn = functional;
    fn.fn.offset = 0.0;
    Estimate const ref = estimate_expectation_keyed(
        fn, exp, TimeGrid::uniform(exp.T, n_ref), mc,
        derive_key(seed, "rate/reference", static_cast<std::uint64_t>(n_ref)));
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<WeakErrorPoint> out;
    for (double d : sorted)
    {
        int const n = steps_for(exp.T, d, "delta");
        Estimate const coarse = estimate_expectation(fn, exp, TimeGrid::uniform(exp.T, n),
                                                     mc, seed);
        out.push_back(combine(d, coarse, ref));
    }
    return out;
}

WeakErrorPoint estimate_weak_error(TestFunction const& g, Experiment const& exp,
                                   double delta, double delta_ref,
                                   McOptions const& mc, std::uint64_t seed)
{
    return weak_error_sweep(g, exp, {delta}, delta_ref, mc, seed).front();
}

//---------------------------------------------------------------------------//
namespace {
struct Ols
{
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    double sxx = 0.0;
};

Ols ols(std::vector<double> const& x, std::vector<double> const& y)
{
    double const n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    Ols o;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        o.sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    o.slope = sxy / o.sxx;
    o.intercept = my - o.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double const e = y[i] - o.intercept - o.slope * x[i];
        o.rss += e * e;
    }
    return o;
}
}  // namespace

RateReport fit_rate(std::vector<WeakErrorPoint> points, FitModel model)
{
    std::sort(points.begin(), points.end(),
              [](auto const& a, auto const& b) { return a.delta > b.delta; });
    RateReport rep;
    rep.model = model;
    rep.points = points;
    std::vector<double> lx, ly, lmodel;
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        auto const& p = points[i];
        if (!(std::abs(p.estimate) > 3.0 * p.std_error))
        {
            std::ostringstream os;
            os << "dropped delta = " << p.delta << ": |estimate| " << std::abs(p.estimate)
               << " <= 3 stderr " << 3.0 * p.std_error;
            rep.warnings.push_back(os.str());
            continue;
        }
        rep.used.push_back(i);
        lx.push_back(std::log(p.delta));
        ly.push_back(std::log(std::abs(p.estimate)));
        lmodel.push_back(std::log(p.delta * (1.0 + std::abs(std::log(p.delta)))));
    }
    if (rep.used.size() < 3)
    {
        std::ostringstream os;
        os << "fit_rate: insufficient points (" << rep.used.size()
           << " usable, need >= 3)";
        throw DomainError(os.str());
    }
    Ols const o = ols(lx, ly);
    rep.fitted_slope = o.slope;
    rep.power_residual = o.rss;
    double const dof = static_cast<double>(lx.size()) - 2.0;
    boost::math::students_t dist(dof);
    double const t = boost::math::quantile(boost::math::complement(dist, 0.025));
    double const se = std::sqrt(o.rss / dof / o.sxx);
    rep.ci_lo = o.slope - t * se;
    rep.ci_hi = o.slope + t * se;
    double offset = 0.0;
    for (std::size_t i = 0; i < ly.size(); ++i)
    {
        offset += ly[i] - lmodel[i];
    }
    offset /= static_cast<double>(ly.size());
    for (std::size_t i = 0; i < ly.size(); ++i)
    {
        double const e = ly[i] - lmodel[i] - offset;
        rep.loglinear_residual += e * e;
    }
    return rep;
}

EnvelopeCheck check_envelope(RateReport const& report, RateLaw const& law)
{
    EnvelopeCheck out;
    if (report.used.empty())
    {
        return out;
    }
    auto const& p0 = report.points[report.used.front()];
    double const r0 = law(p0.delta);
    out.constant = std::abs(p0.estimate) / r0;
    out.ok = true;
    for (std::size_t idx : report.used)
    {
        auto const& p = report.points[idx];
        double const rk = law(p.delta);
        double const noise = 3.0 * std::sqrt(p.std_error * p.std_error
                                              + std::pow(p0.std_error * rk / r0, 2));
        double const margin = out.constant * rk + noise - std::abs(p.estimate);
        out.margin.push_back(margin);
        if (margin < 0.0)
        {
            out.ok = false;
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
namespace {
constexpr double kFractions[] = {0.25, 0.5, 0.75, 1.0};
}

OneStepResult one_step_check(TestFunction const& f, Experiment const& exp,
                             double delta, McOptions const& mc,
                             std::uint64_t seed)
{
    if (!(delta > 0.0))
    {
        throw DomainError("one_step_check: delta must be > 0");
    }
    if (mc.n_paths < 2)
    {
        throw DomainError("one_step_check: n_paths must be >= 2");
    }
    auto const n = static_cast<std::uint64_t>(std::max(1.0, std::round(exp.T / delta)));
    std::uint64_t const key = derive_key(seed, "one-step", n);
    double const f0 = f.core(exp.x0);
    OneStepResult out;
    out.delta = delta;
    double const beta = f.declared_beta;
    out.bound = main_rate_law(exp.driver.alpha, beta)(delta);
    for (std::size_t j = 0; j < std::size(kFractions); ++j)
    {
        double const dt = kFractions[j] * delta;
        EulerScheme const scheme(exp.field, exp.driver, exp.jumps,
                                 TimeGrid::uniform(dt, 1));
        std::uint64_t const offset = static_cast<std::uint64_t>(j) << 40;
        PathValueFactory factory = [&]() -> PathValue {
            auto ws = std::make_shared<EulerScheme::Workspace>(scheme.make_workspace());
            return [&, ws](std::uint64_t path) -> std::optional<double> {
                RandomStream rng(key, path + offset);
                PathResult r = scheme.simulate(exp.x0, nullptr, rng, *ws);
                if (r.exploded)
                {
                    return std::nullopt;
                }
                return f.core(r.terminal) - f0;
            };
        };
        Estimate const e = finish(reduce_paths(mc.n_paths, factory, mc), mc);
        out.s_fractions.push_back(kFractions[j]);
        out.means.push_back(e.mean);
        out.stderrs.push_back(e.std_error);
        out.n_paths = e.n_paths;
        out.excluded += e.excluded;
        if (std::abs(e.mean) >= out.max_over_s)
        {
            out.max_over_s = std::abs(e.mean);
            out.stderr_at_max = e.std_error;
        }
    }
    return out;
}

OneStepSweep one_step_sweep(TestFunction const& f, Experiment const& exp,
                            std::vector<double> const& deltas,
                            McOptions const& mc, std::uint64_t seed)
{
    if (deltas.size() < 2)
    {
        throw DomainError("one_step_sweep: need at least 2 deltas");
    }
    OneStepSweep out;
    out.theory_exponent = main_rate_law(exp.driver.alpha, f.declared_beta).exponent;
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> lx, ly;
    for (double d : sorted)
    {
        out.levels.push_back(one_step_check(f, exp, d, mc, seed));
        lx.push_back(std::log(d));
        ly.push_back(std::log(std::max(out.levels.back().max_over_s, 1e-300)));
    }
    out.fitted_slope = ols(lx, ly).slope;
    return out;
}

GeneratorCheck generator_consistency_check(DeclaredFunction const& u,
                                           Experiment const& exp,
                                           std::vector<double> const& h_panel,
                                           McOptions const& mc,
                                           std::uint64_t seed,
                                           QuadratureSpec const& quad)
{
    if (h_panel.empty())
    {
        throw DomainError("generator check: empty h panel");
    }
    if (mc.n_paths < 2)
    {
        throw DomainError("generator check: n_paths must be >= 2");
    }
    CoefficientField const frozen = exp.field.frozen_at(exp.x0);
    double const alpha = exp.driver.alpha;
    GeneratorCheck out;
    QuadratureResult const a = apply_A(exp.x0, frozen, u, exp.x0, alpha, quad,
                                       exp.driver.wiener);
    double const b = apply_B(exp.x0, frozen, exp.jumps, u, exp.x0, alpha);
    out.quadrature = a.value + b;
    out.quadrature_error = a.error;

    std::uint64_t const key = derive_key(seed, "generator", 0);
    double const u0 = u.u(exp.x0);
    std::vector<double> hs = h_panel;
    std::sort(hs.begin(), hs.end());
    for (double h : hs)
    {
        EulerScheme const scheme(frozen, exp.driver, exp.jumps, TimeGrid::uniform(h, 1));
        PathValueFactory factory = [&]() -> PathValue {
            auto ws = std::make_shared<EulerScheme::Workspace>(scheme.make_workspace());
            return [&, ws](std::uint64_t path) -> std::optional<double> {
                RandomStream rng(key, path);
                PathResult r = scheme.simulate(exp.x0, nullptr, rng, *ws);
                if (r.exploded)
                {
                    return std::nullopt;
                }
                return (u.u(r.terminal) - u0) / h;
            };
        };
        Estimate const e = finish(reduce_paths(mc.n_paths, factory, mc), mc);
        out.h.push_back(h);
        out.mc_estimate.push_back(e.mean);
        out.mc_stderr.push_back(e.std_error);
    }
    out.extrapolated = hs.size() >= 2 ? ols(out.h, out.mc_estimate).intercept
                                      : out.mc_estimate.front();
    double const denom = std::abs(out.quadrature);
    out.relative_error = std::abs(out.extrapolated - out.quadrature) / denom;
    out.relative_error_smallest_h = std::abs(out.mc_estimate.front() - out.quadrature) / denom;
    double const pooled = std::sqrt(out.mc_stderr.front() * out.mc_stderr.front()
                                    + out.quadrature_error * out.quadrature_error);
    out.within_three_pooled = std::abs(out.mc_estimate.front() - out.quadrature) <= 3.0 * pooled;
    return out;
}

}  // namespace levy_euler
