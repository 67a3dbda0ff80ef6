// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "levy_euler/config.hpp"
#include "levy_euler/errors.hpp"
#include "levy_euler/harness.hpp"

using namespace levy_euler;
namespace fs = std::filesystem;

namespace {
fs::path const kConfigs = LEVY_EULER_CONFIG_DIR;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> deltas_for(ExperimentConfig const& c, std::vector<int> const& n)
{
    std::vector<double> out;
    for (int k : n)
    {
        out.push_back(c.model.T / k);
    }
    return out;
}

std::string points_text(std::vector<WeakErrorPoint> const& pts)
{
    std::string s;
    for (auto const& p : pts)
    {
        s += fmt(" [δ=%.5g e=%.4g se=%.2g]", p.delta, p.estimate, p.std_error);
    }
    return s;
}

//---------------------------------------------------------------------------//
Outcome characteristic_functions()
{
    std::size_t const n = 100000;
    std::vector<double> const radii{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    int worst_case = 0;
    double worst = 0.0;
    int failures = 0;
    int idx = 0;
    for (auto [d, alpha] : {std::pair{1, 0.7}, {1, 1.0}, {1, 1.5}, {2, 1.5}, {2, 2.0}})
    {
        StableIncrementSampler const s(StableDriverSpec{alpha, d});
        double const c = s.exponent_constant();
        std::vector<double> x(static_cast<std::size_t>(d) * n);
        RandomStream rng(derive_key(2024, "sample-stable", idx++), 0);
        for (std::size_t i = 0; i < n; ++i)
        {
            s.sample(1.0, rng, std::span<double>(x.data() + i * d, d));
        }
        for (std::size_t k = 0; k < radii.size(); ++k)
        {
            // ξ = r (cos φ_k, sin φ_k) in d = 2
            double const phi = 0.4 * static_cast<double>(k);
            double const xi0 = d == 1 ? radii[k] : radii[k] * std::cos(phi);
            double const xi1 = d == 1 ? 0.0 : radii[k] * std::sin(phi);
            Moments m;
            for (std::size_t i = 0; i < n; ++i)
            {
                double proj = xi0 * x[i * d];
                if (d == 2)
                {
                    proj += xi1 * x[i * d + 1];
                }
                m.add(std::cos(proj));
            }
            double const theory = std::exp(-c * std::pow(radii[k], alpha));
            double const z = std::abs(m.mean - theory) / m.std_error_of_mean();
            if (z > worst)
            {
                worst = z;
                worst_case = idx;
            }
            failures += z > 3.0;
        }
    }
    return {failures == 0, fmt("40 comparisons, %d beyond 3 SE, max |z| = %.2f (case %d)",
                               failures, worst, worst_case)};
}

Outcome constant_coefficient_exactness()
{
    McOptions mc;
    mc.n_paths = 100000;
    bool ok = true;
    std::string detail;
    for (double alpha : {1.5, 2.0})
    {
        Experiment e;
        e.field = constant_field(1, 1, {0.4}, {1.3}, {0.8});
        e.driver = {alpha, 1};
        e.jumps.rate = 1.0;
        e.jumps.jump = AtomJumps{{{0.5}, {-1.5}}, {0.7, 0.3}};
        e.jumps.driver_alpha = alpha;
        e.jumps.tail_moment_order = alpha;
        e.x0 = {0.2};
        auto const g = gaussian_mixture(1, {1.0}, {0.0}, {1.0});
        auto const w = estimate_weak_error(g, e, 1.0, 1.0 / 1024, mc, 17);
        ok = ok && std::abs(w.estimate) <= 3 * w.std_error;
        detail += fmt(" α=%.1f: e=%.3g se=%.3g;", alpha, w.estimate, w.std_error);
    }
    return {ok, detail};
}

Outcome rate_recovery(std::string const& file, std::optional<double> min_slope)
{
    auto const c = parse_config(kConfigs / file);
    Functional const fn{Functional::Kind::terminal, make_test_function(*c.test.g)};
    double const delta_ref = c.model.T / c.grids.reference_steps();
    auto const pts = weak_error_sweep(fn, c.experiment(), deltas_for(c, c.grids.n), delta_ref,
                                      c.mc_options(), c.mc.seed);
    try
    {
        auto const rep = fit_rate(pts);
        RateLaw const law = c.theory();
        auto const env = check_envelope(rep, law);
        bool const slope_ok = !min_slope || rep.fitted_slope >= *min_slope;
        std::string d = fmt("slope %.3f [%.3f, %.3f]", rep.fitted_slope, rep.ci_lo, rep.ci_hi);
        if (min_slope)
        {
            d += fmt(" (need ≥ %.2f)", *min_slope);
        }
        d += fmt("; envelope δ^%.3g%s %s; %zu/%zu points used;", law.exponent,
                 law.label == RateLabel::log_linear ? "(1+|ln δ|)" : "", env.ok ? "ok" : "violated",
                 rep.used.size(), pts.size());
        return {slope_ok && env.ok, d + points_text(pts)};
    }
    catch (DomainError const& e)
    {
        return {false, std::string("fit failed: ") + e.what() + points_text(pts)};
    }
}

Outcome one_step_rates()
{
    bool ok = true;
    std::string detail;
    for (auto const* file : {"smooth_rate.json", "holder_rate.json"})
    {
        auto const c = parse_config(kConfigs / file);
        auto const f = make_test_function(*c.one_step.f);
        auto const sweep = one_step_sweep(f, c.experiment(), deltas_for(c, c.grids.n),
                                          c.mc_options(), c.mc.seed);
        double const need = sweep.theory_exponent - 0.15;
        ok = ok && sweep.fitted_slope >= need;
        detail += fmt(" %s: slope %.3f (need ≥ %.2f);", file, sweep.fitted_slope, need);
    }
    return {ok, detail};
}

Outcome generator_consistency()
{
    auto const c = parse_config(kConfigs / "generator_plane_wave.json");
    auto const u = make_declared_function(*c.generator.u);
    auto const g = generator_consistency_check(u, c.experiment(), c.generator.h, c.mc_options(),
                                               c.mc.seed, c.generator.quadrature);
    return {g.relative_error <= 0.05,
            fmt("quadrature %.6f, MC %.6f ± %.2g, relative error %.4f (need ≤ 0.05)",
                g.quadrature, g.mc_estimate[0], g.mc_stderr[0], g.relative_error)};
}

Outcome plane_wave_quadrature()
{
    double worst = 0.0;
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
            double const norm = std::sqrt(xi[0] * xi[0] + (d == 2 ? xi[1] * xi[1] : 0.0));
            auto const u = declared_plane_wave(xi, 1.0, 0.3);
            std::vector<double> const x(d, 0.2);
            double const expected = -char_exponent_constant_closed_form(d, alpha)
                                    * std::pow(norm, alpha) * u.u(x);
            QuadratureSpec q;
            q.tolerance = 1e-5 * std::abs(expected);
            double const got = frac_laplacian(u, x, alpha, q).value;
            worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
        }
    }
    double const c11 = char_exponent_constant(1, 1.0).value;
    double const c_err = std::abs(c11 - std::numbers::pi);
    return {worst <= 1e-3 && c_err <= 1e-4,
            fmt("max relative error %.2e (need ≤ 1e-3); |c_{1,1} - π| = %.1e (need ≤ 1e-4)", worst,
                c_err)};
}

Outcome mollifier_scalings()
{
    std::vector<double> eps;
    for (int k = 2; k <= 8; ++k)
    {
        eps.push_back(std::ldexp(1.0, -k));
    }
    auto const f = radial_power({0.0}, 0.5);
    auto const p = mollifier_scaling_probe(f, CompactSupportGrowth{1.0, {0.0}, 2.0}, 1.5, eps,
                                           {0.0});
    bool const ok = std::abs(p.slope_sup_error - 0.5) <= 0.1
                    && std::abs(p.slope_frac_laplacian - (0.5 - 1.5)) <= 0.15;
    return {ok, fmt("slope sup|f^ε - f| = %.3f (0.5 ± 0.1), slope sup|∂^α f^ε| = %.3f (-1 ± 0.15)",
                    p.slope_sup_error, p.slope_frac_laplacian)};
}

Outcome cli_determinism()
{
    auto cfg = config_to_json(parse_config(kConfigs / "holder_rate.json"));
    cfg["mc"]["n_paths"] = 20000;
    auto const dir = fs::temp_directory_path() / "levy_euler_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "config.json") << cfg.dump(2);
    std::string first;
    bool same = true;
    for (int w : {1, 4, 8})
    {
        auto const out = dir / ("w" + std::to_string(w));
        std::string const cmd = std::string(LEVY_EULER_CLI) + " rate --config "
                                + (dir / "config.json").string() + " --out " + out.string()
                                + " --workers " + std::to_string(w) + " > /dev/null 2>&1";
        int const status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) == 2)
        {
            return {false, fmt("run with %d workers failed", w)};
        }
        std::ifstream in(out / "points.csv", std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        if (w == 1)
        {
            first = os.str();
        }
        same = same && !first.empty() && os.str() == first;
    }
    return {same, same ? "points.csv byte-identical for workers 1, 4, 8"
                       : "points.csv differs between worker counts"};
}
}  // namespace

int main()
{
    std::vector<std::pair<int, std::function<Outcome()>>> const criteria{
        {1, characteristic_functions},
        {2, constant_coefficient_exactness},
        {3, [] { return rate_recovery("smooth_rate.json", 0.8); }},
        {4, [] { return rate_recovery("holder_rate.json", 0.35); }},
        {5, [] { return rate_recovery("heavy_tail.json", std::nullopt); }},
        {6, one_step_rates},
        {7, generator_consistency},
        {8, plane_wave_quadrature},
        {9, mollifier_scalings},
        {10, cli_determinism},
    };
    int failed = 0;
    for (auto const& [id, run] : criteria)
    {
        auto const t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = run();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        double const secs
            = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("criterion %d: %s  %s  (%.1f s)\n", id, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
