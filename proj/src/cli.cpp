#include "levy_euler/cli.hpp"

#include <algorithm>
#include <boost/version.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <Eigen/Core>

#include "CLI11.hpp"
#include "levy_euler/errors.hpp"

namespace levy_euler {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {
constexpr char const* kVersion = "0.1.0";
double const kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

Subcommand parse_subcommand(std::string const& s)
{
    if (s == "rate")
    {
        return Subcommand::rate;
    }
    if (s == "one-step")
    {
        return Subcommand::one_step;
    }
    if (s == "check-generator")
    {
        return Subcommand::check_generator;
    }
    if (s == "sample-stable")
    {
        return Subcommand::sample_stable;
    }
    throw DomainError("unknown subcommand '" + s
                      + "' (rate | one-step | check-generator | sample-stable)");
}

std::string to_string(Subcommand s)
{
    switch (s)
    {
        case Subcommand::rate:
            return "rate";
        case Subcommand::one_step:
            return "one-step";
        case Subcommand::check_generator:
            return "check-generator";
        case Subcommand::sample_stable:
            return "sample-stable";
    }
    return "rate";
}

std::string format_double(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

namespace {

//---------------------------------------------------------------------------//
class CsvWriter
{
  public:
    CsvWriter(fs::path const& path, std::vector<std::string> const& header)
        : out_(path, std::ios::binary)
    {
        if (!out_)
        {
            throw Error("cannot write '" + path.string() + "'");
        }
        row(header);
    }

    void row(std::vector<std::string> const& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

std::string cell(double v) { return format_double(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "true" : "false"; }

void write_json(fs::path const& path, json const& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void write_points(fs::path const& dir, std::vector<WeakErrorPoint> const& pts)
{
    CsvWriter csv(dir / "points.csv", {"delta", "estimate", "stderr", "n_paths", "excluded"});
    for (auto const& p : pts)
    {
        csv.row({cell(p.delta), cell(p.estimate), cell(p.std_error), cell(p.n_paths),
                 cell(p.excluded)});
    }
}

struct ReportRow
{
    double fitted_slope = kNaN;
    double ci_lo = kNaN;
    double ci_hi = kNaN;
    double theory_exponent = kNaN;
    std::string theory_label;
    bool pass = false;
};

void write_report(fs::path const& dir, ReportRow const& r)
{
    CsvWriter csv(dir / "report.csv",
                  {"fitted_slope", "ci_lo", "ci_hi", "theory_exponent", "theory_label", "pass"});
    csv.row({cell(r.fitted_slope), cell(r.ci_lo), cell(r.ci_hi), cell(r.theory_exponent),
             r.theory_label, cell(r.pass)});
}

std::vector<double> deltas_for(double T, std::vector<int> const& n)
{
    std::vector<double> out;
    for (int k : n)
    {
        out.push_back(T / k);
    }
    return out;
}

//---------------------------------------------------------------------------//
int run_rate(ExperimentConfig const& c, fs::path const& dir, json& diag)
{
    Experiment const exp = c.experiment();
    McOptions const mc = c.mc_options();
    RateLaw const law = c.theory();
    Functional fn;
    if (c.test.f)
    {
        fn = {Functional::Kind::running, make_test_function(*c.test.f)};
    }
    else
    {
        fn = {Functional::Kind::terminal, make_test_function(*c.test.g)};
    }
    double const delta_ref = c.model.T / c.grids.reference_steps();
    auto const points = weak_error_sweep(fn, exp, deltas_for(c.model.T, c.grids.n),
                                         delta_ref, mc, c.mc.seed);
    write_points(dir, points);

    ReportRow row;
    row.theory_exponent = law.exponent;
    row.theory_label = to_string(law.label);
    bool fitted = false;
    try
    {
        RateReport const rep = fit_rate(points, c.report.fit_model);
        fitted = true;
        row.fitted_slope = rep.fitted_slope;
        row.ci_lo = rep.ci_lo;
        row.ci_hi = rep.ci_hi;
        EnvelopeCheck const env = check_envelope(rep, law);
        diag["warnings"] = rep.warnings;
        diag["power_residual"] = rep.power_residual;
        diag["loglinear_residual"] = rep.loglinear_residual;
        diag["envelope_ok"] = env.ok;
        diag["envelope_constant"] = env.constant;
        diag["envelope_margin"] = env.margin;
        double const min_slope = c.report.min_slope.value_or(law.exponent - 0.15);
        diag["min_slope"] = min_slope;
        row.pass = env.ok && (!c.report.check_slope || rep.fitted_slope >= min_slope);
    }
    catch (DomainError const& e)
    {
        diag["fit_error"] = e.what();
    }
    if (c.report.mode == ReportMode::exactness)
    {
        row.pass = std::all_of(points.begin(), points.end(), [](auto const& p) {
            return std::abs(p.estimate) <= 3.0 * p.std_error;
        });
    }
    else if (!fitted)
    {
        row.pass = false;
    }
    write_report(dir, row);
    return row.pass ? 0 : 1;
}

int run_one_step(ExperimentConfig const& c, fs::path const& dir, json& diag)
{
    Experiment const exp = c.experiment();
    McOptions const mc = c.mc_options();
    FunctionSpec const spec = c.one_step.f ? *c.one_step.f
                                           : (c.test.g ? *c.test.g : *c.test.f);
    TestFunction const f = make_test_function(spec);
    OneStepSweep const sweep = one_step_sweep(f, exp, deltas_for(c.model.T, c.one_step.n),
                                              mc, c.mc.seed);
    std::vector<WeakErrorPoint> pts;
    json levels = json::array();
    for (auto const& l : sweep.levels)
    {
        pts.push_back({l.delta, l.max_over_s, l.stderr_at_max, l.n_paths, l.excluded});
        levels.push_back({{"delta", l.delta}, {"means", l.means}, {"stderrs", l.stderrs},
                          {"bound", l.bound}});
    }
    write_points(dir, pts);
    diag["levels"] = levels;

    ReportRow row;
    RateLaw const law = main_rate_law(c.model.alpha, f.declared_beta);
    row.theory_exponent = law.exponent;
    row.theory_label = to_string(law.label);
    row.fitted_slope = sweep.fitted_slope;
    try
    {
        RateReport const rep = fit_rate(pts);
        row.ci_lo = rep.ci_lo;
        row.ci_hi = rep.ci_hi;
    }
    catch (DomainError const& e)
    {
        diag["fit_error"] = e.what();
    }
    double const min_slope = c.one_step.min_slope.value_or(law.exponent - 0.15);
    diag["min_slope"] = min_slope;
    row.pass = sweep.fitted_slope >= min_slope;
    write_report(dir, row);
    return row.pass ? 0 : 1;
}

int run_generator(ExperimentConfig const& c, fs::path const& dir, json& diag)
{
    Experiment const exp = c.experiment();
    McOptions const mc = c.mc_options();
    FunctionSpec const spec = c.generator.u ? *c.generator.u
                                            : (c.test.g ? *c.test.g : *c.test.f);
    DeclaredFunction const u = make_declared_function(spec);
    GeneratorCheck const g = generator_consistency_check(u, exp, c.generator.h, mc,
                                                         c.mc.seed, c.generator.quadrature);
    std::vector<WeakErrorPoint> pts;
    for (std::size_t i = 0; i < g.h.size(); ++i)
    {
        pts.push_back({g.h[i], g.mc_estimate[i], g.mc_stderr[i], mc.n_paths, 0});
    }
    write_points(dir, pts);
    write_json(dir / "generator.json",
               {{"quadrature", g.quadrature},
                {"quadrature_error", g.quadrature_error},
                {"h", g.h},
                {"mc_estimate", g.mc_estimate},
                {"mc_stderr", g.mc_stderr},
                {"extrapolated", g.extrapolated},
                {"relative_error", number_or_null(g.relative_error)},
                {"relative_error_smallest_h", number_or_null(g.relative_error_smallest_h)},
                {"within_three_pooled", g.within_three_pooled}});
    ReportRow row;
    row.theory_label = "generator";
    // a vanishing quadrature value leaves no relative scale
    row.pass = g.quadrature == 0.0 ? g.within_three_pooled
                                   : g.relative_error <= c.generator.max_relative_error;
    diag["relative_error"] = number_or_null(g.relative_error);
    write_report(dir, row);
    return row.pass ? 0 : 1;
}

int run_sample(ExperimentConfig const& c, fs::path const& dir)
{
    StableIncrementSampler const sampler(c.driver());
    RandomStream rng(derive_key(c.mc.seed, "sample-stable", 0), 0);
    int const d = c.model.d;
    std::uint64_t const n = c.sample.n;
    double const kc = sampler.exponent_constant();
    // the unit law at time dt is U at time dt/kc
    double const run_dt = c.sample.scale == SampleScale::unit ? c.sample.dt / kc : c.sample.dt;
    std::vector<std::vector<double>> cols(d, std::vector<double>(n));
    std::vector<double> x(d);
    std::vector<std::string> header;
    for (int k = 0; k < d; ++k)
    {
        header.push_back("x" + std::to_string(k + 1));
    }
    {
        CsvWriter csv(dir / "samples.csv", header);
        std::vector<std::string> cells(d);
        for (std::uint64_t i = 0; i < n; ++i)
        {
            sampler.sample(run_dt, rng, x);
            for (int k = 0; k < d; ++k)
            {
                cols[k][i] = x[k];
                cells[k] = cell(x[k]);
            }
            csv.row(cells);
        }
    }
    json comps = json::array();
    for (int k = 0; k < d; ++k)
    {
        std::vector<double> v = cols[k];
        auto quantile = [&](double q) {
            auto const idx = static_cast<std::size_t>(q * static_cast<double>(n - 1));
            std::nth_element(v.begin(), v.begin() + idx, v.end());
            return v[idx];
        };
        double mean = 0.0;
        for (double t : cols[k])
        {
            mean += t;
        }
        mean /= static_cast<double>(n);
        comps.push_back({{"mean", mean},
                         {"q25", quantile(0.25)},
                         {"median", quantile(0.5)},
                         {"q75", quantile(0.75)}});
    }
    json cf = json::array();
    double const alpha = c.model.alpha;
    for (double xi : {0.25, 0.5, 1.0, 2.0})
    {
        Moments m;
        for (std::uint64_t i = 0; i < n; ++i)
        {
            m.add(std::cos(xi * cols[0][i]));
        }
        cf.push_back({{"xi", xi},
                      {"empirical", m.mean},
                      {"stderr", m.std_error_of_mean()},
                      {"theory", std::exp(-run_dt * kc * std::pow(xi, alpha))}});
    }
    write_json(dir / "moments.json", {{"n", n},
                                      {"dt", c.sample.dt},
                                      {"scale", c.sample.scale == SampleScale::unit ? "unit" : "driver"},
                                      {"alpha", alpha},
                                      {"d", d},
                                      {"exponent_constant", kc},
                                      {"components", comps},
                                      {"characteristic_function_e1", cf}});
    return 0;
}

json versions()
{
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    return {{"levy_euler", kVersion},
            {"compiler", __VERSION__},
            {"boost", BOOST_LIB_VERSION},
            {"eigen", eigen.str()},
            {"cli11", CLI11_VERSION},
            {"nlohmann_json",
             std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "."
                 + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "."
                 + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace

int run(Subcommand sub, ExperimentConfig const& config, fs::path const& out_dir)
{
    fs::create_directories(out_dir);
    auto const start = std::chrono::steady_clock::now();
    json diag = json::object();
    int status = 0;
    switch (sub)
    {
        case Subcommand::rate:
            status = run_rate(config, out_dir, diag);
            break;
        case Subcommand::one_step:
            status = run_one_step(config, out_dir, diag);
            break;
        case Subcommand::check_generator:
            status = run_generator(config, out_dir, diag);
            break;
        case Subcommand::sample_stable:
            status = run_sample(config, out_dir);
            break;
    }
    double const wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                            .count();
    write_json(out_dir / "meta.json", {{"subcommand", to_string(sub)},
                                       {"config", config_to_json(config)},
                                       {"seed", config.mc.seed},
                                       {"workers", config.mc.workers},
                                       {"versions", versions()},
                                       {"wall_time_s", wall},
                                       {"diagnostics", diag}});
    return status;
}

namespace {

template<class T>
std::optional<T> env_number(char const* name)
{
    char const* v = std::getenv(name);
    if (!v || !*v)
    {
        return std::nullopt;
    }
    T out{};
    std::string_view const s(v);
    auto const r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    {
        throw ConfigError({std::string(name) + ": not a valid number '" + v + "'"});
    }
    return out;
}

void write_error(fs::path const& dir, std::exception const& e)
{
    json j;
    j["message"] = e.what();
    if (auto const* ce = dynamic_cast<ConfigError const*>(&e))
    {
        j["type"] = "config";
        j["violations"] = ce->violations();
    }
    else if (auto const* de = dynamic_cast<DegeneracyError const*>(&e))
    {
        j["type"] = "degeneracy";
        j["point"] = de->point();
        j["determinant"] = de->determinant();
    }
    else if (auto const* qe = dynamic_cast<QuadratureError const*>(&e))
    {
        j["type"] = "quadrature";
        j["achieved_error"] = number_or_null(qe->achieved_error());
    }
    else if (dynamic_cast<DomainError const*>(&e))
    {
        j["type"] = "domain";
    }
    else
    {
        j["type"] = "runtime";
    }
    try
    {
        fs::create_directories(dir);
        write_json(dir / "error.json", j);
    }
    catch (std::exception const&)
    {
    }
}

}  // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"Weak Euler scheme for stable-driven SDEs with Lévy jumps", "levy-euler"};
    std::string sub;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    app.add_option("subcommand", sub, "rate | one-step | check-generator | sample-stable")
        ->required()
        ->check(CLI::IsMember({"rate", "one-step", "check-generator", "sample-stable"}));
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--seed", seed, "master seed");
    app.add_option("--workers", workers, "worker threads (0: OpenMP default)");
    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try
    {
        ExperimentConfig cfg = parse_config(config_path);
        if (auto s = env_number<std::uint64_t>("LEVY_EULER_SEED"))
        {
            cfg.mc.seed = *s;
        }
        if (auto w = env_number<int>("LEVY_EULER_WORKERS"))
        {
            cfg.mc.workers = *w;
        }
        if (seed)
        {
            cfg.mc.seed = *seed;
        }
        if (workers)
        {
            cfg.mc.workers = *workers;
        }
        if (cfg.mc.workers < 0)
        {
            throw ConfigError({"workers: must be >= 0"});
        }
        return run(parse_subcommand(sub), cfg, out_dir);
    }
    catch (std::exception const& e)
    {
        std::cerr << "levy-euler: " << e.what() << '\n';
        write_error(out_dir, e);
        return 2;
    }
}

}  // namespace levy_euler
