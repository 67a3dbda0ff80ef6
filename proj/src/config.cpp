#include "levy_euler/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "levy_euler/errors.hpp"

namespace levy_euler {

using nlohmann::json;

//---------------------------------------------------------------------------//
TestFunction make_test_function(FunctionSpec const& s)
{
    TestFunction t;
    if (s.family == "gaussian-mixture")
    {
        int const dim = s.weights.empty()
                            ? 1
                            : static_cast<int>(s.centers.size() / s.weights.size());
        t = gaussian_mixture(dim, s.weights, s.centers, s.widths);
    }
    else if (s.family == "radial-power")
    {
        t = radial_power(s.center, s.power, s.r1, s.r2);
    }
    else if (s.family == "weierstrass")
    {
        t = weierstrass_function(s.wavevector, s.base, s.beta, s.terms, s.phase);
    }
    else if (s.family == "plane-wave")
    {
        t = plane_wave(s.wavevector, s.amplitude, s.phase);
    }
    else if (s.family == "constant")
    {
        t = constant_function(s.value);
    }
    else
    {
        throw DomainError("unknown test function family '" + s.family
                          + "' (gaussian-mixture | radial-power | weierstrass | "
                            "plane-wave | constant)");
    }
    t.offset += s.offset;
    return t;
}

DeclaredFunction make_declared_function(FunctionSpec const& s)
{
    TestFunction const t = make_test_function(s);
    DeclaredFunction u;
    u.u = [t](std::span<double const> x) { return t(x); };
    double const sup = t.sup_bound + std::abs(t.offset);
    if (s.family == "plane-wave" && s.offset == 0.0)
    {
        u.growth = PlaneWaveGrowth{std::abs(s.amplitude), s.wavevector};
    }
    else if (s.family == "radial-power" && s.offset == 0.0)
    {
        u.growth = CompactSupportGrowth{sup, s.center, s.r2};
    }
    else
    {
        u.growth = BoundedGrowth{sup};
    }
    return u;
}

int GridBlock::reference_steps() const
{
    if (n_ref > 0)
    {
        return n_ref;
    }
    int const mx = n.empty() ? 1 : *std::max_element(n.begin(), n.end());
    return 16 * mx;
}

//---------------------------------------------------------------------------//
StableDriverSpec ExperimentConfig::driver() const
{
    StableDriverSpec s;
    s.alpha = model.alpha;
    s.dim = model.d;
    s.wiener = model.wiener;
    return s;
}

LevyMeasureSpec ExperimentConfig::jumps() const
{
    LevyMeasureSpec s;
    s.rate = z.rate;
    s.jump = z.jump;
    s.tail_moment_order = z.mu;
    s.driver_alpha = model.alpha;
    s.dim = model.m;
    return s;
}

CoefficientField ExperimentConfig::field() const
{
    FieldParams p = model.params;
    p.dim = model.d;
    p.noise_dim = model.m;
    return builtin_field(model.field, p);
}

Experiment ExperimentConfig::experiment() const
{
    return Experiment{field(), driver(), jumps(), model.x0, model.T};
}

McOptions ExperimentConfig::mc_options() const
{
    McOptions o;
    o.n_paths = mc.n_paths;
    o.workers = mc.workers;
    o.max_excluded_fraction = mc.max_excluded_fraction;
    return o;
}

RateLaw ExperimentConfig::theory() const
{
    return theoretical_law(model.alpha, test.beta, z.mu, variant);
}

//---------------------------------------------------------------------------//
namespace {

//! Typed access to one JSON object that records violations instead of
//! throwing, and flags keys it was never asked about.
class Reader
{
  public:
    Reader(json const* j, std::string path, std::vector<std::string>* errs)
        : j_(j), path_(std::move(path)), errs_(errs)
    {
        if (j_ && !j_->is_object())
        {
            fail("expected an object");
            j_ = nullptr;
        }
    }

    bool present() const { return j_ != nullptr; }

    bool has(std::string const& key)
    {
        seen_.insert(key);
        return j_ && j_->contains(key) && !(*j_)[key].is_null();
    }

    template<class T>
    T get(std::string const& key, T fallback)
    {
        if (!has(key))
        {
            return fallback;
        }
        try
        {
            return (*j_)[key].template get<T>();
        }
        catch (json::exception const&)
        {
            fail(key + ": wrong type");
            return fallback;
        }
    }

    template<class T>
    std::optional<T> optional(std::string const& key)
    {
        if (!has(key))
        {
            return std::nullopt;
        }
        return get<T>(key, T{});
    }

    template<class T>
    T require(std::string const& key)
    {
        if (!has(key))
        {
            fail(key + ": required");
            return T{};
        }
        return get<T>(key, T{});
    }

    Reader child(std::string const& key)
    {
        seen_.insert(key);
        json const* c = (j_ && j_->contains(key) && !(*j_)[key].is_null())
                            ? &(*j_)[key] : nullptr;
        return Reader(c, path_ + key + ".", errs_);
    }

    void fail(std::string const& msg) const { errs_->push_back(path_ + msg); }

    void finish() const
    {
        if (!j_)
        {
            return;
        }
        for (auto const& [key, value] : j_->items())
        {
            if (!seen_.count(key))
            {
                fail(key + ": unknown key");
            }
        }
    }

  private:
    json const* j_;
    std::string path_;
    std::vector<std::string>* errs_;
    std::set<std::string> seen_;
};

FunctionSpec read_function(Reader r)
{
    FunctionSpec s;
    s.family = r.require<std::string>("family");
    s.center = r.get("center", s.center);
    s.wavevector = r.get("wavevector", s.wavevector);
    s.weights = r.get("weights", s.weights);
    s.centers = r.get("centers", s.centers);
    s.widths = r.get("widths", s.widths);
    s.power = r.get("power", s.power);
    s.r1 = r.get("r1", s.r1);
    s.r2 = r.get("r2", s.r2);
    s.base = r.get("base", s.base);
    s.beta = r.get("beta", s.beta);
    s.terms = r.get("terms", s.terms);
    s.amplitude = r.get("amplitude", s.amplitude);
    s.phase = r.get("phase", s.phase);
    s.value = r.get("value", s.value);
    s.offset = r.get("offset", s.offset);
    r.finish();
    return s;
}

json write_function(FunctionSpec const& s)
{
    json j;
    j["family"] = s.family;
    if (s.family == "gaussian-mixture")
    {
        j["weights"] = s.weights;
        j["centers"] = s.centers;
        j["widths"] = s.widths;
    }
    else if (s.family == "radial-power")
    {
        j["center"] = s.center;
        j["power"] = s.power;
        j["r1"] = s.r1;
        j["r2"] = s.r2;
    }
    else if (s.family == "weierstrass")
    {
        j["wavevector"] = s.wavevector;
        j["base"] = s.base;
        j["beta"] = s.beta;
        j["terms"] = s.terms;
        j["phase"] = s.phase;
    }
    else if (s.family == "plane-wave")
    {
        j["wavevector"] = s.wavevector;
        j["amplitude"] = s.amplitude;
        j["phase"] = s.phase;
    }
    else
    {
        j["value"] = s.value;
    }
    j["offset"] = s.offset;
    return j;
}

JumpDistribution read_jump(Reader r)
{
    std::string const type = r.require<std::string>("type");
    if (type == "atoms")
    {
        AtomJumps a;
        a.points = r.require<std::vector<std::vector<double>>>("points");
        a.probabilities = r.require<std::vector<double>>("probabilities");
        r.finish();
        return a;
    }
    if (type == "gaussian")
    {
        GaussianJumps g;
        g.mean = r.require<std::vector<double>>("mean");
        g.covariance = r.require<std::vector<double>>("covariance");
        r.finish();
        return g;
    }
    if (type == "bounded-pareto")
    {
        BoundedParetoJumps p;
        p.tail_index = r.get("tail_index", p.tail_index);
        p.lower = r.get("lower", p.lower);
        p.upper = r.get("upper", p.upper);  // null: unbounded
        p.direction_mixing = r.get("direction_mixing", p.direction_mixing);
        r.finish();
        return p;
    }
    if (!type.empty())
    {
        r.fail("type: unknown jump law '" + type + "' (atoms | gaussian | bounded-pareto)");
    }
    r.finish();
    return AtomJumps{{{0.0}}, {1.0}};
}

json write_jump(JumpDistribution const& jd)
{
    json j;
    if (auto const* a = std::get_if<AtomJumps>(&jd))
    {
        j["type"] = "atoms";
        j["points"] = a->points;
        j["probabilities"] = a->probabilities;
    }
    else if (auto const* g = std::get_if<GaussianJumps>(&jd))
    {
        j["type"] = "gaussian";
        j["mean"] = g->mean;
        j["covariance"] = g->covariance;
    }
    else
    {
        auto const& p = std::get<BoundedParetoJumps>(jd);
        j["type"] = "bounded-pareto";
        j["tail_index"] = p.tail_index;
        j["lower"] = p.lower;
        j["upper"] = std::isinf(p.upper) ? json(nullptr) : json(p.upper);
        j["direction_mixing"] = p.direction_mixing;
    }
    return j;
}

ScalarProfile read_profile(Reader r)
{
    ScalarProfile p;
    p.wavevector = r.get("wavevector", p.wavevector);
    p.omega = r.get("omega", p.omega);
    p.phase = r.get("phase", p.phase);
    p.shift = r.get("shift", p.shift);
    p.beta = r.get("beta", p.beta);
    p.base = r.get("base", p.base);
    p.terms = r.get("terms", p.terms);
    r.finish();
    return p;
}

json write_profile(ScalarProfile const& p)
{
    return json{{"wavevector", p.wavevector}, {"omega", p.omega}, {"phase", p.phase},
                {"shift", p.shift},           {"beta", p.beta},   {"base", p.base},
                {"terms", p.terms}};
}

std::string wiener_name(WienerNormalization w)
{
    return w == WienerNormalization::standard ? "standard" : "exponent-limit";
}

bool all_zero(std::vector<double> const& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

template<class T>
bool all_positive(std::vector<T> const& v)
{
    return std::all_of(v.begin(), v.end(), [](T x) { return x > 0; });
}

void validate(ExperimentConfig const& c, std::vector<std::string>& errs)
{
    auto const& m = c.model;
    bool model_ok = true;
    if (!(m.alpha > 0.0 && m.alpha <= 2.0))
    {
        errs.push_back("model.alpha: must satisfy 0 < α ≤ 2");
        model_ok = false;
    }
    if (m.d < 1 || m.d > 3)
    {
        errs.push_back("model.d: must be 1, 2 or 3");
        model_ok = false;
    }
    if (m.m < 1)
    {
        errs.push_back("model.m: must be >= 1");
        model_ok = false;
    }
    if (static_cast<int>(m.x0.size()) != m.d)
    {
        errs.push_back("model.x0: length must equal d");
        model_ok = false;
    }
    if (!(m.T > 0.0))
    {
        errs.push_back("model.T: must be > 0");
        model_ok = false;
    }
    if (m.alpha < 1.0)
    {
        bool const drift = !all_zero(m.params.a_base)
                           || (m.params.perturb_a && !all_zero(m.params.a_amplitude)
                               && m.field != "constant");
        if (drift)
        {
            errs.push_back("model.field: a must be zero for α ∈ (0,1)");
        }
    }
    CoefficientField field;
    bool field_ok = false;
    if (model_ok)
    {
        try
        {
            field = c.field();
            field_ok = true;
        }
        catch (Error const& e)
        {
            errs.push_back(std::string("model.field: ") + e.what());
        }
    }

    if (!(c.z.rate >= 0.0))
    {
        errs.push_back("z.rate: must be >= 0");
    }
    if (!(c.z.mu > 0.0))
    {
        errs.push_back("z.mu: must be > 0");
    }
    if (model_ok)
    {
        try
        {
            LevyMeasureSpec const z = c.jumps();
            z.validate();
            moment_report(z, m.alpha, c.z.mu);
        }
        catch (Error const& e)
        {
            errs.push_back(std::string("z: ") + e.what());
        }
    }

    // hypothesis gate of the selected variant
    try
    {
        c.theory();
    }
    catch (Error const& e)
    {
        errs.push_back(std::string("variant ") + to_string(c.variant) + ": " + e.what());
    }
    if (field_ok)
    {
        double const reg = std::min({field.beta_a, field.beta_b, field.beta_g});
        if (c.test.beta > reg)
        {
            std::ostringstream os;
            os << "test.beta: β = " << c.test.beta
               << " exceeds the coefficient regularity " << reg;
            errs.push_back(os.str());
        }
    }

    auto check_function = [&](FunctionSpec const& s, std::string const& where,
                              double need_beta) {
        try
        {
            TestFunction const t = make_test_function(s);
            if (t.core)
            {
                std::vector<double> probe(m.d, 0.0);
                if (model_ok)
                {
                    probe = m.x0;
                }
                (void)t(probe);
            }
            if (t.declared_beta < need_beta - 1e-12)
            {
                std::ostringstream os;
                os << where << ": regularity " << t.declared_beta
                   << " below the required C^{α+β} = " << need_beta;
                errs.push_back(os.str());
            }
        }
        catch (std::exception const& e)
        {
            errs.push_back(where + ": " + e.what());
        }
    };
    if (!c.test.g && !c.test.f)
    {
        errs.push_back("test: exactly one of g (terminal) or f (running) is required");
    }
    if (c.test.g && c.test.f)
    {
        errs.push_back("test: exactly one of g (terminal) or f (running) is allowed, not both");
    }
    if (c.test.g)
    {
        check_function(*c.test.g, "test.g", m.alpha + c.test.beta);
    }
    if (c.test.f)
    {
        check_function(*c.test.f, "test.f", m.alpha + c.test.beta);
    }
    if (c.one_step.f)
    {
        check_function(*c.one_step.f, "one_step.f", 0.0);
    }
    if (c.generator.u)
    {
        check_function(*c.generator.u, "generator.u", 0.0);
    }

    auto const& g = c.grids;
    if (g.n.empty() || !all_positive(g.n))
    {
        errs.push_back("grids.n: need a nonempty list of positive step counts");
    }
    else if (g.n_ref < 0)
    {
        errs.push_back("grids.n_ref: must be >= 0");
    }
    else
    {
        int const mx = *std::max_element(g.n.begin(), g.n.end());
        if (g.reference_steps() < 16 * mx)
        {
            errs.push_back("grids.n_ref: δ_ref ≤ δ/16 requires n_ref >= 16 · max n");
        }
    }
    if (c.mc.n_paths < 2)
    {
        errs.push_back("mc.n_paths: must be >= 2");
    }
    if (c.mc.workers < 0)
    {
        errs.push_back("mc.workers: must be >= 0");
    }
    if (!(c.mc.max_excluded_fraction >= 0.0 && c.mc.max_excluded_fraction <= 1.0))
    {
        errs.push_back("mc.max_excluded_fraction: must lie in [0, 1]");
    }
    if (c.one_step.n.size() < 2 || !all_positive(c.one_step.n))
    {
        errs.push_back("one_step.n: need at least two positive step counts");
    }
    if (c.generator.h.empty() || !all_positive(c.generator.h))
    {
        errs.push_back("generator.h: need a nonempty list of positive steps");
    }
    if (!(c.generator.max_relative_error > 0.0))
    {
        errs.push_back("generator.max_relative_error: must be > 0");
    }
    if (c.sample.n < 1)
    {
        errs.push_back("sample.n: must be >= 1");
    }
    if (!(c.sample.dt > 0.0))
    {
        errs.push_back("sample.dt: must be > 0");
    }
}

}  // namespace

//---------------------------------------------------------------------------//
ExperimentConfig config_from_json(json const& j)
{
    std::vector<std::string> errs;
    ExperimentConfig c;
    Reader root(&j, "", &errs);
    if (!root.present())
    {
        throw ConfigError(errs);
    }

    std::string const variant = root.get<std::string>("variant", "main");
    try
    {
        c.variant = parse_variant(variant);
    }
    catch (Error const& e)
    {
        errs.push_back(std::string("variant: ") + e.what());
    }

    {
        Reader r = root.child("model");
        auto& m = c.model;
        m.alpha = r.require<double>("alpha");
        m.d = r.get("d", m.d);
        m.m = r.get("m", m.m);
        m.x0 = r.get("x0", std::vector<double>(std::max(m.d, 1), 0.0));
        m.T = r.get("T", m.T);
        std::string const w = r.get<std::string>("wiener_normalization", "exponent-limit");
        if (w == "standard")
        {
            m.wiener = WienerNormalization::standard;
        }
        else if (w != "exponent-limit")
        {
            r.fail("wiener_normalization: expected standard | exponent-limit");
        }
        Reader f = r.child("field");
        m.field = f.get<std::string>("name", m.field);
        auto& p = m.params;
        p.a_base = f.get("a_base", p.a_base);
        p.b_base = f.get("b_base", p.b_base);
        p.g_base = f.get("g_base", p.g_base);
        p.a_amplitude = f.get("a_amplitude", p.a_amplitude);
        p.b_amplitude = f.get("b_amplitude", p.b_amplitude);
        p.g_amplitude = f.get("g_amplitude", p.g_amplitude);
        p.perturb_a = f.get("perturb_a", p.perturb_a);
        p.perturb_b = f.get("perturb_b", p.perturb_b);
        p.perturb_g = f.get("perturb_g", p.perturb_g);
        p.c1 = f.get("c1", p.c1);
        p.profile = read_profile(f.child("profile"));
        f.finish();
        r.finish();
    }
    {
        Reader r = root.child("z");
        c.z.rate = r.get("rate", c.z.rate);
        c.z.mu = r.require<double>("mu");
        Reader jr = r.child("jump");
        if (jr.present())
        {
            c.z.jump = read_jump(jr);
        }
        else
        {
            c.z.jump = AtomJumps{{std::vector<double>(std::max(c.model.m, 1), 0.0)}, {1.0}};
        }
        r.finish();
    }
    {
        Reader r = root.child("test");
        c.test.beta = r.require<double>("beta");
        if (Reader g = r.child("g"); g.present())
        {
            c.test.g = read_function(g);
        }
        if (Reader f = r.child("f"); f.present())
        {
            c.test.f = read_function(f);
        }
        r.finish();
    }
    {
        Reader r = root.child("grids");
        c.grids.n = r.get("n", c.grids.n);
        c.grids.n_ref = r.get("n_ref", c.grids.n_ref);
        r.finish();
    }
    {
        Reader r = root.child("mc");
        c.mc.n_paths = r.get("n_paths", c.mc.n_paths);
        c.mc.seed = r.get("seed", c.mc.seed);
        c.mc.workers = r.get("workers", c.mc.workers);
        c.mc.max_excluded_fraction = r.get("max_excluded_fraction", c.mc.max_excluded_fraction);
        r.finish();
    }
    {
        Reader r = root.child("report");
        std::string const mode = r.get<std::string>("mode", "rate");
        if (mode == "exactness")
        {
            c.report.mode = ReportMode::exactness;
        }
        else if (mode != "rate")
        {
            r.fail("mode: expected rate | exactness");
        }
        c.report.min_slope = r.optional<double>("min_slope");
        c.report.check_slope = r.get("check_slope", c.report.check_slope);
        std::string const fit = r.get<std::string>("fit_model", "power");
        if (fit == "log-linear")
        {
            c.report.fit_model = FitModel::log_linear;
        }
        else if (fit != "power")
        {
            r.fail("fit_model: expected power | log-linear");
        }
        r.finish();
    }
    {
        Reader r = root.child("one_step");
        if (Reader f = r.child("f"); f.present())
        {
            c.one_step.f = read_function(f);
        }
        c.one_step.n = r.get("n", c.one_step.n);
        c.one_step.min_slope = r.optional<double>("min_slope");
        r.finish();
    }
    {
        Reader r = root.child("generator");
        if (Reader u = r.child("u"); u.present())
        {
            c.generator.u = read_function(u);
        }
        c.generator.h = r.get("h", c.generator.h);
        c.generator.max_relative_error = r.get("max_relative_error",
                                               c.generator.max_relative_error);
        Reader q = r.child("quadrature");
        auto& qs = c.generator.quadrature;
        qs.inner_radius = q.get("inner_radius", qs.inner_radius);
        qs.radial_nodes = q.get("radial_nodes", qs.radial_nodes);
        qs.angular_nodes = q.get("angular_nodes", qs.angular_nodes);
        qs.outer_cutoff = q.get("outer_cutoff", qs.outer_cutoff);
        qs.tolerance = q.get("tolerance", qs.tolerance);
        qs.inner_cutoff = q.get("inner_cutoff", qs.inner_cutoff);
        qs.max_panel_width = q.get("max_panel_width", qs.max_panel_width);
        qs.max_outer_cutoff = q.get("max_outer_cutoff", qs.max_outer_cutoff);
        qs.fd_step = q.get("fd_step", qs.fd_step);
        qs.estimate_error = q.get("estimate_error", qs.estimate_error);
        q.finish();
        r.finish();
    }
    {
        Reader r = root.child("sample");
        c.sample.n = r.get("n", c.sample.n);
        c.sample.dt = r.get("dt", c.sample.dt);
        std::string const scale = r.get<std::string>("scale", "unit");
        if (scale == "driver")
        {
            c.sample.scale = SampleScale::driver;
        }
        else if (scale != "unit")
        {
            r.fail("scale: expected unit | driver");
        }
        r.finish();
    }
    root.finish();

    if (errs.empty())
    {
        validate(c, errs);
    }
    if (!errs.empty())
    {
        throw ConfigError(errs);
    }
    return c;
}

ExperimentConfig parse_config(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError({"cannot open config file '" + path.string() + "'"});
    }
    json j;
    try
    {
        j = json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    return config_from_json(j);
}

json config_to_json(ExperimentConfig const& c)
{
    json j;
    j["variant"] = to_string(c.variant);
    auto const& m = c.model;
    auto const& p = m.params;
    j["model"] = {
        {"alpha", m.alpha},
        {"d", m.d},
        {"m", m.m},
        {"x0", m.x0},
        {"T", m.T},
        {"wiener_normalization", wiener_name(m.wiener)},
        {"field",
         {{"name", m.field},
          {"a_base", p.a_base},
          {"b_base", p.b_base},
          {"g_base", p.g_base},
          {"a_amplitude", p.a_amplitude},
          {"b_amplitude", p.b_amplitude},
          {"g_amplitude", p.g_amplitude},
          {"perturb_a", p.perturb_a},
          {"perturb_b", p.perturb_b},
          {"perturb_g", p.perturb_g},
          {"c1", p.c1},
          {"profile", write_profile(p.profile)}}}};
    j["z"] = {{"rate", c.z.rate}, {"mu", c.z.mu}, {"jump", write_jump(c.z.jump)}};
    json test = {{"beta", c.test.beta}};
    if (c.test.g)
    {
        test["g"] = write_function(*c.test.g);
    }
    if (c.test.f)
    {
        test["f"] = write_function(*c.test.f);
    }
    j["test"] = test;
    j["grids"] = {{"n", c.grids.n}, {"n_ref", c.grids.n_ref}};
    j["mc"] = {{"n_paths", c.mc.n_paths},
               {"seed", c.mc.seed},
               {"workers", c.mc.workers},
               {"max_excluded_fraction", c.mc.max_excluded_fraction}};
    j["report"] = {
        {"mode", c.report.mode == ReportMode::exactness ? "exactness" : "rate"},
        {"min_slope", c.report.min_slope ? json(*c.report.min_slope) : json(nullptr)},
        {"check_slope", c.report.check_slope},
        {"fit_model", c.report.fit_model == FitModel::log_linear ? "log-linear" : "power"}};
    json one = {{"n", c.one_step.n},
                {"min_slope", c.one_step.min_slope ? json(*c.one_step.min_slope)
                                                   : json(nullptr)}};
    if (c.one_step.f)
    {
        one["f"] = write_function(*c.one_step.f);
    }
    j["one_step"] = one;
    auto const& q = c.generator.quadrature;
    json gen = {{"h", c.generator.h},
                {"max_relative_error", c.generator.max_relative_error},
                {"quadrature",
                 {{"inner_radius", q.inner_radius},
                  {"radial_nodes", q.radial_nodes},
                  {"angular_nodes", q.angular_nodes},
                  {"outer_cutoff", q.outer_cutoff},
                  {"tolerance", q.tolerance},
                  {"inner_cutoff", q.inner_cutoff},
                  {"max_panel_width", q.max_panel_width},
                  {"max_outer_cutoff", q.max_outer_cutoff},
                  {"fd_step", q.fd_step},
                  {"estimate_error", q.estimate_error}}}};
    if (c.generator.u)
    {
        gen["u"] = write_function(*c.generator.u);
    }
    j["generator"] = gen;
    j["sample"] = {{"n", c.sample.n},
                   {"dt", c.sample.dt},
                   {"scale", c.sample.scale == SampleScale::unit ? "unit" : "driver"}};
    return j;
}

}  // namespace levy_euler
