#include "levy_euler/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "levy_euler/errors.hpp"

namespace levy_euler {

namespace {
double euclid(std::span<double const> v)
{
    double s = 0.0;
    for (double x : v)
    {
        s += x * x;
    }
    return std::sqrt(s);
}

bool all_zero(std::vector<double> const& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double dot(std::span<double const> k, std::span<double const> x)
{
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i)
    {
        s += k[i] * x[i];
    }
    return s;
}

double signed_determinant(std::span<double const> m, int n)
{
    if (n == 1)
    {
        return m[0];
    }
    if (n == 2)
    {
        return m[0] * m[3] - m[1] * m[2];
    }
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> const>
        mat(m.data(), n, n);
    return mat.partialPivLu().determinant();
}

std::string format_point(std::span<double const> x)
{
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        os << (i ? ", " : "") << x[i];
    }
    os << ")";
    return os.str();
}

void fill_default(std::vector<double>& v, std::size_t n, double diag_of, int cols)
{
    if (v.empty())
    {
        v.assign(n, 0.0);
        if (diag_of != 0.0)
        {
            for (int i = 0; i < cols; ++i)
            {
                v[i * cols + i] = diag_of;
            }
        }
    }
}
}  // namespace

//---------------------------------------------------------------------------//
std::vector<double> CoefficientField::a(std::span<double const> x) const
{
    std::vector<double> av(dim), bv(dim * dim), gv(dim * noise_dim);
    eval(x, av, bv, gv);
    return av;
}

std::vector<double> CoefficientField::b(std::span<double const> x) const
{
    std::vector<double> av(dim), bv(dim * dim), gv(dim * noise_dim);
    eval(x, av, bv, gv);
    return bv;
}

std::vector<double> CoefficientField::g(std::span<double const> x) const
{
    std::vector<double> av(dim), bv(dim * dim), gv(dim * noise_dim);
    eval(x, av, bv, gv);
    return gv;
}

CoefficientField CoefficientField::frozen_at(std::span<double const> x0) const
{
    std::vector<double> av(dim), bv(dim * dim), gv(dim * noise_dim);
    eval(x0, av, bv, gv);
    CoefficientField out = constant_field(dim, noise_dim, av, bv, gv);
    return out;
}

CoefficientField constant_field(int dim, int noise_dim, std::vector<double> a,
                                std::vector<double> b, std::vector<double> g)
{
    if (dim < 1 || noise_dim < 1)
    {
        throw DomainError("constant field: dimensions must be >= 1");
    }
    if (static_cast<int>(a.size()) != dim || static_cast<int>(b.size()) != dim * dim
        || static_cast<int>(g.size()) != dim * noise_dim)
    {
        throw DomainError("constant field: coefficient shapes do not match (d, m)");
    }
    CoefficientField f;
    f.dim = dim;
    f.noise_dim = noise_dim;
    f.bound_a = euclid(a);
    f.bound_b = euclid(b);
    f.bound_g = euclid(g);
    f.c1 = abs_determinant(b, dim);
    f.drift_zero = all_zero(a);
    f.eval = [a, b, g](std::span<double const>, std::span<double> ao,
                       std::span<double> bo, std::span<double> go) {
        std::copy(a.begin(), a.end(), ao.begin());
        std::copy(b.begin(), b.end(), bo.begin());
        std::copy(g.begin(), g.end(), go.begin());
    };
    return f;
}

//---------------------------------------------------------------------------//
double weierstrass_sum(double t, double base, double beta, int terms,
                       double phase)
{
    double const decay = std::pow(base, -beta);
    double amp = 1.0;
    double sum = 0.0;
    double const rb = std::round(base);
    if (rb == base && base >= 2.0 && base <= 8.0)
    {
        // integer base: e^{i b^j t} by repeated powering; the modulus drifts by
        // about base^terms ulps, far below the truncation of the series
        int const ib = static_cast<int>(rb);
        double const cp = std::cos(phase);
        double const sp = std::sin(phase);
        double zr = std::cos(t);
        double zi = std::sin(t);
        for (int j = 0; j < terms; ++j)
        {
            sum += amp * (zr * cp - zi * sp);
            amp *= decay;
            double pr = zr;
            double pi = zi;
            for (int k = 1; k < ib; ++k)
            {
                double const r = pr * zr - pi * zi;
                pi = pr * zi + pi * zr;
                pr = r;
            }
            zr = pr;
            zi = pi;
        }
        return sum;
    }
    double freq = 1.0;
    for (int j = 0; j < terms; ++j)
    {
        sum += amp * std::cos(freq * t + phase);
        amp *= decay;
        freq *= base;
    }
    return sum;
}

double ScalarProfile::operator()(std::span<double const> x) const
{
    switch (kind)
    {
        case Kind::zero:
            return 0.0;
        case Kind::sine:
            return std::sin(omega * dot(wavevector, x) + phase);
        case Kind::tanh:
            return std::tanh(dot(wavevector, x) + shift);
        case Kind::weierstrass:
            return weierstrass_sum(dot(wavevector, x), base, beta, terms, phase);
    }
    return 0.0;
}

double ScalarProfile::sup() const
{
    switch (kind)
    {
        case Kind::zero:
            return 0.0;
        case Kind::sine:
        case Kind::tanh:
            return 1.0;
        case Kind::weierstrass: {
            double const r = std::pow(base, -beta);
            return (1.0 - std::pow(r, terms)) / (1.0 - r);
        }
    }
    return 0.0;
}

double ScalarProfile::regularity() const
{
    return kind == Kind::weierstrass ? beta : kSmooth;
}

CoefficientField builtin_field(std::string const& name, FieldParams p)
{
    int const d = p.dim;
    int const m = p.noise_dim;
    if (d < 1 || m < 1)
    {
        throw DomainError("builtin field: dimensions must be >= 1");
    }
    using Kind = ScalarProfile::Kind;
    if (name == "constant")
    {
        p.profile.kind = Kind::zero;
    }
    else if (name == "sinusoidal")
    {
        p.profile.kind = Kind::sine;
    }
    else if (name == "affine-bounded")
    {
        p.profile.kind = Kind::tanh;
    }
    else if (name == "hoelder-perturbed")
    {
        p.profile.kind = Kind::weierstrass;
        if (!(p.profile.beta > 0.0 && p.profile.beta < 1.0))
        {
            throw DomainError("hoelder-perturbed: beta must lie in (0, 1)");
        }
        if (!(p.profile.base > 1.0) || p.profile.terms < 1)
        {
            throw DomainError("hoelder-perturbed: need base > 1 and terms >= 1");
        }
    }
    else
    {
        throw DomainError("unknown coefficient field '" + name
                          + "' (catalog: constant, sinusoidal, affine-bounded, "
                            "hoelder-perturbed)");
    }
    if (p.profile.wavevector.empty())
    {
        p.profile.wavevector.assign(d, 0.0);
        p.profile.wavevector[0] = 1.0;
    }
    if (static_cast<int>(p.profile.wavevector.size()) != d)
    {
        throw DomainError("builtin field: wavevector length != d");
    }
    fill_default(p.a_base, d, 0.0, 0);
    fill_default(p.b_base, d * d, 1.0, d);
    fill_default(p.g_base, d * m, 0.0, 0);
    fill_default(p.a_amplitude, d, 0.0, 0);
    fill_default(p.b_amplitude, d * d, 0.0, 0);
    fill_default(p.g_amplitude, d * m, 0.0, 0);
    if (static_cast<int>(p.a_base.size()) != d || static_cast<int>(p.a_amplitude.size()) != d
        || static_cast<int>(p.b_base.size()) != d * d
        || static_cast<int>(p.b_amplitude.size()) != d * d
        || static_cast<int>(p.g_base.size()) != d * m
        || static_cast<int>(p.g_amplitude.size()) != d * m)
    {
        throw DomainError("builtin field: coefficient shapes do not match (d, m)");
    }
    bool const has_profile = p.profile.kind != Kind::zero;
    bool const pa = has_profile && p.perturb_a && !all_zero(p.a_amplitude);
    bool const pb = has_profile && p.perturb_b && !all_zero(p.b_amplitude);
    bool const pg = has_profile && p.perturb_g && !all_zero(p.g_amplitude);
    double const s_sup = p.profile.sup();

    CoefficientField f;
    f.dim = d;
    f.noise_dim = m;
    f.beta_a = pa ? p.profile.regularity() : kSmooth;
    f.beta_b = pb ? p.profile.regularity() : kSmooth;
    f.beta_g = pg ? p.profile.regularity() : kSmooth;
    f.bound_a = euclid(p.a_base) + (pa ? euclid(p.a_amplitude) * s_sup : 0.0);
    f.bound_b = euclid(p.b_base) + (pb ? euclid(p.b_amplitude) * s_sup : 0.0);
    f.bound_g = euclid(p.g_base) + (pg ? euclid(p.g_amplitude) * s_sup : 0.0);
    f.drift_zero = all_zero(p.a_base) && !pa;

    // det b = polynomial in s; scan s over its range
    int const scan = pb ? 4001 : 1;
    double certified = std::numeric_limits<double>::infinity();
    double first_sign = 0.0;
    std::vector<double> bs(d * d);
    for (int i = 0; i < scan; ++i)
    {
        double const s = scan == 1 ? 0.0 : -s_sup + 2.0 * s_sup * i / (scan - 1);
        for (int k = 0; k < d * d; ++k)
        {
            bs[k] = p.b_base[k] + (pb ? p.b_amplitude[k] * s : 0.0);
        }
        double const det = signed_determinant(bs, d);
        if (det == 0.0 || (first_sign != 0.0 && (det > 0.0) != (first_sign > 0.0)))
        {
            throw DomainError("builtin field '" + name
                              + "': parameters violate nondegeneracy (det b vanishes)");
        }
        first_sign = det;
        certified = std::min(certified, std::abs(det));
    }
    if (p.c1 > certified)
    {
        std::ostringstream os;
        os << "builtin field '" << name << "': declared c1 = " << p.c1
           << " exceeds certified min |det b| = " << certified;
        throw DomainError(os.str());
    }
    f.c1 = p.c1 > 0.0 ? p.c1 : certified;

    f.eval = [p, pa, pb, pg, has_profile](std::span<double const> x,
                                          std::span<double> a,
                                          std::span<double> b,
                                          std::span<double> g) {
        double const s = has_profile && (pa || pb || pg) ? p.profile(x) : 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            a[k] = pa ? p.a_base[k] + p.a_amplitude[k] * s : p.a_base[k];
        }
        for (std::size_t k = 0; k < b.size(); ++k)
        {
            b[k] = pb ? p.b_base[k] + p.b_amplitude[k] * s : p.b_base[k];
        }
        for (std::size_t k = 0; k < g.size(); ++k)
        {
            g[k] = pg ? p.g_base[k] + p.g_amplitude[k] * s : p.g_base[k];
        }
    };
    return f;
}

//---------------------------------------------------------------------------//
double smooth_cutoff(double r, double r1, double r2)
{
    if (r <= r1)
    {
        return 1.0;
    }
    if (r >= r2)
    {
        return 0.0;
    }
    double const u = std::exp(-1.0 / (r2 - r));
    double const v = std::exp(-1.0 / (r - r1));
    return u / (u + v);
}

TestFunction gaussian_mixture(int dim, std::vector<double> weights,
                              std::vector<double> centers,
                              std::vector<double> widths)
{
    if (weights.empty() || centers.size() != weights.size() * dim
        || widths.size() != weights.size())
    {
        throw DomainError("gaussian-mixture: need one center (d values) and width per weight");
    }
    for (double w : widths)
    {
        if (!(w > 0.0))
        {
            throw DomainError("gaussian-mixture: widths must be > 0");
        }
    }
    TestFunction t;
    t.family = "gaussian-mixture";
    t.declared_beta = kSmooth;
    for (double w : weights)
    {
        t.sup_bound += std::abs(w);
    }
    t.core = [dim, weights, centers, widths](std::span<double const> x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
        {
            double r2 = 0.0;
            for (int k = 0; k < dim; ++k)
            {
                double const dx = x[k] - centers[i * dim + k];
                r2 += dx * dx;
            }
            sum += weights[i] * std::exp(-0.5 * r2 / (widths[i] * widths[i]));
        }
        return sum;
    };
    return t;
}

TestFunction radial_power(std::vector<double> center, double power, double r1,
                          double r2)
{
    if (!(power > 0.0) || !(r1 > 0.0 && r1 < r2))
    {
        throw DomainError("radial-power: need power > 0 and 0 < r1 < r2");
    }
    TestFunction t;
    t.family = "radial-power";
    t.declared_beta = power;
    t.sup_bound = std::pow(r2, power);
    t.core = [center, power, r1, r2](std::span<double const> x) {
        double r2sum = 0.0;
        for (std::size_t k = 0; k < center.size(); ++k)
        {
            double const dx = x[k] - center[k];
            r2sum += dx * dx;
        }
        double const r = std::sqrt(r2sum);
        if (r >= r2)
        {
            return 0.0;
        }
        return std::pow(r, power) * smooth_cutoff(r, r1, r2);
    };
    return t;
}

TestFunction weierstrass_function(std::vector<double> wavevector, double base,
                                  double beta, int terms, double phase)
{
    if (!(base > 1.0) || !(beta > 0.0) || terms < 1)
    {
        throw DomainError("weierstrass: need base > 1, beta > 0, terms >= 1");
    }
    TestFunction t;
    t.family = "weierstrass";
    t.declared_beta = beta;
    ScalarProfile prof;
    prof.kind = ScalarProfile::Kind::weierstrass;
    prof.base = base;
    prof.beta = beta;
    prof.terms = terms;
    prof.phase = phase;
    prof.wavevector = std::move(wavevector);
    t.sup_bound = prof.sup();
    t.core = [prof](std::span<double const> x) { return prof(x); };
    return t;
}

TestFunction plane_wave(std::vector<double> wavevector, double amplitude,
                        double phase)
{
    TestFunction t;
    t.family = "plane-wave";
    t.declared_beta = kSmooth;
    t.sup_bound = std::abs(amplitude);
    t.core = [wavevector, amplitude, phase](std::span<double const> x) {
        return amplitude * std::cos(dot(wavevector, x) + phase);
    };
    return t;
}

TestFunction constant_function(double value)
{
    TestFunction t;
    t.family = "constant";
    t.declared_beta = kSmooth;
    t.sup_bound = std::abs(value);
    t.core = [value](std::span<double const>) { return value; };
    return t;
}

//---------------------------------------------------------------------------//
std::vector<double> holder_quotients_by_level(
    std::function<double(std::span<double const>)> const& f, double beta,
    Box const& domain, int levels)
{
    int const d = domain.dim();
    if (levels < 2)
    {
        throw DomainError("holder probe: levels must be >= 2");
    }
    if (!(beta > 0.0 && beta <= 1.0))
    {
        throw DomainError("holder probe: beta must lie in (0, 1]");
    }
    if (d < 1 || domain.upper.size() != domain.lower.size())
    {
        throw DomainError("holder probe: malformed box");
    }
    bool const zygmund = beta == 1.0;
    std::vector<double> out;
    for (int j = 1; j <= levels; ++j)
    {
        long const n = (1L << j) + 1;
        double total = 1.0;
        for (int i = 0; i < d; ++i)
        {
            total *= static_cast<double>(n);
        }
        if (total > 1 << 24)
        {
            throw DomainError("holder probe: grid too large; lower levels");
        }
        std::vector<double> h(d);
        for (int i = 0; i < d; ++i)
        {
            h[i] = std::ldexp(domain.upper[i] - domain.lower[i], -j);
        }
        long const count = static_cast<long>(total);
        std::vector<double> values(count);
        std::vector<double> x(d);
        std::vector<long> idx(d);
        for (long flat = 0; flat < count; ++flat)
        {
            long r = flat;
            for (int i = 0; i < d; ++i)
            {
                idx[i] = r % n;
                r /= n;
                x[i] = domain.lower[i] + idx[i] * h[i];
            }
            values[flat] = f(x);
        }
        double best = 0.0;
        for (long flat = 0; flat < count; ++flat)
        {
            long r = flat;
            long stride = 1;
            for (int i = 0; i < d; ++i)
            {
                long const ii = r % n;
                r /= n;
                double q = 0.0;
                if (zygmund)
                {
                    if (ii >= 1 && ii + 1 < n)
                    {
                        q = std::abs(values[flat + stride] - 2.0 * values[flat]
                                     + values[flat - stride])
                            / h[i];
                    }
                }
                else if (ii + 1 < n)
                {
                    q = std::abs(values[flat + stride] - values[flat])
                        / std::pow(h[i], beta);
                }
                best = std::max(best, q);
                stride *= n;
            }
        }
        out.push_back(best);
    }
    return out;
}

double holder_seminorm_estimate(
    std::function<double(std::span<double const>)> const& f, double beta,
    Box const& domain, int levels)
{
    auto q = holder_quotients_by_level(f, beta, domain, levels);
    return *std::max_element(q.begin(), q.end());
}

double abs_determinant(std::span<double const> m, int n)
{
    return std::abs(signed_determinant(m, n));
}

double nondegeneracy_check(CoefficientField const& field, Box const& domain,
                           int grid_points)
{
    int const d = field.dim;
    if (grid_points < 2)
    {
        throw DomainError("nondegeneracy check: grid_points must be >= 2");
    }
    if (domain.dim() != d)
    {
        throw DomainError("nondegeneracy check: box dimension != d");
    }
    long count = 1;
    for (int i = 0; i < d; ++i)
    {
        count *= grid_points;
    }
    std::vector<double> x(d), worst(d), a(d), b(d * d), g(d * field.noise_dim);
    double best = std::numeric_limits<double>::infinity();
    for (long flat = 0; flat < count; ++flat)
    {
        long r = flat;
        for (int i = 0; i < d; ++i)
        {
            long const ii = r % grid_points;
            r /= grid_points;
            x[i] = domain.lower[i]
                   + (domain.upper[i] - domain.lower[i]) * ii / (grid_points - 1);
        }
        field.eval(x, a, b, g);
        double const det = abs_determinant(b, d);
        if (det < best)
        {
            best = det;
            worst = x;
        }
    }
    if (best == 0.0 || best < field.c1)
    {
        std::ostringstream os;
        os << "degenerate diffusion coefficient: |det b| = " << best
           << " at grid point x = " << format_point(worst)
           << " (declared c1 = " << field.c1 << ")";
        throw DegeneracyError(os.str(), worst, best);
    }
    return best;
}

}  // namespace levy_euler
