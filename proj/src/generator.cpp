#include "levy_euler/generator.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "levy_euler/errors.hpp"
#include "levy_euler/quadrature.hpp"

namespace levy_euler {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Fn = std::function<double(std::span<double const>)>;
using AngularWeight = std::function<double(std::span<double const>)>;

double norm(std::span<double const> v)
{
    double s = 0.0;
    for (double x : v)
    {
        s += x * x;
    }
    return std::sqrt(s);
}

double distance(std::span<double const> x, std::vector<double> const& c)
{
    if (c.empty())
    {
        return norm(x);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        s += (x[i] - c[i]) * (x[i] - c[i]);
    }
    return std::sqrt(s);
}

double default_scale(std::span<double const> x)
{
    return std::max(1.0, norm(x));
}

//---------------------------------------------------------------------------//
// Far field

struct TailBound
{
    GrowthClass const& growth;
    std::span<double const> x;
    double alpha;

    void check_integrable() const
    {
        if (auto const* p = std::get_if<PolynomialGrowth>(&growth))
        {
            if (p->power >= alpha)
            {
                std::ostringstream os;
                os << "tail integrand not integrable: ∫_{|y|>R} |u(x+y)| |y|^{-d-alpha} dy "
                      "diverges for growth order "
                   << p->power << " >= alpha = " << alpha;
                throw DomainError(os.str());
            }
        }
    }

    //! Bound on |∫_R^∞ u(x ± rθ) r^{-1-α} dr| along direction θ.
    double along(std::span<double const> theta, double R) const
    {
        double const plain = std::pow(R, -alpha) / alpha;
        return std::visit(
            Overloaded{
                [&](BoundedGrowth const& g) { return g.sup * plain; },
                [&](CompactSupportGrowth const& g) {
                    return R >= distance(x, g.center) + g.radius ? 0.0 : g.sup * plain;
                },
                [&](DecayingGrowth const& g) {
                    double const dx = distance(x, g.center);
                    if (R <= dx)
                    {
                        return g.sup * plain;
                    }
                    return std::min(g.sup * plain, g.sup * std::exp(-g.rate * (R - dx))
                                                       * std::pow(R, -1.0 - alpha) / g.rate);
                },
                [&](PlaneWaveGrowth const& g) {
                    double kappa = 0.0;
                    for (std::size_t i = 0; i < theta.size(); ++i)
                    {
                        kappa += g.wavevector[i] * theta[i];
                    }
                    kappa = std::abs(kappa);
                    double const ibp = kappa > 0.0
                                           ? 2.0 / (kappa * std::pow(R, 1.0 + alpha))
                                           : std::numeric_limits<double>::infinity();
                    return std::abs(g.amplitude) * std::min(plain, ibp);
                },
                [&](PolynomialGrowth const& g) {
                    double const p = g.power;
                    double const xn = norm(x);
                    double const cp = std::pow(2.0, std::max(0.0, p - 1.0));
                    return g.constant
                           * (plain + cp * (std::pow(xn, p) * plain
                                            + std::pow(R, p - alpha) / (alpha - p)));
                }},
            growth);
    }

    //! A cutoff at which the support is certainly passed, or 0.
    double support_cutoff() const
    {
        if (auto const* g = std::get_if<CompactSupportGrowth>(&growth))
        {
            return distance(x, g->center) + g->radius;
        }
        return 0.0;
    }
};

//---------------------------------------------------------------------------//
// Radial node table shared by all directions

struct RadialRule
{
    std::vector<double> r;
    std::vector<double> w;  // quadrature weight times r^{-1-α}
};

RadialRule radial_rule(double alpha, double rho, double inner, double R,
                       double max_width, int nodes)
{
    auto const& gl = gauss_legendre(nodes);
    RadialRule rule;
    auto panel = [&](double a, double b) {
        for (int k = 0; k < nodes; ++k)
        {
            double const r = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
            rule.r.push_back(r);
            rule.w.push_back(0.5 * (b - a) * gl.weights[k] * std::pow(r, -1.0 - alpha));
        }
    };
    double a = rho;
    while (a < inner)
    {
        double const b = std::min(2.0 * a, inner);
        if (b - a > 1e-3 * a)
        {
            panel(a, b);
        }
        a = b;
    }
    if (R > inner)
    {
        int const count = static_cast<int>(std::ceil((R - inner) / max_width));
        double const h = (R - inner) / count;
        for (int p = 0; p < count; ++p)
        {
            panel(inner + p * h, p + 1 == count ? R : inner + (p + 1) * h);
        }
    }
    return rule;
}

struct CoreOptions
{
    bool symmetric = true;      // hemisphere with (u(x+y)+u(x-y))/2
    bool compensate = false;    // compensated form: subtract 1_{r≤1} r⟨∇u,θ⟩
};

struct CoreResult
{
    double value;
    double tail_bound;
    double outer_cutoff;
};

double choose_cutoff(QuadratureSpec const& q, TailBound const& tb,
                     SphereRule const& rule, std::vector<double> const& weight)
{
    auto total_bound = [&](double R) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i)
        {
            s += weight[i] * tb.along(rule.direction(i), R);
        }
        return s;
    };
    if (q.outer_cutoff > 0.0)
    {
        double const R = std::max(q.outer_cutoff, q.inner_radius);
        double const b = total_bound(R);
        if (!(b <= q.tolerance))
        {
            std::ostringstream os;
            os << "outer cutoff " << R << " leaves tail bound " << b
               << " above tolerance " << q.tolerance;
            throw QuadratureError(os.str(), b);
        }
        return R;
    }
    double R = std::max(2.0 * q.inner_radius, tb.support_cutoff());
    while (total_bound(R) > 0.25 * q.tolerance)
    {
        R *= 2.0;
        if (R > q.max_outer_cutoff)
        {
            double const b = total_bound(q.max_outer_cutoff);
            std::ostringstream os;
            os << "tail bound " << b << " still above tolerance at outer cutoff "
               << q.max_outer_cutoff;
            throw QuadratureError(os.str(), b);
        }
    }
    return R;
}

CoreResult jump_integral(DeclaredFunction const& fu, std::span<double const> x,
                         double alpha, QuadratureSpec const& q, int radial_nodes,
                         int angular_nodes, AngularWeight const& angular,
                         CoreOptions opt, double fixed_cutoff)
{
    int const d = static_cast<int>(x.size());
    if (!(alpha > 0.0 && alpha < 2.0))
    {
        throw DomainError("jump integral: alpha must lie in (0, 2)");
    }
    if (d < 1 || d > 3)
    {
        throw DomainError("jump integral: quadrature supports d in {1, 2, 3}");
    }
    if (!(q.inner_cutoff > 0.0 && q.inner_cutoff < q.inner_radius))
    {
        throw DomainError("jump integral: need 0 < inner_cutoff < inner_radius");
    }
    if (opt.compensate && q.inner_radius != 1.0)
    {
        throw DomainError("compensated form needs inner_radius = 1");
    }
    TailBound tb{fu.growth, x, alpha};
    tb.check_integrable();

    SphereRule const rule = opt.symmetric ? hemisphere_rule(d, angular_nodes)
                                          : sphere_rule(d, angular_nodes);
    std::vector<double> weight(rule.size());
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
    {
        weight[i] = rule.weights[i] * (angular ? angular(rule.direction(i)) : 1.0);
        weight_sum += weight[i];
    }
    double const R = fixed_cutoff > 0.0 ? fixed_cutoff
                                        : choose_cutoff(q, tb, rule, weight);
    RadialRule const rr = radial_rule(alpha, q.inner_cutoff, q.inner_radius, R,
                                      q.max_panel_width, radial_nodes);

    auto const& u = fu.u;
    double const ux = u(x);
    double const h2 = q.fd_step > 0.0 ? q.fd_step
                                      : std::pow(kEps, 0.25) * default_scale(x);
    double const rho = q.inner_cutoff;
    double const taylor2 = 0.5 * std::pow(rho, 2.0 - alpha) / (2.0 - alpha);
    std::vector<double> grad;
    if (!opt.symmetric)
    {
        grad = fd_gradient(u, x);
    }
    std::vector<double> yp(d), ym(d);
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
    {
        auto const theta = rule.direction(i);
        for (int k = 0; k < d; ++k)
        {
            yp[k] = x[k] + h2 * theta[k];
            ym[k] = x[k] - h2 * theta[k];
        }
        double const second = (u(yp) + u(ym) - 2.0 * ux) / (h2 * h2);
        double acc = taylor2 * second;
        double gtheta = 0.0;
        if (!opt.symmetric)
        {
            for (int k = 0; k < d; ++k)
            {
                gtheta += grad[k] * theta[k];
            }
            if (alpha < 1.0)
            {
                acc += gtheta * std::pow(rho, 1.0 - alpha) / (1.0 - alpha);
            }
        }
        for (std::size_t k = 0; k < rr.r.size(); ++k)
        {
            double const r = rr.r[k];
            double s;
            if (opt.symmetric)
            {
                for (int c = 0; c < d; ++c)
                {
                    yp[c] = x[c] + r * theta[c];
                    ym[c] = x[c] - r * theta[c];
                }
                s = 0.5 * (u(yp) + u(ym)) - ux;
            }
            else
            {
                for (int c = 0; c < d; ++c)
                {
                    yp[c] = x[c] + r * theta[c];
                }
                s = u(yp) - ux;
                if (opt.compensate && r <= 1.0)
                {
                    s -= r * gtheta;
                }
            }
            acc += rr.w[k] * s;
        }
        total += weight[i] * acc;
        tail += weight[i] * tb.along(theta, R);
    }
    // exact far-field part of the -u(x) term
    total -= ux * weight_sum * std::pow(R, -alpha) / alpha;
    return {total, tail, R};
}

QuadratureResult run_with_estimate(DeclaredFunction const& u,
                                   std::span<double const> x, double alpha,
                                   QuadratureSpec const& q,
                                   AngularWeight const& angular, CoreOptions opt)
{
    CoreResult fine = jump_integral(u, x, alpha, q, q.radial_nodes,
                                    q.angular_nodes, angular, opt, 0.0);
    QuadratureResult out;
    out.value = fine.value;
    out.tail_bound = fine.tail_bound;
    out.outer_cutoff = fine.outer_cutoff;
    out.error = fine.tail_bound;
    if (q.estimate_error)
    {
        CoreResult coarse = jump_integral(u, x, alpha, q,
                                          std::max(4, q.radial_nodes / 2),
                                          std::max(2, q.angular_nodes / 2),
                                          angular, opt, fine.outer_cutoff);
        out.error += std::abs(fine.value - coarse.value);
    }
    return out;
}

double second_partial(Fn const& u, std::span<double const> x, int i, int j)
{
    int const d = static_cast<int>(x.size());
    std::vector<double> y(x.begin(), x.end());
    double const hi = std::pow(kEps, 0.25) * std::max(1.0, std::abs(x[i]));
    double const hj = std::pow(kEps, 0.25) * std::max(1.0, std::abs(x[j]));
    (void)d;
    if (i == j)
    {
        y[i] = x[i] + hi;
        double const up = u(y);
        y[i] = x[i] - hi;
        double const dn = u(y);
        return (up + dn - 2.0 * u(x)) / (hi * hi);
    }
    auto at = [&](double si, double sj) {
        y.assign(x.begin(), x.end());
        y[i] += si * hi;
        y[j] += sj * hj;
        return u(y);
    };
    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
}
}  // namespace

//---------------------------------------------------------------------------//
DeclaredFunction declared_plane_wave(std::vector<double> xi, double amplitude,
                                     double phase)
{
    DeclaredFunction f;
    f.growth = PlaneWaveGrowth{amplitude, xi};
    f.u = [xi, amplitude, phase](std::span<double const> y) {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i)
        {
            s += xi[i] * y[i];
        }
        return amplitude * std::cos(s + phase);
    };
    return f;
}

std::vector<double> fd_gradient(Fn const& u, std::span<double const> x)
{
    std::vector<double> y(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double const h = std::cbrt(kEps) * std::max(1.0, std::abs(x[i]));
        y[i] = x[i] + h;
        double const up = u(y);
        y[i] = x[i] - h;
        double const dn = u(y);
        y[i] = x[i];
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

QuadratureResult frac_laplacian(DeclaredFunction const& u,
                                std::span<double const> x, double alpha,
                                QuadratureSpec const& quad)
{
    return run_with_estimate(u, x, alpha, quad, nullptr, CoreOptions{true, false});
}

QuadratureResult frac_laplacian_compensated(DeclaredFunction const& u,
                                            std::span<double const> x,
                                            double alpha,
                                            QuadratureSpec const& quad)
{
    return run_with_estimate(u, x, alpha, quad, nullptr,
                             CoreOptions{false, alpha >= 1.0});
}

QuadratureResult apply_A(std::span<double const> z, CoefficientField const& field,
                         DeclaredFunction const& u, std::span<double const> x,
                         double alpha, QuadratureSpec const& quad,
                         WienerNormalization wiener)
{
    int const d = field.dim;
    if (static_cast<int>(z.size()) != d || static_cast<int>(x.size()) != d)
    {
        throw DomainError("apply_A: z and x must have dimension d");
    }
    if (!(alpha > 0.0 && alpha <= 2.0))
    {
        throw DomainError("apply_A: alpha must lie in (0, 2]");
    }
    std::vector<double> a = field.a(z);
    std::vector<double> b = field.b(z);
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat const> bm(b.data(), d, d);
    double const det = std::abs(bm.partialPivLu().determinant());
    if (!(det > 0.0) || !std::isfinite(det))
    {
        std::ostringstream os;
        os << "apply_A: b(z) is singular (|det b| = " << det << ")";
        throw DegeneracyError(os.str(), std::vector<double>(z.begin(), z.end()), det);
    }

    QuadratureResult out;
    if (alpha == 2.0)
    {
        Eigen::MatrixXd D = bm * bm.transpose();
        double const k = wiener == WienerNormalization::standard ? 0.5 : 1.0;
        double sum = 0.0;
        for (int i = 0; i < d; ++i)
        {
            for (int j = 0; j < d; ++j)
            {
                if (D(i, j) != 0.0)
                {
                    sum += D(i, j) * second_partial(u.u, x, i, j);
                }
            }
        }
        out.value = k * sum;
        return out;
    }

    Eigen::MatrixXd binv = bm.inverse();
    AngularWeight m_density = [binv, det, d, alpha](std::span<double const> theta) {
        Eigen::Map<Eigen::VectorXd const> t(theta.data(), d);
        double const n = (binv * t).norm();
        return std::pow(n, -d - alpha) / det;
    };
    out = run_with_estimate(u, x, alpha, quad, m_density, CoreOptions{true, false});
    if (alpha == 1.0)
    {
        auto g = fd_gradient(u.u, x);
        for (int i = 0; i < d; ++i)
        {
            out.value += a[i] * g[i];
        }
    }
    return out;
}

double apply_B(std::span<double const> z, CoefficientField const& field,
               LevyMeasureSpec const& zspec, DeclaredFunction const& u,
               std::span<double const> x, double alpha)
{
    int const d = field.dim;
    int const m = field.noise_dim;
    if (zspec.dim != m)
    {
        throw DomainError("apply_B: jump dimension != noise dimension m");
    }
    if (static_cast<int>(z.size()) != d || static_cast<int>(x.size()) != d)
    {
        throw DomainError("apply_B: z and x must have dimension d");
    }
    bool const compensate = alpha > 1.0;
    std::vector<double> a = field.a(z);
    std::vector<double> G = field.g(z);
    double const ux = u.u(x);
    std::vector<double> grad;
    double drift = 0.0;
    if (compensate)
    {
        grad = fd_gradient(u.u, x);
        for (int i = 0; i < d; ++i)
        {
            drift += a[i] * grad[i];
        }
    }
    if (zspec.rate == 0.0)
    {
        return drift;
    }
    std::vector<double> shift(d), xy(d);
    auto apply_g = [&](std::span<double const> y) {
        for (int r = 0; r < d; ++r)
        {
            double v = 0.0;
            for (int c = 0; c < m; ++c)
            {
                v += G[r * m + c] * y[c];
            }
            shift[r] = v;
            xy[r] = x[r] + v;
        }
    };
    auto h_out = [&](std::span<double const> y) {
        apply_g(y);
        return u.u(xy) - ux;
    };
    auto h_in = [&](std::span<double const> y) {
        apply_g(y);
        double v = u.u(xy) - ux;
        if (compensate)
        {
            for (int r = 0; r < d; ++r)
            {
                v -= grad[r] * shift[r];
            }
        }
        return v;
    };
    return drift + zspec.rate * jump_expectation(zspec, h_in, h_out);
}

//---------------------------------------------------------------------------//
double mollifier_normalization(int d)
{
    if (d < 1)
    {
        throw DomainError("mollifier: d must be >= 1");
    }
    static std::mutex mutex;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(d);
    if (it != cache.end())
    {
        return it->second;
    }
    auto f = [d](double r) {
        return r >= 1.0 ? 0.0 : std::pow(r, d - 1) * std::exp(-1.0 / (1.0 - r * r));
    };
    // the integrand is flat to all orders at r = 1, where tanh-sinh converges fast
    boost::math::quadrature::tanh_sinh<double> ts;
    double const radial = ts.integrate(f, 0.0, 1.0, 1e-14);
    double const mass = d == 1 ? 2.0 * radial : unit_sphere_area(d) * radial;
    double const c = 1.0 / mass;
    cache[d] = c;
    return c;
}

double mollifier_kernel(std::span<double const> x)
{
    double const r2 = [&] {
        double s = 0.0;
        for (double v : x)
        {
            s += v * v;
        }
        return s;
    }();
    if (r2 >= 1.0)
    {
        return 0.0;
    }
    return mollifier_normalization(static_cast<int>(x.size()))
           * std::exp(-1.0 / (1.0 - r2));
}

double mollify(Fn const& f, MollifierSpec const& spec, std::span<double const> x)
{
    int const d = static_cast<int>(x.size());
    double const eps = spec.epsilon;
    if (!(eps > 0.0 && eps < 1.0))
    {
        throw DomainError("mollify: epsilon must lie in (0, 1)");
    }
    double const c = mollifier_normalization(d);
    if (d == 1)
    {
        double y[1];
        auto integrand = [&](double z) {
            double const r2 = z * z;
            if (r2 >= 1.0)
            {
                return 0.0;
            }
            y[0] = x[0] - eps * z;
            return c * std::exp(-1.0 / (1.0 - r2)) * f(std::span<double const>(y, 1));
        };
        return integrate_adaptive(integrand, -1.0, 1.0, spec.tolerance * 1e-2,
                                  spec.tolerance)
            .value;
    }
    if (d > 3)
    {
        throw DomainError("mollify: d must be <= 3");
    }
    auto const& gl = gauss_legendre(spec.radial_nodes);
    SphereRule rule = sphere_rule(d, spec.angular_nodes);
    std::vector<double> y(d);
    double sum = 0.0;
    for (int k = 0; k < spec.radial_nodes; ++k)
    {
        double const r = 0.5 * (gl.nodes[k] + 1.0);
        double const radial = 0.5 * gl.weights[k] * std::pow(r, d - 1) * c
                              * std::exp(-1.0 / (1.0 - r * r));
        for (std::size_t i = 0; i < rule.size(); ++i)
        {
            auto theta = rule.direction(i);
            for (int j = 0; j < d; ++j)
            {
                y[j] = x[j] - eps * r * theta[j];
            }
            sum += radial * rule.weights[i] * f(y);
        }
    }
    return sum;
}

namespace {
struct LineFit
{
    double slope;
    double intercept;
    double residual;
};

LineFit least_squares(std::vector<double> const& xs, std::vector<double> const& ys)
{
    double const n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.residual = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double const e = ys[i] - fit.intercept - fit.slope * xs[i];
        fit.residual += e * e;
    }
    return fit;
}
}  // namespace

MollifierProbe mollifier_scaling_probe(TestFunction const& f,
                                       GrowthClass const& growth, double alpha,
                                       std::vector<double> const& epsilons,
                                       std::vector<double> const& center,
                                       QuadratureSpec quad)
{
    if (epsilons.size() < 3)
    {
        throw DomainError("mollifier probe: need at least 3 epsilon values");
    }
    int const d = static_cast<int>(center.size());
    MollifierProbe out;
    out.epsilons = epsilons;
    out.log_branch = f.declared_beta == alpha;
    Fn const fn = [&f](std::span<double const> y) { return f(y); };
    for (double eps : epsilons)
    {
        MollifierSpec ms;
        ms.epsilon = eps;
        DeclaredFunction fe;
        fe.u = [&fn, ms](std::span<double const> y) { return mollify(fn, ms, y); };
        fe.growth = growth;
        if (auto* cs = std::get_if<CompactSupportGrowth>(&fe.growth))
        {
            cs->radius += eps;
        }
        QuadratureSpec q = quad;
        q.inner_cutoff = 1e-3 * eps;
        q.fd_step = 1e-3 * eps;
        q.estimate_error = false;

        double sup_err = 0.0;
        double sup_lap = 0.0;
        std::vector<double> p(d);
        for (int k = -4; k <= 4; ++k)
        {
            // probe along the first axis through the center
            p = center;
            p[0] += 0.5 * k * eps;
            double const fe_p = fe.u(p);
            sup_err = std::max(sup_err, std::abs(fe_p - f(p)));
            sup_lap = std::max(sup_lap, std::abs(frac_laplacian(fe, p, alpha, q).value));
        }
        out.sup_error.push_back(sup_err);
        out.sup_frac_laplacian.push_back(sup_lap);
    }
    std::vector<double> le, lerr, llap, lmodel;
    for (std::size_t i = 0; i < epsilons.size(); ++i)
    {
        le.push_back(std::log(epsilons[i]));
        lerr.push_back(std::log(out.sup_error[i]));
        llap.push_back(std::log(out.sup_frac_laplacian[i]));
        lmodel.push_back(std::log(1.0 - std::log(epsilons[i])));
    }
    out.slope_sup_error = least_squares(le, lerr).slope;
    LineFit const lap = least_squares(le, llap);
    out.slope_frac_laplacian = lap.slope;
    out.power_residual = lap.residual;
    // log model: log S = log c + log(1 - ln ε), c by mean
    double offset = 0.0;
    for (std::size_t i = 0; i < le.size(); ++i)
    {
        offset += llap[i] - lmodel[i];
    }
    offset /= static_cast<double>(le.size());
    out.log_residual = 0.0;
    for (std::size_t i = 0; i < le.size(); ++i)
    {
        double const e = llap[i] - lmodel[i] - offset;
        out.log_residual += e * e;
    }
    return out;
}

}  // namespace levy_euler
