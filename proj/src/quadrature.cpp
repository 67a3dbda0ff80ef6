#include "levy_euler/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "levy_euler/errors.hpp"

namespace levy_euler {

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
          std::ostringstream os;
          os << "invalid configuration:";
          for (auto const& v : violations)
          {
              os << "\n  - " << v;
          }
          return os.str();
      }()),
      violations_(std::move(violations))
{
}

namespace {
GaussRule make_gauss_legendre(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                double const p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double const pn = n == 1 ? x : p1;
            double const pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            double const dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
            {
                break;
            }
        }
        double const w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
    {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}
}  // namespace

GaussRule const& gauss_legendre(int n)
{
    if (n < 1)
    {
        throw DomainError("gauss_legendre: order must be >= 1");
    }
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
    {
        it = cache.emplace(n, make_gauss_legendre(n)).first;
    }
    return it->second;
}

Integral integrate_adaptive(std::function<double(double)> const& f, double a,
                            double b, double abs_tol, double rel_tol,
                            std::size_t max_intervals)
{
    // QUADPACK qags / qagiu: global bisection with epsilon-algorithm
    // extrapolation, which copes with interior and endpoint singularities
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)>
        ws(gsl_integration_workspace_alloc(max_intervals), &gsl_integration_workspace_free);
    gsl_function gf;
    gf.function = [](double x, void* p) {
        return (*static_cast<std::function<double(double)> const*>(p))(x);
    };
    gf.params = const_cast<std::function<double(double)>*>(&f);
    Integral out;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    int const status
        = std::isinf(b)
              ? gsl_integration_qagiu(&gf, a, abs_tol, rel_tol, max_intervals, ws.get(),
                                      &out.value, &out.error)
              : gsl_integration_qags(&gf, a, b, abs_tol, rel_tol, max_intervals, ws.get(),
                                     &out.value, &out.error);
    gsl_set_error_handler(old);
    double const allowed = std::max(abs_tol, rel_tol * std::abs(out.value));
    if (status != GSL_SUCCESS || !(out.error <= allowed))
    {
        std::ostringstream os;
        os << "adaptive quadrature on [" << a << ", " << b << "] reached error "
           << out.error << " > " << allowed;
        if (status != GSL_SUCCESS)
        {
            os << " (" << gsl_strerror(status) << ")";
        }
        throw QuadratureError(os.str(), out.error);
    }
    return out;
}

double integrate_composite(std::function<double(double)> const& f, double a,
                           double b, int panels, int order)
{
    auto const& rule = gauss_legendre(order);
    double const h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p)
    {
        double const mid = a + (p + 0.5) * h;
        double part = 0.0;
        for (int k = 0; k < order; ++k)
        {
            part += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        }
        sum += 0.5 * h * part;
    }
    return sum;
}

double unit_sphere_area(int d)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace {
SphereRule build_rule(int d, int nodes, bool hemisphere)
{
    if (d < 1 || d > 3)
    {
        throw DomainError("sphere rules are available for d in {1, 2, 3}");
    }
    if (nodes < 2)
    {
        throw DomainError("sphere rule needs at least 2 nodes");
    }
    SphereRule rule;
    rule.dim = d;
    double const pi = std::numbers::pi;
    if (d == 1)
    {
        if (hemisphere)
        {
            rule.directions = {1.0};
            rule.weights = {2.0};
        }
        else
        {
            rule.directions = {1.0, -1.0};
            rule.weights = {1.0, 1.0};
        }
        return rule;
    }
    if (d == 2)
    {
        double const span = hemisphere ? pi : 2.0 * pi;
        for (int k = 0; k < nodes; ++k)
        {
            double const t = span * (k + 0.5) / nodes;
            rule.directions.push_back(std::cos(t));
            rule.directions.push_back(std::sin(t));
            rule.weights.push_back(2.0 * pi / nodes);
        }
        return rule;
    }
    // d == 3: z = cos(polar angle), dσ = dz dφ
    int const nz = std::max(2, nodes / 2);
    auto const& gl = gauss_legendre(nz);
    double const zlo = hemisphere ? 0.0 : -1.0;
    double const zscale = 0.5 * (1.0 - zlo);
    double const doubling = hemisphere ? 2.0 : 1.0;
    for (int i = 0; i < nz; ++i)
    {
        double const z = zlo + zscale * (gl.nodes[i] + 1.0);
        double const rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int k = 0; k < nodes; ++k)
        {
            double const phi = 2.0 * pi * (k + 0.5) / nodes;
            rule.directions.push_back(rho * std::cos(phi));
            rule.directions.push_back(rho * std::sin(phi));
            rule.directions.push_back(z);
            rule.weights.push_back(doubling * zscale * gl.weights[i] * 2.0 * pi
                                   / nodes);
        }
    }
    return rule;
}
}  // namespace

SphereRule hemisphere_rule(int d, int nodes)
{
    return build_rule(d, nodes, true);
}

SphereRule sphere_rule(int d, int nodes)
{
    return build_rule(d, nodes, false);
}

}  // namespace levy_euler
