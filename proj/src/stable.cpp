#include "levy_euler/stable.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levy_euler/errors.hpp"
#include "levy_euler/quadrature.hpp"

namespace levy_euler {

namespace {
constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha, char const* who)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
    {
        std::ostringstream os;
        os << who << ": alpha = " << alpha << " outside (0, 2]";
        throw DomainError(os.str());
    }
}

// ∫₀^∞ (1 - cos u) u^{-1-α} du
Integral radial_factor(double alpha, double tol)
{
    // head on [0, π]: the u²/2 part of 1 - cos u integrates in closed form,
    // the remainder behaves like u^{3-α} at 0
    auto remainder = [alpha](double u) {
        if (u <= 0.0)
        {
            return 0.0;
        }
        double r;
        if (u < 0.05)
        {
            double const u2 = u * u;
            r = u2 * u2 * (-1.0 / 24 + u2 * (1.0 / 720 - u2 / 40320));
        }
        else
        {
            double const s = std::sin(0.5 * u);
            r = 2.0 * s * s - 0.5 * u * u;
        }
        return r * std::pow(u, -1.0 - alpha);
    };
    Integral head = integrate_adaptive(remainder, 0.0, kPi, 0.0, 0.1 * tol);
    head.value += std::pow(kPi, 2.0 - alpha) / (2.0 * (2.0 - alpha));

    // tail: π^{-α}/α - ∫_π^∞ cos(u) u^{-1-α} du, the latter as a sum of
    // sign-alternating pieces between consecutive zeros of cos
    auto const& gl = gauss_legendre(24);
    auto piece = [&](double a, double b) {
        double sum = 0.0;
        for (std::size_t k = 0; k < gl.nodes.size(); ++k)
        {
            double const u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[k];
            sum += gl.weights[k] * std::cos(u) * std::pow(u, -1.0 - alpha);
        }
        return 0.5 * (b - a) * sum;
    };
    double const first = piece(kPi, 1.5 * kPi);
    constexpr int kTerms = 64;
    std::vector<double> partial(kTerms);
    double running = first;
    for (int k = 0; k < kTerms; ++k)
    {
        double const a = 1.5 * kPi + k * kPi;
        running += piece(a, a + kPi);
        partial[k] = running;
    }
    // repeated averaging of the last partial sums (Euler-type acceleration)
    std::vector<double> level(partial.end() - 32, partial.end());
    double previous = level.back();
    while (level.size() > 1)
    {
        previous = level.back();
        for (std::size_t i = 0; i + 1 < level.size(); ++i)
        {
            level[i] = 0.5 * (level[i] + level[i + 1]);
        }
        level.pop_back();
    }
    double const cos_tail = level.front();
    double const series_err = std::abs(cos_tail - previous);

    Integral out;
    out.value = head.value + std::pow(kPi, -alpha) / alpha - cos_tail;
    out.error = head.error + series_err;
    return out;
}

// ∫_{S^{d-1}} |θ₁|^α dσ
Integral angular_factor(int d, double alpha, double tol)
{
    if (d == 1)
    {
        return {2.0, 0.0};
    }
    // polar angle t measured from the equator: |θ₁| = sin t
    auto f = [&](double t) {
        return std::pow(std::sin(t), alpha) * std::pow(std::cos(t), d - 2);
    };
    // tanh-sinh absorbs the t^α endpoint behaviour
    boost::math::quadrature::tanh_sinh<double> ts;
    Integral half;
    double l1 = 0.0;
    half.value = ts.integrate(f, 0.0, 0.5 * kPi, 0.1 * tol, &half.error, &l1);
    if (!(half.error <= 0.1 * tol * std::abs(half.value)))
    {
        throw QuadratureError("angular factor of c_{d,alpha} did not converge", half.error);
    }
    double const factor = 2.0 * unit_sphere_area(d - 1);
    return {factor * half.value, factor * half.error};
}
}  // namespace

void StableDriverSpec::validate() const
{
    require_alpha(alpha, "StableDriverSpec");
    if (dim < 1)
    {
        throw DomainError("StableDriverSpec: dim must be >= 1");
    }
}

CharExponentConstant char_exponent_constant(int d, double alpha,
                                            double tolerance)
{
    if (!(alpha > 0.0 && alpha < 2.0))
    {
        throw DomainError("char_exponent_constant: alpha must lie in (0, 2)");
    }
    if (d < 1)
    {
        throw DomainError("char_exponent_constant: d must be >= 1");
    }
    static std::mutex mutex;
    static std::map<std::pair<int, double>, CharExponentConstant> cache;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find({d, alpha});
        if (it != cache.end() && it->second.quad_error <= tolerance * it->second.value)
        {
            return it->second;
        }
    }
    Integral radial = radial_factor(alpha, tolerance);
    Integral angular = angular_factor(d, alpha, tolerance);
    CharExponentConstant c;
    c.dim = d;
    c.alpha = alpha;
    c.value = radial.value * angular.value;
    c.quad_error = radial.error * angular.value + angular.error * radial.value;
    if (!(c.quad_error <= tolerance * c.value))
    {
        std::ostringstream os;
        os << "c_{" << d << "," << alpha << "}: quadrature error "
           << c.quad_error << " exceeds tolerance";
        throw QuadratureError(os.str(), c.quad_error);
    }
    std::lock_guard<std::mutex> lock(mutex);
    cache[{d, alpha}] = c;
    return c;
}

double char_exponent_constant_closed_form(int d, double alpha)
{
    return std::pow(kPi, 0.5 * d) * std::abs(std::tgamma(-0.5 * alpha))
           / (std::pow(2.0, alpha) * std::tgamma(0.5 * (d + alpha)));
}

double sample_stable_1d(double alpha, double skew, RandomStream& rng)
{
    require_alpha(alpha, "sample_stable_1d");
    if (!(skew >= -1.0 && skew <= 1.0))
    {
        throw DomainError("sample_stable_1d: skew must lie in [-1, 1]");
    }
    if (alpha == 2.0 && skew != 0.0)
    {
        throw DomainError("sample_stable_1d: skew must be 0 when alpha = 2");
    }
    double const v = kPi * (rng.uniform() - 0.5);
    double const w = rng.exponential();
    if (alpha == 1.0)
    {
        double const h = 0.5 * kPi + skew * v;
        return (2.0 / kPi)
               * (h * std::tan(v)
                  - skew * std::log(0.5 * kPi * w * std::cos(v) / h));
    }
    double const t = skew * std::tan(0.5 * kPi * alpha);
    double const b = std::atan(t) / alpha;
    double const s = std::pow(1.0 + t * t, 0.5 / alpha);
    double const ab = alpha * (v + b);
    return s * std::sin(ab) / std::pow(std::cos(v), 1.0 / alpha)
           * std::pow(std::cos(v - ab) / w, (1.0 - alpha) / alpha);
}

double sample_positive_stable(double index, RandomStream& rng)
{
    if (!(index > 0.0 && index < 1.0))
    {
        throw DomainError("sample_positive_stable: index must lie in (0, 1)");
    }
    double const u = kPi * rng.uniform();
    double const e = rng.exponential();
    double const a = index;
    double const log_x = std::log(std::sin(a * u))
                         + (1.0 - a) / a * std::log(std::sin((1.0 - a) * u))
                         - std::log(std::sin(u)) / a
                         - (1.0 - a) / a * std::log(e);
    return std::exp(log_x);
}

StableIncrementSampler::StableIncrementSampler(StableDriverSpec spec)
    : spec_(spec)
{
    spec_.validate();
    if (spec_.alpha < 2.0)
    {
        exponent_constant_ = char_exponent_constant(spec_.dim, spec_.alpha).value;
        subordinator_rate_ = exponent_constant_ * std::pow(2.0, 0.5 * spec_.alpha);
    }
    else
    {
        exponent_constant_ = spec_.wiener == WienerNormalization::standard ? 0.5
                                                                           : 1.0;
    }
}

double StableIncrementSampler::scale_for(double dt) const
{
    if (!(dt > 0.0))
    {
        throw DomainError("stable increment: dt must be > 0");
    }
    if (spec_.alpha == 2.0)
    {
        return std::sqrt(2.0 * exponent_constant_ * dt);
    }
    return std::pow(dt * subordinator_rate_, 1.0 / spec_.alpha);
}

void StableIncrementSampler::sample_scaled(double scale, RandomStream& rng,
                                           std::span<double> out) const
{
    double radius = scale;
    if (spec_.alpha < 2.0)
    {
        radius *= std::sqrt(sample_positive_stable(0.5 * spec_.alpha, rng));
    }
    for (double& v : out)
    {
        v = radius * rng.normal();
    }
}

void StableIncrementSampler::sample(double dt, RandomStream& rng,
                                    std::span<double> out) const
{
    sample_scaled(scale_for(dt), rng, out);
}

void sample_isotropic_increment(StableDriverSpec const& spec, double dt,
                                RandomStream& rng, std::span<double> out)
{
    if (static_cast<int>(out.size()) != spec.dim)
    {
        throw DomainError("sample_isotropic_increment: output size != dim");
    }
    StableIncrementSampler(spec).sample(dt, rng, out);
}

}  // namespace levy_euler
