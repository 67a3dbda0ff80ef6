#include "levy_euler/levy_driver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <array>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "levy_euler/errors.hpp"
#include "levy_euler/quadrature.hpp"

namespace levy_euler {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm(std::span<double const> v)
{
    double s = 0.0;
    for (double x : v)
    {
        s += x * x;
    }
    return std::sqrt(s);
}

Eigen::MatrixXd as_matrix(std::vector<double> const& rm, int m)
{
    Eigen::MatrixXd out(m, m);
    for (int i = 0; i < m; ++i)
    {
        for (int j = 0; j < m; ++j)
        {
            out(i, j) = rm[i * m + j];
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
// Gaussian jump laws: integrals over |y| ≤ 1 and |y| > 1 in polar form

struct GaussianDensity
{
    int m;
    Eigen::VectorXd mean;
    Eigen::MatrixXd precision;
    double log_norm;

    GaussianDensity(GaussianJumps const& g, int dim) : m(dim)
    {
        mean = Eigen::Map<Eigen::VectorXd const>(g.mean.data(), m);
        Eigen::MatrixXd cov = as_matrix(g.covariance, m);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()
            || ldlt.vectorD().minCoeff() <= 0.0)
        {
            throw DomainError(
                "gaussian jump law: moment integrals need a nonsingular covariance");
        }
        precision = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
        double log_det = ldlt.vectorD().array().log().sum();
        log_norm = -0.5 * (m * std::log(2.0 * std::numbers::pi) + log_det);
    }

    double operator()(Eigen::VectorXd const& y) const
    {
        Eigen::VectorXd r = y - mean;
        return std::exp(log_norm - 0.5 * r.dot(precision * r));
    }
};

// ∫_{rlo ≤ |y| ≤ rhi} h(y) φ(y) dy in polar form
double gaussian_shell(GaussianDensity const& phi, double rlo, double rhi,
                      std::function<double(std::span<double const>)> const& h)
{
    int const m = phi.m;
    auto integrate_ray = [&](std::span<double const> theta) {
        Eigen::VectorXd dir = Eigen::Map<Eigen::VectorXd const>(theta.data(), m);
        Eigen::VectorXd y(m);
        auto f = [&](double r) {
            if (r <= 0.0)
            {
                return 0.0;
            }
            y = r * dir;
            return h(std::span<double const>(y.data(), m)) * std::pow(r, m - 1)
                   * phi(y);
        };
        return integrate_adaptive(f, rlo, rhi, 1e-14, 1e-10).value;
    };
    if (m == 1)
    {
        double const plus = integrate_ray(std::array<double, 1>{1.0});
        double const minus = integrate_ray(std::array<double, 1>{-1.0});
        return plus + minus;
    }
    if (m > 3)
    {
        throw DomainError("gaussian jump law: integrals need m <= 3");
    }
    SphereRule rule = sphere_rule(m, m == 2 ? 256 : 64);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
    {
        sum += rule.weights[i] * integrate_ray(rule.direction(i));
    }
    return sum;
}

double radial_power_fn(std::span<double const> y, double p)
{
    return std::pow(norm(y), p);
}

//---------------------------------------------------------------------------//
// Pareto radius: ∫_{s}^{t} r^p dF(r) with dF ∝ r^{-1-a} on [lower, upper]

double pareto_radial_moment(BoundedParetoJumps const& p, double power,
                            double s, double t, char const* name)
{
    double const a = p.tail_index;
    s = std::max(s, p.lower);
    t = std::min(t, p.upper);
    if (!(s < t))
    {
        return 0.0;
    }
    if (t == kInf && power >= a)
    {
        std::ostringstream os;
        os << "divergent tail moment " << name << ": order " << power
           << " >= Pareto tail index " << a;
        throw DomainError(os.str());
    }
    double const z = std::pow(p.lower, -a) - (p.upper == kInf ? 0.0 : std::pow(p.upper, -a));
    // r = e^v turns the power law into an exponential
    auto f = [&](double v) { return a * std::exp((power - a) * v) / z; };
    double const vlo = std::log(s);
    double const vhi = t == kInf ? kInf : std::log(t);
    return integrate_adaptive(f, vlo, vhi, 1e-15, 1e-11).value;
}
}  // namespace

void LevyMeasureSpec::validate() const
{
    if (!(rate >= 0.0) || !std::isfinite(rate))
    {
        throw DomainError("levy measure: rate must be finite and >= 0");
    }
    if (dim < 1)
    {
        throw DomainError("levy measure: dim must be >= 1");
    }
    if (!(tail_moment_order > 0.0))
    {
        throw DomainError("levy measure: tail moment order mu must be > 0");
    }
    if (!(driver_alpha > 0.0 && driver_alpha <= 2.0))
    {
        throw DomainError("levy measure: driver alpha must lie in (0, 2]");
    }
    std::visit(
        Overloaded{
            [&](AtomJumps const& a) {
                if (a.points.empty() || a.points.size() != a.probabilities.size())
                {
                    throw DomainError("atoms: need one probability per point");
                }
                double total = 0.0;
                for (std::size_t i = 0; i < a.points.size(); ++i)
                {
                    if (static_cast<int>(a.points[i].size()) != dim)
                    {
                        throw DomainError("atoms: point dimension != m");
                    }
                    if (!(a.probabilities[i] >= 0.0))
                    {
                        throw DomainError("atoms: probabilities must be >= 0");
                    }
                    total += a.probabilities[i];
                }
                if (std::abs(total - 1.0) > 1e-12)
                {
                    throw DomainError("atoms: probabilities must sum to 1");
                }
            },
            [&](GaussianJumps const& g) {
                if (static_cast<int>(g.mean.size()) != dim
                    || static_cast<int>(g.covariance.size()) != dim * dim)
                {
                    throw DomainError("gaussian: mean/covariance shape != m");
                }
                Eigen::MatrixXd cov = as_matrix(g.covariance, dim);
                if (!cov.isApprox(cov.transpose(), 1e-12) && cov.norm() > 0)
                {
                    throw DomainError("gaussian: covariance must be symmetric");
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
                if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, cov.norm()))
                {
                    throw DomainError("gaussian: covariance must be positive semidefinite");
                }
            },
            [&](BoundedParetoJumps const& p) {
                if (!(p.tail_index > 0.0))
                {
                    throw DomainError("bounded-pareto: tail index must be > 0");
                }
                if (!(p.lower > 0.0 && p.lower < p.upper))
                {
                    throw DomainError("bounded-pareto: need 0 < lower < upper");
                }
                if (!(p.direction_mixing >= 0.0 && p.direction_mixing <= 1.0))
                {
                    throw DomainError("bounded-pareto: direction mixing must lie in [0, 1]");
                }
            }},
        jump);
}

MomentReport moment_report(LevyMeasureSpec const& spec, double alpha, double mu)
{
    spec.validate();
    MomentReport out;
    if (spec.rate == 0.0)
    {
        return out;
    }
    std::visit(
        Overloaded{
            [&](AtomJumps const& a) {
                for (std::size_t i = 0; i < a.points.size(); ++i)
                {
                    double const r = norm(a.points[i]);
                    double const p = a.probabilities[i];
                    if (r <= 1.0)
                    {
                        out.small_moment += p * std::pow(r, alpha);
                    }
                    else
                    {
                        out.tail_moment += p * std::pow(r, mu);
                    }
                }
            },
            [&](GaussianJumps const& g) {
                GaussianDensity phi(g, spec.dim);
                out.small_moment = gaussian_shell(phi, 0.0, 1.0, [&](auto y) {
                    return radial_power_fn(y, alpha);
                });
                out.tail_moment = gaussian_shell(phi, 1.0, kInf, [&](auto y) {
                    return radial_power_fn(y, mu);
                });
            },
            [&](BoundedParetoJumps const& p) {
                out.small_moment = pareto_radial_moment(p, alpha, 0.0, 1.0,
                                                        "int_{|y|<=1} |y|^alpha pi(dy)");
                out.tail_moment = pareto_radial_moment(p, mu, 1.0, kInf,
                                                       "int_{|y|>1} |y|^mu pi(dy)");
            }},
        spec.jump);
    out.small_moment *= spec.rate;
    out.tail_moment *= spec.rate;
    return out;
}

LevyDriver::LevyDriver(LevyMeasureSpec spec) : spec_(std::move(spec))
{
    moments_ = moment_report(spec_, spec_.driver_alpha, spec_.tail_moment_order);
    int const m = spec_.dim;
    compensator_.assign(m, 0.0);
    std::visit(
        Overloaded{
            [&](AtomJumps const& a) {
                atom_cdf_.resize(a.probabilities.size());
                std::partial_sum(a.probabilities.begin(), a.probabilities.end(),
                                 atom_cdf_.begin());
                atom_cdf_.back() = 1.0;
                if (!spec_.compensated())
                {
                    return;
                }
                for (std::size_t i = 0; i < a.points.size(); ++i)
                {
                    if (norm(a.points[i]) <= 1.0)
                    {
                        for (int k = 0; k < m; ++k)
                        {
                            compensator_[k] += a.probabilities[i] * a.points[i][k];
                        }
                    }
                }
            },
            [&](GaussianJumps const& g) {
                Eigen::MatrixXd cov = as_matrix(g.covariance, m);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
                Eigen::MatrixXd root = es.eigenvectors()
                                       * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
                gaussian_factor_.resize(m * m);
                for (int i = 0; i < m; ++i)
                {
                    for (int j = 0; j < m; ++j)
                    {
                        gaussian_factor_[i * m + j] = root(i, j);
                    }
                }
                if (!spec_.compensated() || spec_.rate == 0.0)
                {
                    return;
                }
                GaussianDensity phi(g, m);
                for (int k = 0; k < m; ++k)
                {
                    compensator_[k] = gaussian_shell(
                        phi, 0.0, 1.0, [k](auto y) { return y[k]; });
                }
            },
            [&](BoundedParetoJumps const& p) {
                if (!spec_.compensated())
                {
                    return;
                }
                compensator_[0] = (1.0 - p.direction_mixing)
                                  * pareto_radial_moment(p, 1.0, 0.0, 1.0,
                                                         "int_{|y|<=1} y pi(dy)");
            }},
        spec_.jump);
    for (double& c : compensator_)
    {
        c *= spec_.rate;
    }
}

LevyDriver::Step LevyDriver::prepare(double dt) const
{
    if (!(dt > 0.0))
    {
        throw DomainError("levy increment: dt must be > 0");
    }
    Step s;
    s.dt = dt;
    s.mean_count = spec_.rate * dt;
    s.prob_zero = std::exp(-s.mean_count);
    return s;
}

void LevyDriver::draw_jump(RandomStream& rng, std::span<double> out) const
{
    int const m = spec_.dim;
    std::visit(
        Overloaded{
            [&](AtomJumps const& a) {
                std::size_t i = 0;
                if (atom_cdf_.size() > 1)
                {
                    double const u = rng.uniform();
                    while (i + 1 < atom_cdf_.size() && u > atom_cdf_[i])
                    {
                        ++i;
                    }
                }
                for (int k = 0; k < m; ++k)
                {
                    out[k] = a.points[i][k];
                }
            },
            [&](GaussianJumps const& g) {
                double z[16];
                std::vector<double> big;
                double* zp = z;
                if (m > 16)
                {
                    big.resize(m);
                    zp = big.data();
                }
                for (int j = 0; j < m; ++j)
                {
                    zp[j] = rng.normal();
                }
                for (int i = 0; i < m; ++i)
                {
                    double v = g.mean[i];
                    for (int j = 0; j < m; ++j)
                    {
                        v += gaussian_factor_[i * m + j] * zp[j];
                    }
                    out[i] = v;
                }
            },
            [&](BoundedParetoJumps const& p) {
                double const a = p.tail_index;
                double const lo = std::pow(p.lower, -a);
                double const hi = p.upper == kInf ? 0.0 : std::pow(p.upper, -a);
                double const r = std::pow(lo - rng.uniform() * (lo - hi), -1.0 / a);
                bool const uniform_dir = p.direction_mixing >= 1.0
                                         || (p.direction_mixing > 0.0
                                             && rng.uniform() < p.direction_mixing);
                if (!uniform_dir)
                {
                    for (int k = 0; k < m; ++k)
                    {
                        out[k] = k == 0 ? r : 0.0;
                    }
                    return;
                }
                double s = 0.0;
                for (int k = 0; k < m; ++k)
                {
                    out[k] = rng.normal();
                    s += out[k] * out[k];
                }
                double const scale = r / std::sqrt(s);
                for (int k = 0; k < m; ++k)
                {
                    out[k] *= scale;
                }
            }},
        spec_.jump);
}

int LevyDriver::increment(Step const& step, RandomStream& rng,
                          std::span<double> out) const
{
    int const m = spec_.dim;
    for (int k = 0; k < m; ++k)
    {
        out[k] = -step.dt * compensator_[k];
    }
    if (step.mean_count == 0.0)
    {
        return 0;
    }
    std::int64_t count;
    if (step.mean_count < 10.0)
    {
        // inversion with the cached P(N = 0)
        double const u = rng.uniform();
        double p = step.prob_zero;
        double cdf = p;
        count = 0;
        while (u > cdf && count < 1000)
        {
            ++count;
            p *= step.mean_count / count;
            cdf += p;
        }
    }
    else
    {
        count = sample_poisson(step.mean_count, rng);
    }
    double jump[16];
    std::vector<double> big;
    std::span<double> j(jump, std::min(m, 16));
    if (m > 16)
    {
        big.resize(m);
        j = big;
    }
    for (std::int64_t c = 0; c < count; ++c)
    {
        draw_jump(rng, j);
        for (int k = 0; k < m; ++k)
        {
            out[k] += j[k];
        }
    }
    return static_cast<int>(count);
}

std::int64_t sample_poisson(double mean, RandomStream& rng)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
    {
        throw DomainError("poisson: mean must be finite and >= 0");
    }
    if (mean < 10.0)
    {
        double const u = rng.uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf && k < 1000)
        {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }
    // PTRS (Hörmann 1993)
    double const slam = std::sqrt(mean);
    double const loglam = std::log(mean);
    double const b = 0.931 + 2.53 * slam;
    double const a = -0.059 + 0.02483 * b;
    double const invalpha = 1.1239 + 1.1328 / (b - 3.4);
    double const vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true)
    {
        double const u = rng.uniform() - 0.5;
        double const v = rng.uniform();
        double const us = 0.5 - std::abs(u);
        double const k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
        {
            return static_cast<std::int64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us))
        {
            continue;
        }
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b)
            <= -mean + k * loglam - std::lgamma(k + 1.0))
        {
            return static_cast<std::int64_t>(k);
        }
    }
}

double jump_expectation(LevyMeasureSpec const& spec,
                        std::function<double(std::span<double const>)> const& h_in,
                        std::function<double(std::span<double const>)> const& h_out)
{
    spec.validate();
    int const m = spec.dim;
    return std::visit(
        Overloaded{
            [&](AtomJumps const& a) {
                double sum = 0.0;
                for (std::size_t i = 0; i < a.points.size(); ++i)
                {
                    auto const& y = a.points[i];
                    sum += a.probabilities[i] * (norm(y) <= 1.0 ? h_in(y) : h_out(y));
                }
                return sum;
            },
            [&](GaussianJumps const& g) {
                GaussianDensity phi(g, m);
                return gaussian_shell(phi, 0.0, 1.0, h_in)
                       + gaussian_shell(phi, 1.0, kInf, h_out);
            },
            [&](BoundedParetoJumps const& p) {
                double const a = p.tail_index;
                double const z = std::pow(p.lower, -a)
                                 - (p.upper == kInf ? 0.0 : std::pow(p.upper, -a));
                std::vector<double> y(m);
                // E over the radius for a fixed direction, r = e^v
                auto along = [&](std::span<double const> dir) {
                    auto piece = [&](double s, double t, auto const& h) {
                        s = std::max(s, p.lower);
                        t = std::min(t, p.upper);
                        if (!(s < t))
                        {
                            return 0.0;
                        }
                        auto f = [&](double v) {
                            double const r = std::exp(v);
                            for (int k = 0; k < m; ++k)
                            {
                                y[k] = r * dir[k];
                            }
                            return a * std::exp(-a * v) / z * h(y);
                        };
                        return integrate_adaptive(f, std::log(s),
                                                  t == kInf ? kInf : std::log(t),
                                                  1e-14, 1e-10)
                            .value;
                    };
                    return piece(0.0, 1.0, h_in) + piece(1.0, kInf, h_out);
                };
                double sum = 0.0;
                if (p.direction_mixing < 1.0)
                {
                    std::vector<double> e1(m, 0.0);
                    e1[0] = 1.0;
                    sum += (1.0 - p.direction_mixing) * along(e1);
                }
                if (p.direction_mixing > 0.0)
                {
                    if (m > 3)
                    {
                        throw DomainError("bounded-pareto: integrals need m <= 3");
                    }
                    SphereRule rule = sphere_rule(m, m == 2 ? 256 : 64);
                    double avg = 0.0;
                    for (std::size_t i = 0; i < rule.size(); ++i)
                    {
                        avg += rule.weights[i] * along(rule.direction(i));
                    }
                    sum += p.direction_mixing * avg / unit_sphere_area(m);
                }
                return sum;
            }},
        spec.jump);
}

std::vector<double> levy_increment(LevyMeasureSpec const& spec, double dt,
                                   RandomStream& rng)
{
    LevyDriver driver(spec);
    std::vector<double> out(spec.dim);
    driver.increment(driver.prepare(dt), rng, out);
    return out;
}

}  // namespace levy_euler
