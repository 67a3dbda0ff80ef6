#include "levy_euler/euler.hpp"

#include <cmath>
#include <sstream>

#include "levy_euler/errors.hpp"

namespace levy_euler {

TimeGrid TimeGrid::uniform(double T, int n)
{
    if (n < 1)
    {
        throw DomainError("time grid: n must be >= 1");
    }
    if (!(T > 0.0) || !std::isfinite(T))
    {
        throw DomainError("time grid: T must be finite and > 0");
    }
    TimeGrid g;
    g.nodes.resize(n + 1);
    for (int i = 0; i <= n; ++i)
    {
        g.nodes[i] = i * T / n;
    }
    g.nodes[n] = T;
    g.delta = T / n;
    for (int i = 0; i < n; ++i)
    {
        g.delta = std::max(g.delta, g.nodes[i + 1] - g.nodes[i]);
    }
    return g;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes,
                              std::optional<double> max_delta)
{
    if (nodes.size() < 2 || nodes.front() != 0.0)
    {
        throw DomainError("time grid: need at least two nodes starting at 0");
    }
    TimeGrid g;
    for (std::size_t i = 1; i < nodes.size(); ++i)
    {
        if (!(nodes[i] > nodes[i - 1]) || !std::isfinite(nodes[i]))
        {
            throw DomainError("time grid: nodes must be finite and strictly increasing");
        }
        g.delta = std::max(g.delta, nodes[i] - nodes[i - 1]);
    }
    if (max_delta && !(g.delta <= *max_delta))
    {
        std::ostringstream os;
        os << "time grid: max step " << g.delta << " exceeds bound " << *max_delta;
        throw DomainError(os.str());
    }
    g.nodes = std::move(nodes);
    return g;
}

EulerScheme::EulerScheme(CoefficientField field, StableDriverSpec driver,
                         LevyMeasureSpec jumps, TimeGrid grid)
    : field_(std::move(field)),
      stable_(driver),
      levy_(std::move(jumps)),
      grid_(std::move(grid))
{
    if (driver.dim != field_.dim)
    {
        throw DomainError("euler scheme: driver dimension != field dimension d");
    }
    if (levy_.spec().dim != field_.noise_dim)
    {
        throw DomainError("euler scheme: jump dimension != field noise dimension m");
    }
    if (levy_.spec().driver_alpha != driver.alpha)
    {
        throw DomainError("euler scheme: jump spec alpha != driver alpha");
    }
    if (driver.alpha < 1.0 && !field_.drift_zero)
    {
        throw DomainError("euler scheme: a must be zero for alpha in (0,1)");
    }
    if (grid_.steps() < 1)
    {
        throw DomainError("euler scheme: empty grid");
    }
    int const n = grid_.steps();
    dt_.resize(n);
    stable_scale_.resize(n);
    levy_step_.resize(n);
    for (int i = 0; i < n; ++i)
    {
        dt_[i] = grid_.nodes[i + 1] - grid_.nodes[i];
        stable_scale_[i] = stable_.scale_for(dt_[i]);
        levy_step_[i] = levy_.prepare(dt_[i]);
    }
}

EulerScheme::Workspace EulerScheme::make_workspace() const
{
    int const d = field_.dim;
    int const m = field_.noise_dim;
    Workspace ws;
    ws.y.resize(d);
    ws.a.resize(d);
    ws.b.resize(d * d);
    ws.g.resize(d * m);
    ws.du.resize(d);
    ws.dz.resize(m);
    return ws;
}

PathResult EulerScheme::simulate(std::span<double const> x0,
                                 TestFunction const* f, RandomStream& rng,
                                 Workspace& ws) const
{
    int const d = field_.dim;
    int const m = field_.noise_dim;
    if (static_cast<int>(x0.size()) != d)
    {
        throw DomainError("euler scheme: x0 dimension != d");
    }
    PathResult res;
    std::copy(x0.begin(), x0.end(), ws.y.begin());
    // Neumaier-compensated left-endpoint sum
    double sum = 0.0;
    double comp = 0.0;
    int const n = grid_.steps();
    for (int i = 0; i < n; ++i)
    {
        if (f)
        {
            double const term = (*f)(ws.y) * dt_[i];
            double const t = sum + term;
            if (std::abs(sum) >= std::abs(term))
            {
                comp += (sum - t) + term;
            }
            else
            {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        field_.eval(ws.y, ws.a, ws.b, ws.g);
        stable_.sample_scaled(stable_scale_[i], rng, ws.du);
        res.jump_count += levy_.increment(levy_step_[i], rng, ws.dz);
        double norm2 = 0.0;
        for (int r = 0; r < d; ++r)
        {
            double v = ws.y[r] + ws.a[r] * dt_[i];
            for (int c = 0; c < d; ++c)
            {
                v += ws.b[r * d + c] * ws.du[c];
            }
            for (int c = 0; c < m; ++c)
            {
                v += ws.g[r * m + c] * ws.dz[c];
            }
            ws.y[r] = v;
            norm2 += v * v;
        }
        if (!(norm2 <= kExplosionNorm * kExplosionNorm))
        {
            res.exploded = true;
            break;
        }
    }
    res.terminal.assign(ws.y.begin(), ws.y.end());
    res.running_integral = sum + comp;
    return res;
}

PathResult simulate_euler_path(std::span<double const> x0,
                               CoefficientField const& field,
                               StableDriverSpec const& driver,
                               LevyMeasureSpec const& z, TimeGrid const& grid,
                               TestFunction const* f, RandomStream& rng)
{
    EulerScheme scheme(field, driver, z, grid);
    auto ws = scheme.make_workspace();
    return scheme.simulate(x0, f, rng, ws);
}

}  // namespace levy_euler
