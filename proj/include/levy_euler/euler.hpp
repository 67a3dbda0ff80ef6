#pragma once

#include <optional>
#include <span>
#include <vector>

#include "levy_euler/levy_driver.hpp"
#include "levy_euler/model.hpp"
#include "levy_euler/random.hpp"
#include "levy_euler/stable.hpp"

namespace levy_euler {

//! Partition 0 = τ₀ < τ₁ < … < τ_n = T.
struct TimeGrid
{
    std::vector<double> nodes;
    double delta = 0.0;  // max step

    int steps() const { return static_cast<int>(nodes.size()) - 1; }
    double horizon() const { return nodes.back(); }

    //! τ_i = i·T/n.
    static TimeGrid uniform(double T, int n);
    //! Arbitrary strictly increasing nodes from 0; optional bound on delta.
    static TimeGrid from_nodes(std::vector<double> nodes,
                               std::optional<double> max_delta = std::nullopt);
};

struct PathResult
{
    std::vector<double> terminal;
    double running_integral = 0.0;
    int jump_count = 0;
    bool exploded = false;
};

//! States beyond this norm (or non-finite) abort the path.
inline constexpr double kExplosionNorm = 1e12;

/*!
 * Euler scheme Y_{i+1} = Y_i + a(Y_i)Δτ + b(Y_i)ΔU + G(Y_i)ΔZ on a fixed grid.
 *
 * Construction validates dimensions and caches per-step sampler constants;
 * simulate() is const and reentrant, each caller passing its own stream and
 * workspace.
 */
class EulerScheme
{
  public:
    struct Workspace
    {
        std::vector<double> y, a, b, g, du, dz;
    };

    EulerScheme(CoefficientField field, StableDriverSpec driver,
                LevyMeasureSpec jumps, TimeGrid grid);

    Workspace make_workspace() const;

    //! Running integral of f at left endpoints when f is given.
    PathResult simulate(std::span<double const> x0, TestFunction const* f,
                        RandomStream& rng, Workspace& ws) const;

    CoefficientField const& field() const { return field_; }
    StableIncrementSampler const& stable() const { return stable_; }
    LevyDriver const& levy() const { return levy_; }
    TimeGrid const& grid() const { return grid_; }

  private:
    CoefficientField field_;
    StableIncrementSampler stable_;
    LevyDriver levy_;
    TimeGrid grid_;
    std::vector<double> dt_;
    std::vector<double> stable_scale_;
    std::vector<LevyDriver::Step> levy_step_;
};

//! One path with a fresh scheme; see EulerScheme.
PathResult simulate_euler_path(std::span<double const> x0,
                               CoefficientField const& field,
                               StableDriverSpec const& driver,
                               LevyMeasureSpec const& z, TimeGrid const& grid,
                               TestFunction const* f, RandomStream& rng);

}  // namespace levy_euler
