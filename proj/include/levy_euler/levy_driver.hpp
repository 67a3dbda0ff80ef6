#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "levy_euler/random.hpp"

namespace levy_euler {

//! Finitely many jump points with probabilities summing to one.
struct AtomJumps
{
    std::vector<std::vector<double>> points;
    std::vector<double> probabilities;
};

//! Gaussian jump law; covariance is row-major m x m, symmetric PSD.
struct GaussianJumps
{
    std::vector<double> mean;
    std::vector<double> covariance;
};

/*!
 * Radius with density proportional to r^{-1-tail_index} on [lower, upper].
 *
 * With probability direction_mixing the direction is uniform on S^{m-1},
 * otherwise it is +e₁.  upper may be +infinity, in which case the μ-moment
 * exists only for μ < tail_index.
 */
struct BoundedParetoJumps
{
    double tail_index = 1.0;
    double lower = 1.0;
    double upper = std::numeric_limits<double>::infinity();
    double direction_mixing = 1.0;
};

using JumpDistribution = std::variant<AtomJumps, GaussianJumps, BoundedParetoJumps>;

//! Finite-activity Lévy measure π = rate · (jump law) on R^dim.
struct LevyMeasureSpec
{
    double rate = 0.0;
    JumpDistribution jump = AtomJumps{{{0.0}}, {1.0}};
    double tail_moment_order = 1.0;  // μ
    double driver_alpha = 2.0;       // selects the compensation regime
    int dim = 1;

    //! Structural checks (no moment integrals); throws DomainError.
    void validate() const;
    //! True when jumps inside the unit ball are compensated: α ∈ (1, 2].
    bool compensated() const { return driver_alpha > 1.0; }
};

struct MomentReport
{
    double small_moment = 0.0;  // ∫_{|y|≤1} |y|^α π(dy)
    double tail_moment = 0.0;   // ∫_{|y|>1} |y|^μ π(dy)
};

/*!
 * Moment integrals of π.  Atoms are summed exactly; Gaussian laws (m ≤ 3)
 * use a polar rule with adaptive radial quadrature; Pareto radii use adaptive
 * radial quadrature.  A divergent tail moment throws DomainError naming the
 * integral.
 */
MomentReport moment_report(LevyMeasureSpec const& spec, double alpha, double mu);

/*!
 * Sampler of increments of Z over a step.
 *
 * An increment is J - dt·C with J a compound-Poisson sum and
 * C = ∫_{|y|≤1} y π(dy) when α ∈ (1, 2], C = 0 otherwise.  At α = 1 nothing
 * is compensated, even though the stable driver is truncated there.
 */
class LevyDriver
{
  public:
    //! Per-step constants; reuse across paths with the same dt.
    struct Step
    {
        double dt = 0.0;
        double mean_count = 0.0;
        double prob_zero = 1.0;
    };

    explicit LevyDriver(LevyMeasureSpec spec);

    LevyMeasureSpec const& spec() const { return spec_; }
    std::span<double const> compensator() const { return compensator_; }
    MomentReport const& moments() const { return moments_; }

    Step prepare(double dt) const;
    //! Writes the increment to out (size m); returns the number of jumps.
    int increment(Step const& step, RandomStream& rng, std::span<double> out) const;
    //! Draws one jump from the jump law.
    void draw_jump(RandomStream& rng, std::span<double> out) const;

  private:
    LevyMeasureSpec spec_;
    std::vector<double> compensator_;
    MomentReport moments_;
    std::vector<double> atom_cdf_;
    std::vector<double> gaussian_factor_;  // row-major square root of Σ
};

/*!
 * E[h_in(Y) 1{|Y|≤1} + h_out(Y) 1{|Y|>1}] for Y drawn from the jump law
 * (not multiplied by the rate).  Atoms are summed; Gaussian (m ≤ 3) and
 * Pareto laws use polar rules with adaptive radial quadrature.
 */
double jump_expectation(LevyMeasureSpec const& spec,
                        std::function<double(std::span<double const>)> const& h_in,
                        std::function<double(std::span<double const>)> const& h_out);

//! Poisson variate: inversion for small means, PTRS otherwise.
std::int64_t sample_poisson(double mean, RandomStream& rng);

//! Convenience wrapper; builds a LevyDriver per call.
std::vector<double> levy_increment(LevyMeasureSpec const& spec, double dt,
                                   RandomStream& rng);

}  // namespace levy_euler
