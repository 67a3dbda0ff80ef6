#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levy_euler/euler.hpp"
#include "levy_euler/generator.hpp"

namespace levy_euler {

//---------------------------------------------------------------------------//
// Theoretical rates

enum class RateVariant
{
    main,
    heavy_tail,
    jump_diffusion
};

enum class RateLabel
{
    power_beta_over_alpha,  // δ^{β/α}
    power_min_over_alpha,   // δ^{(β∧μ)/α}
    log_linear,             // δ(1 + |ln δ|)
    linear                  // δ
};

std::string to_string(RateVariant v);
std::string to_string(RateLabel l);
RateVariant parse_variant(std::string const& s);

//! r(δ) = δ^exponent, times (1 + |ln δ|) for the log-linear label.
struct RateLaw
{
    RateLabel label = RateLabel::linear;
    double exponent = 1.0;

    double operator()(double delta) const;
};

/*!
 * Rate law of the selected variant after checking its hypotheses:
 * main 0 < β ≤ μ < α + β, β < 3; heavy-tail 0 < β ≤ μ < α;
 * jump-diffusion α = 2, 0 < μ < 3.  Throws DomainError naming the violated
 * inequality.
 */
RateLaw theoretical_law(double alpha, double beta, double mu, RateVariant variant);
double theoretical_rate(double alpha, double beta, double mu,
                        RateVariant variant, double delta);

//! The β/α | log-linear | linear law without hypothesis checks; β may be
//! kSmooth.
RateLaw main_rate_law(double alpha, double beta);

//---------------------------------------------------------------------------//
// Deterministic Monte-Carlo reduction

//! Running count, mean and centred second moment (Welford/Chan).
struct Moments
{
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t excluded = 0;

    void add(double x);
    static Moments merge(Moments const& a, Moments const& b);
    double std_error_of_mean() const;
};

//! Paths per reduction block; block results are merged by a fixed tree.
inline constexpr std::uint64_t kBlockSize = 1024;

enum class Execution
{
    parallel,
    serial_reference
};

struct McOptions
{
    std::uint64_t n_paths = 10000;
    int workers = 0;  // 0: OpenMP default
    double max_excluded_fraction = 1e-3;
    Execution execution = Execution::parallel;
};

//! Per-path value; nullopt marks an excluded (exploded) path.
using PathValue = std::function<std::optional<double>(std::uint64_t path)>;
//! Creates the per-worker PathValue (owns its scratch space).
using PathValueFactory = std::function<PathValue()>;

/*!
 * Reduces n paths into Moments.
 *
 * Paths are grouped into blocks of kBlockSize; each block is folded in path
 * order, then block results are merged pairwise with the split at the
 * largest power of two below the block count.  The parallel kernel and the
 * serial reference (all values first, then the same fold) give bit-identical
 * results for every worker count.
 */
Moments reduce_paths(std::uint64_t n, PathValueFactory const& factory,
                     McOptions const& opts);

//---------------------------------------------------------------------------//
// Experiments

struct Experiment
{
    CoefficientField field;
    StableDriverSpec driver;
    LevyMeasureSpec jumps;
    std::vector<double> x0;
    double T = 1.0;
};

struct Functional
{
    enum class Kind
    {
        terminal,  // g(Y_T)
        running    // Σ f(Y_{τ_i}) Δτ_i
    };
    Kind kind = Kind::terminal;
    TestFunction fn;
};

struct Estimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t excluded = 0;
};

//! Monte-Carlo estimate with streams (key, path index).  Throws Error when
//! the excluded fraction exceeds the configured threshold.
Estimate estimate_expectation_keyed(Functional const& functional,
                                    Experiment const& exp, TimeGrid const& grid,
                                    McOptions const& mc, std::uint64_t key);

//! As above with key derive_key(seed, "rate/level", grid steps).
Estimate estimate_expectation(Functional const& functional, Experiment const& exp,
                              TimeGrid const& grid, McOptions const& mc,
                              std::uint64_t seed);

struct WeakErrorPoint
{
    double delta = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t excluded = 0;
};

/*!
 * E g(Y^δ_T) - E g(Y^{δ_ref}_T) with independent coarse ("rate/level") and
 * reference ("rate/reference") streams; g's offset is dropped.  Requires
 * δ_ref ≤ δ/16 and T/δ, T/δ_ref integral.
 */
WeakErrorPoint estimate_weak_error(TestFunction const& g, Experiment const& exp,
                                   double delta, double delta_ref,
                                   McOptions const& mc, std::uint64_t seed);

//! Same points for a sweep, sharing one reference run; sorted δ descending.
std::vector<WeakErrorPoint> weak_error_sweep(TestFunction const& g,
                                             Experiment const& exp,
                                             std::vector<double> const& deltas,
                                             double delta_ref, McOptions const& mc,
                                             std::uint64_t seed);

//! Sweep for a terminal or running functional; the offset of fn is dropped.
std::vector<WeakErrorPoint> weak_error_sweep(Functional const& functional,
                                             Experiment const& exp,
                                             std::vector<double> const& deltas,
                                             double delta_ref, McOptions const& mc,
                                             std::uint64_t seed);

//---------------------------------------------------------------------------//
// Fitting and envelope

enum class FitModel
{
    power,
    log_linear
};

struct RateReport
{
    std::vector<WeakErrorPoint> points;  // δ descending
    std::vector<std::size_t> used;       // indices of fitted points
    std::vector<std::string> warnings;
    FitModel model = FitModel::power;
    double fitted_slope = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double power_residual = 0.0;      // Σ squared log residuals
    double loglinear_residual = 0.0;  // same for c·δ(1 + |ln δ|)
    RateLaw theory;
};

/*!
 * Least squares of log|e| on log δ with a 95% Student-t interval.  Points
 * with |e| ≤ 3·stderr are dropped with a warning; fewer than 3 remaining
 * throws DomainError.  Both residuals are always computed.
 */
RateReport fit_rate(std::vector<WeakErrorPoint> points,
                    FitModel model = FitModel::power);

struct EnvelopeCheck
{
    bool ok = false;
    double constant = 0.0;             // C = |e₀| / r(δ₀)
    std::vector<double> margin;        // allowance - |e_k| per used point
};

/*!
 * Anchors C at the coarsest used point and requires, for every used point,
 * |e_k| ≤ C r(δ_k) + 3 sqrt(se_k² + (se₀ r(δ_k)/r(δ₀))²).
 */
EnvelopeCheck check_envelope(RateReport const& report, RateLaw const& law);

//---------------------------------------------------------------------------//
// One-step and generator checks

struct OneStepResult
{
    double delta = 0.0;
    std::vector<double> s_fractions;  // s = τ_i + fraction·δ
    std::vector<double> means;        // E f(Y_s) - f(Y_{τ_i})
    std::vector<double> stderrs;
    double max_over_s = 0.0;
    double stderr_at_max = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t excluded = 0;  // summed over the s panel
    double bound = 0.0;               // r(δ, α, β_f)
};

/*!
 * max over s of |E f(Y_s) - f(x0)| for one Euler step of length s from x0
 * (the offset of f cancels).  Streams: key derive_key(seed, "one-step",
 * round(T/δ)), stream id path + fraction index · 2^40.
 */
OneStepResult one_step_check(TestFunction const& f, Experiment const& exp,
                             double delta, McOptions const& mc,
                             std::uint64_t seed);

struct OneStepSweep
{
    std::vector<OneStepResult> levels;
    double fitted_slope = 0.0;
    double theory_exponent = 0.0;
};

OneStepSweep one_step_sweep(TestFunction const& f, Experiment const& exp,
                            std::vector<double> const& deltas,
                            McOptions const& mc, std::uint64_t seed);

struct GeneratorCheck
{
    double quadrature = 0.0;  // (A + B) u(x0)
    double quadrature_error = 0.0;
    std::vector<double> h;
    std::vector<double> mc_estimate;  // (E u(Y_h) - u(x0)) / h
    std::vector<double> mc_stderr;
    double extrapolated = 0.0;  // h → 0 by least squares in h
    double relative_error = 0.0;            // extrapolated vs quadrature
    double relative_error_smallest_h = 0.0;
    bool within_three_pooled = false;  // smallest h
};

/*!
 * Compares Monte-Carlo difference quotients from one Euler step with the
 * quadrature value of (A + B)u at x0, coefficients frozen at x0.  The same
 * streams are used for every h (key derive_key(seed, "generator", 0)).
 */
GeneratorCheck generator_consistency_check(DeclaredFunction const& u,
                                           Experiment const& exp,
                                           std::vector<double> const& h_panel,
                                           McOptions const& mc,
                                           std::uint64_t seed,
                                           QuadratureSpec const& quad = {});

}  // namespace levy_euler
