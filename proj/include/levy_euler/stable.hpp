#pragma once

#include <span>

#include "levy_euler/random.hpp"

namespace levy_euler {

/*!
 * Normalization of the α = 2 driver.
 *
 * exponent_limit: covariance 2t·I, i.e. characteristic exponent -t|ξ|², the
 * continuous limit of the α < 2 convention.  standard: the standard Wiener
 * process, covariance t·I.
 */
enum class WienerNormalization
{
    exponent_limit,
    standard
};

//! Principal driver U^α: spherically-symmetric α-stable in R^dim.
struct StableDriverSpec
{
    double alpha = 2.0;
    int dim = 1;
    WienerNormalization wiener = WienerNormalization::exponent_limit;

    //! Throws DomainError unless 0 < alpha <= 2 and dim >= 1.
    void validate() const;
};

/*!
 * c_{d,α} = ∫ (1 - cos y₁) |y|^{-d-α} dy, the characteristic-exponent
 * constant of the process with Lévy measure dy/|y|^{d+α}:
 * E exp(i⟨ξ, U_t⟩) = exp(-t c_{d,α} |ξ|^α).
 */
struct CharExponentConstant
{
    double value = 0.0;
    int dim = 0;
    double alpha = 0.0;
    double quad_error = 0.0;
};

/*!
 * Numerical c_{d,α} for α in (0, 2), d >= 1.
 *
 * The integral factors as K_α · Ω_{d,α} with the radial part
 * K_α = ∫₀^∞ (1 - cos u) u^{-1-α} du and the angular part
 * Ω_{d,α} = ∫_{S^{d-1}} |θ₁|^α dσ.  K_α is split at π: the head by adaptive
 * Gauss-Kronrod, the tail as π^{-α}/α minus an alternating series of
 * half-period cosine integrals summed with repeated averaging.  Results are
 * cached per (d, α).  Throws QuadratureError if `tolerance` is not reached.
 */
CharExponentConstant char_exponent_constant(int d, double alpha,
                                            double tolerance = 1e-10);

//! Closed form π^{d/2} |Γ(-α/2)| / (2^α Γ((d+α)/2)); cross-check only.
double char_exponent_constant_closed_form(int d, double alpha);

/*!
 * One stable variate via Chambers-Mallows-Stuck.
 *
 * Characteristic function exp(-|ξ|^α (1 - i skew sign(ξ) tan(πα/2))) for
 * α ≠ 1 and exp(-|ξ| (1 + i skew (2/π) sign(ξ) ln|ξ|)) for α = 1.  With
 * skew = 0 this is exp(-|ξ|^α), so α = 2 has variance 2.  For α < 1 and
 * skew = 1 the variate is strictly positive; at α = 1/2 it is the Lévy
 * distribution with scale 1.
 */
double sample_stable_1d(double alpha, double skew, RandomStream& rng);

/*!
 * Positive stable variate with Laplace transform exp(-s^index), index in
 * (0, 1), via Kanter's representation.
 */
double sample_positive_stable(double index, RandomStream& rng);

/*!
 * Increment sampler for U^α.
 *
 * For α < 2 draws sqrt(S)·N with N ~ N(0, I_d) and S a positive (α/2)-stable
 * subordinator value with Laplace transform exp(-dt·k·s^{α/2}),
 * k = c_{d,α} 2^{α/2}, which makes the Lévy measure exactly dy/|y|^{d+α}.
 * For α = 2 draws N(0, 2dt·I) or N(0, dt·I) per the Wiener normalization.
 */
class StableIncrementSampler
{
  public:
    explicit StableIncrementSampler(StableDriverSpec spec);

    StableDriverSpec const& spec() const { return spec_; }
    //! c_{d,α} (1 for α = 2 with exponent-limit normalization, ½ standard).
    double exponent_constant() const { return exponent_constant_; }

    //! Scale factor to pass to sample_scaled for a step of length dt > 0.
    double scale_for(double dt) const;
    //! Increment over a step whose scale came from scale_for.
    void sample_scaled(double scale, RandomStream& rng,
                       std::span<double> out) const;
    //! Increment over a step of length dt.
    void sample(double dt, RandomStream& rng, std::span<double> out) const;

  private:
    StableDriverSpec spec_;
    double exponent_constant_ = 1.0;
    double subordinator_rate_ = 1.0;  // k
};

//! Convenience wrapper over StableIncrementSampler; rejects dt <= 0.
void sample_isotropic_increment(StableDriverSpec const& spec, double dt,
                                RandomStream& rng, std::span<double> out);

}  // namespace levy_euler
